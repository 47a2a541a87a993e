#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "aml/error.hpp"
#include "aml/inference.hpp"
#include "aml/problems/images.hpp"
#include "aml/snapshot.hpp"

namespace aml {

inline double clip_rate(double x) { return std::clamp(x, 0.0, 1.0); }

// (ln 3 / 2) C / kappa
inline double predicted_error(double constants, double kappa) {
  return clip_rate(std::log(3.0) / 2.0 * constants / kappa);
}

// (ln 3 d^2 - 2 ln d!) / kappa
inline double predicted_error_symmetric(int d, double kappa) {
  double dd = static_cast<double>(d);
  return clip_rate((std::log(3.0) * dd * dd - 2.0 * std::lgamma(dd + 1.0)) / kappa);
}

struct ExperimentRecord {
  int epoch = 0;
  std::size_t retained = 0;   // R
  std::size_t atoms = 0;      // Z
  std::size_t constants = 0;  // C
  double train_error = 0;
  double test_error = 0;
  std::optional<double> kappa;  // R / Z, absent when Z = 0
  std::uint64_t seed = 0;

  friend bool operator==(const ExperimentRecord&, const ExperimentRecord&) = default;
};

inline double error_rate(const ModelSnapshot& snap, std::uint32_t class_constant, const ImageEncoder& enc,
                         const std::vector<LabeledExample>& examples) {
  if (examples.empty()) return 0.0;
  std::size_t wrong = 0;
  for (const auto& ex : examples) wrong += contains(snap, class_constant, enc.encode(ex.image)) != ex.label;
  return static_cast<double>(wrong) / static_cast<double>(examples.size());
}

// R counts the distinct training examples the model still classifies
// correctly; C counts the pixel constants.
inline ExperimentRecord record_epoch(const ModelSnapshot& snap, std::uint32_t class_constant, const ImageEncoder& enc,
                                     const std::vector<LabeledExample>& eval_set,
                                     const std::vector<LabeledExample>& training, double train_error) {
  ExperimentRecord r;
  r.epoch = snap.epoch;
  r.seed = snap.seed;
  r.constants = enc.pixel_constant_count();
  r.atoms = snap.atoms.size();
  for (const auto& ex : training) r.retained += contains(snap, class_constant, enc.encode(ex.image)) == ex.label;
  r.train_error = clip_rate(train_error);
  r.test_error = error_rate(snap, class_constant, enc, eval_set);
  if (r.atoms > 0) r.kappa = static_cast<double>(r.retained) / static_cast<double>(r.atoms);
  return r;
}

inline constexpr const char* kCsvHeader = "epoch,R,Z,C,train_err,test_err,kappa,seed";
inline constexpr const char* kUndefined = "NA";

namespace detail {

inline std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 10);
  return std::string(buf, res.ptr);
}

template <class T>
T parse_number(const std::string& s) {
  T v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw Error(ErrorCode::ParseError, "bad number: " + s);
  return v;
}

}  // namespace detail

inline std::string to_csv_row(const ExperimentRecord& r) {
  std::string out = std::to_string(r.epoch) + "," + std::to_string(r.retained) + "," + std::to_string(r.atoms) + "," +
                    std::to_string(r.constants) + "," + detail::format_double(r.train_error) + "," +
                    detail::format_double(r.test_error) + ",";
  out += r.kappa ? detail::format_double(*r.kappa) : kUndefined;
  out += "," + std::to_string(r.seed);
  return out;
}

inline ExperimentRecord from_csv_row(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) f.push_back(cell);
  if (f.size() != 8) throw Error(ErrorCode::ParseError, "expected 8 fields: " + line);
  ExperimentRecord r;
  r.epoch = detail::parse_number<int>(f[0]);
  r.retained = detail::parse_number<std::size_t>(f[1]);
  r.atoms = detail::parse_number<std::size_t>(f[2]);
  r.constants = detail::parse_number<std::size_t>(f[3]);
  r.train_error = detail::parse_number<double>(f[4]);
  r.test_error = detail::parse_number<double>(f[5]);
  if (f[6] != kUndefined) r.kappa = detail::parse_number<double>(f[6]);
  r.seed = detail::parse_number<std::uint64_t>(f[7]);
  return r;
}

inline void write_csv(std::ostream& out, const std::vector<ExperimentRecord>& records) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) out << to_csv_row(r) << '\n';
}

inline std::vector<ExperimentRecord> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw Error(ErrorCode::ParseError, "missing CSV header");
  std::vector<ExperimentRecord> out;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(from_csv_row(line));
  return out;
}

}  // namespace aml
