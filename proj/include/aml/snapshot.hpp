#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "aml/algebra.hpp"

namespace aml {

using AtomFingerprint = ConstantSet;

// Immutable, self-contained view of a learned model.
struct ModelSnapshot {
  static constexpr int kFormatVersion = 1;

  std::uint64_t seed = 0;
  int epoch = 0;
  std::vector<std::string> constants;
  std::vector<AtomFingerprint> atoms;
  std::vector<AtomFingerprint> pinning;

  std::optional<std::size_t> constant_index(const std::string& name) const {
    for (std::size_t i = 0; i < constants.size(); ++i)
      if (constants[i] == name) return i;
    return std::nullopt;
  }

  friend bool operator==(const ModelSnapshot&, const ModelSnapshot&) = default;
};

inline ModelSnapshot take_snapshot(const AlgebraState& st, int epoch, std::vector<AtomFingerprint> pinning = {}) {
  ModelSnapshot s;
  s.seed = st.seed();
  s.epoch = epoch;
  for (std::size_t c = 0; c < st.constant_count(); ++c) s.constants.push_back(st.constant_name(c));
  for (auto id : st.live_atoms()) s.atoms.push_back(st.fingerprint_ref(id));
  s.pinning = std::move(pinning);
  return s;
}

namespace detail {

inline nlohmann::ordered_json sets_to_json(const std::vector<AtomFingerprint>& sets) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& s : sets) arr.push_back(s.to_vector());
  return arr;
}

inline std::vector<AtomFingerprint> sets_from_json(const nlohmann::ordered_json& j, std::size_t n_constants) {
  std::vector<AtomFingerprint> out;
  for (const auto& row : j) {
    AtomFingerprint fp;
    for (const auto& v : row) {
      auto c = v.get<std::size_t>();
      if (c >= n_constants) throw Error(ErrorCode::ParseError, "constant index out of range in snapshot");
      fp.insert(c);
    }
    out.push_back(std::move(fp));
  }
  return out;
}

}  // namespace detail

inline std::string to_json(const ModelSnapshot& s) {
  nlohmann::ordered_json j;
  j["version"] = ModelSnapshot::kFormatVersion;
  j["seed"] = s.seed;
  j["epoch"] = s.epoch;
  j["constants"] = s.constants;
  j["atoms"] = detail::sets_to_json(s.atoms);
  j["pinning"] = detail::sets_to_json(s.pinning);
  return j.dump();
}

inline ModelSnapshot snapshot_from_json(const std::string& text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  try {
    if (j.at("version").get<int>() != ModelSnapshot::kFormatVersion)
      throw Error(ErrorCode::ParseError, "unsupported snapshot version");
    ModelSnapshot s;
    s.seed = j.at("seed").get<std::uint64_t>();
    s.epoch = j.at("epoch").get<int>();
    s.constants = j.at("constants").get<std::vector<std::string>>();
    s.atoms = detail::sets_from_json(j.at("atoms"), s.constants.size());
    s.pinning = detail::sets_from_json(j.at("pinning"), s.constants.size());
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
}

inline void save_snapshot(const ModelSnapshot& s, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out << to_json(s) << '\n';
}

inline ModelSnapshot load_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return snapshot_from_json(ss.str());
}

}  // namespace aml
