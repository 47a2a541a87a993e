#pragma once

#include <cstdint>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include "aml/error.hpp"
#include "aml/problems/images.hpp"

namespace aml {

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

struct IdxDataset {
  std::vector<BinaryImage> images;
  std::vector<std::uint8_t> labels;
};

namespace detail {

inline std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
  return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), {});
}

inline std::uint32_t read_be32(const std::vector<std::uint8_t>& b, std::size_t at, const std::string& path) {
  if (b.size() < at + 4) throw Error(ErrorCode::TruncatedFile, path + ": header");
  return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) | (std::uint32_t{b[at + 2]} << 8) |
         std::uint32_t{b[at + 3]};
}

inline void put_be32(std::vector<std::uint8_t>& b, std::uint32_t v) {
  for (int s = 24; s >= 0; s -= 8) b.push_back(static_cast<std::uint8_t>(v >> s));
}

inline void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace detail

// Parses an IDX image/label pair; a pixel at or above threshold is black.
inline IdxDataset load_idx(const std::string& image_path, const std::string& label_path, int threshold = 128) {
  auto ib = detail::read_file(image_path);
  auto lb = detail::read_file(label_path);
  if (detail::read_be32(ib, 0, image_path) != kIdxImageMagic) throw Error(ErrorCode::BadMagic, image_path);
  if (detail::read_be32(lb, 0, label_path) != kIdxLabelMagic) throw Error(ErrorCode::BadMagic, label_path);
  auto n = detail::read_be32(ib, 4, image_path);
  auto rows = detail::read_be32(ib, 8, image_path);
  auto cols = detail::read_be32(ib, 12, image_path);
  auto nl = detail::read_be32(lb, 4, label_path);
  if (n != nl) throw Error(ErrorCode::CountMismatch, std::to_string(n) + " images, " + std::to_string(nl) + " labels");
  std::size_t px = static_cast<std::size_t>(rows) * cols;
  if (ib.size() < 16 + px * n) throw Error(ErrorCode::TruncatedFile, image_path);
  if (lb.size() < 8 + std::size_t{nl}) throw Error(ErrorCode::TruncatedFile, label_path);
  IdxDataset ds;
  ds.images.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    BinaryImage img(static_cast<int>(cols), static_cast<int>(rows));
    for (std::size_t p = 0; p < px; ++p) img.pixels[p] = ib[16 + i * px + p] >= threshold ? 1 : 0;
    ds.images.push_back(std::move(img));
  }
  ds.labels.assign(lb.begin() + 8, lb.begin() + 8 + nl);
  return ds;
}

// One-vs-rest examples for one digit.
inline std::vector<LabeledExample> one_vs_rest(const IdxDataset& ds, std::uint8_t digit) {
  std::vector<LabeledExample> out;
  for (std::size_t i = 0; i < ds.images.size(); ++i) out.push_back({ds.images[i], ds.labels[i] == digit});
  return out;
}

inline void write_idx_images(const std::string& path, std::uint32_t rows, std::uint32_t cols,
                             const std::vector<std::vector<std::uint8_t>>& images) {
  std::vector<std::uint8_t> b;
  detail::put_be32(b, kIdxImageMagic);
  detail::put_be32(b, static_cast<std::uint32_t>(images.size()));
  detail::put_be32(b, rows);
  detail::put_be32(b, cols);
  for (const auto& img : images) b.insert(b.end(), img.begin(), img.end());
  detail::write_file(path, b);
}

inline void write_idx_labels(const std::string& path, const std::vector<std::uint8_t>& labels) {
  std::vector<std::uint8_t> b;
  detail::put_be32(b, kIdxLabelMagic);
  detail::put_be32(b, static_cast<std::uint32_t>(labels.size()));
  b.insert(b.end(), labels.begin(), labels.end());
  detail::write_file(path, b);
}

}  // namespace aml
