#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "aml/algebra.hpp"
#include "aml/error.hpp"
#include "aml/rng.hpp"

namespace aml {

struct BinaryImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // row-major, 1 = black

  BinaryImage() = default;
  BinaryImage(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, 0) {}

  bool at(int row, int col) const { return pixels[static_cast<std::size_t>(row) * width + col] != 0; }
  void set(int row, int col, bool black) { pixels[static_cast<std::size_t>(row) * width + col] = black ? 1 : 0; }

  friend bool operator==(const BinaryImage&, const BinaryImage&) = default;
};

struct LabeledExample {
  BinaryImage image;
  bool label = false;

  friend bool operator==(const LabeledExample&, const LabeledExample&) = default;
};

using QueryTerm = ConstantSet;

// Maps each pixel to a black and a white constant.
class ImageEncoder {
 public:
  ImageEncoder() = default;
  ImageEncoder(int width, int height, std::vector<std::uint32_t> black, std::vector<std::uint32_t> white)
      : width_(width), height_(height), black_(std::move(black)), white_(std::move(white)) {}

  // Registers pixel constants (all black ones first, row-major, then the
  // white ones) named "<prefix>r<row>c<col>b" / "...w".
  static ImageEncoder install(AlgebraState& st, int width, int height, const std::string& prefix = "p") {
    std::vector<std::uint32_t> black, white;
    for (int r = 0; r < height; ++r)
      for (int c = 0; c < width; ++c)
        black.push_back(st.add_constant(prefix + "r" + std::to_string(r) + "c" + std::to_string(c) + "b").index);
    for (int r = 0; r < height; ++r)
      for (int c = 0; c < width; ++c)
        white.push_back(st.add_constant(prefix + "r" + std::to_string(r) + "c" + std::to_string(c) + "w").index);
    return ImageEncoder(width, height, std::move(black), std::move(white));
  }

  // The 2x2 layout of the worked example: c1..c4 are black bottom-left,
  // top-left, top-right, bottom-right; c5..c8 the same pixels in white.
  static ImageEncoder install_toy(AlgebraState& st) {
    std::vector<std::uint32_t> ids;
    for (int i = 1; i <= 8; ++i) ids.push_back(st.add_constant("c" + std::to_string(i)).index);
    // Row-major pixel order: TL, TR, BL, BR.
    std::vector<std::uint32_t> black{ids[1], ids[2], ids[0], ids[3]};
    std::vector<std::uint32_t> white{ids[5], ids[6], ids[4], ids[7]};
    return ImageEncoder(2, 2, std::move(black), std::move(white));
  }

  // Encoder over an existing constant table, using install()'s naming.
  static ImageEncoder lookup(const std::vector<std::string>& names, int width, int height,
                             const std::string& prefix = "p") {
    auto find = [&](const std::string& n) -> std::uint32_t {
      for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == n) return static_cast<std::uint32_t>(i);
      throw Error(ErrorCode::UnknownConstant, n);
    };
    std::vector<std::uint32_t> black, white;
    for (int r = 0; r < height; ++r)
      for (int c = 0; c < width; ++c) {
        auto base = prefix + "r" + std::to_string(r) + "c" + std::to_string(c);
        black.push_back(find(base + "b"));
        white.push_back(find(base + "w"));
      }
    return ImageEncoder(width, height, std::move(black), std::move(white));
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::uint32_t black(int row, int col) const { return black_[static_cast<std::size_t>(row) * width_ + col]; }
  std::uint32_t white(int row, int col) const { return white_[static_cast<std::size_t>(row) * width_ + col]; }
  std::size_t pixel_constant_count() const { return black_.size() + white_.size(); }

  QueryTerm encode(const BinaryImage& img) const {
    if (img.width != width_ || img.height != height_)
      throw Error(ErrorCode::DimensionMismatch, std::to_string(img.width) + "x" + std::to_string(img.height) +
                                                    " image against " + std::to_string(width_) + "x" +
                                                    std::to_string(height_) + " table");
    QueryTerm q;
    for (int r = 0; r < height_; ++r)
      for (int c = 0; c < width_; ++c) q.insert(img.at(r, c) ? black(r, c) : white(r, c));
    return q;
  }

  // Defines the image term and returns v < T or its negation.
  Relation relation(AlgebraState& st, ElementRef class_constant, const LabeledExample& ex) const {
    auto t = st.define_term(encode(ex.image));
    return ex.label ? Relation::pos(class_constant, t) : Relation::neg(class_constant, t);
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint32_t> black_;
  std::vector<std::uint32_t> white_;
};

enum class BarLabeler { HasVerticalBar, ParityOfBars };

inline int complete_bar_count(const BinaryImage& img) {
  int n = 0;
  for (int c = 0; c < img.width; ++c) {
    bool full = true;
    for (int r = 0; r < img.height && full; ++r) full = img.at(r, c);
    n += full;
  }
  return n;
}

inline bool has_vertical_bar(const BinaryImage& img) { return complete_bar_count(img) > 0; }

// Images with a random set of black columns and background noise.
// HasVerticalBar: the label is drawn first (fair coin); positives get 1..W
// bars, negatives none, and the label reflects the bars placed.
// ParityOfBars: 0..W bars; positive iff the final image has an even number of
// complete black columns.
inline std::vector<LabeledExample> gen_bar_images(int width, int height, double noise, BarLabeler labeler,
                                                  std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LabeledExample> out;
  out.reserve(count);
  std::vector<int> cols(width);
  for (std::size_t i = 0; i < count; ++i) {
    BinaryImage img(width, height);
    int bars;
    bool label = false;
    if (labeler == BarLabeler::HasVerticalBar) {
      label = rng.bernoulli(0.5);
      bars = label ? 1 + static_cast<int>(rng.below(width)) : 0;
    } else {
      bars = static_cast<int>(rng.below(width + 1));
    }
    for (int c = 0; c < width; ++c) cols[c] = c;
    rng.shuffle(cols);
    for (int k = 0; k < bars; ++k)
      for (int r = 0; r < height; ++r) img.set(r, cols[k], true);
    for (int r = 0; r < height; ++r)
      for (int c = 0; c < width; ++c)
        if (!img.at(r, c) && rng.bernoulli(noise)) img.set(r, c, true);
    if (labeler == BarLabeler::ParityOfBars) label = complete_bar_count(img) % 2 == 0;
    out.push_back({std::move(img), label});
  }
  return out;
}

// Every image of the given size, in binary counting order of the pixels.
inline std::vector<BinaryImage> all_images(int width, int height) {
  std::size_t n = static_cast<std::size_t>(width) * height;
  std::vector<BinaryImage> out;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
    BinaryImage img(width, height);
    for (std::size_t p = 0; p < n; ++p) img.pixels[p] = (bits >> p) & 1u;
    out.push_back(std::move(img));
  }
  return out;
}

// The M^N atoms of the has-a-vertical-bar concept on an M-row, N-column grid:
// one black pixel per column, plus the class constant.
inline std::vector<ConstantSet> exact_vertical_bar_atomization(int rows, int cols, const ImageEncoder& enc,
                                                               std::uint32_t class_constant,
                                                               std::size_t cap = 1'000'000) {
  if (rows < 1 || cols < 1) throw Error(ErrorCode::SizeLimitExceeded, "grid must be at least 1x1");
  double total = std::pow(static_cast<double>(rows), cols);
  if (total > static_cast<double>(cap)) throw Error(ErrorCode::SizeLimitExceeded, "M^N exceeds the cap");
  std::vector<ConstantSet> out;
  std::vector<int> pick(cols, 0);
  for (;;) {
    ConstantSet fp{class_constant};
    for (int j = 0; j < cols; ++j) fp.insert(enc.black(pick[j], j));
    out.push_back(std::move(fp));
    int j = 0;
    while (j < cols && ++pick[j] == rows) pick[j++] = 0;
    if (j == cols) break;
  }
  return out;
}

// Atoms needed so that a noise-only image contains all of them with
// probability below target_fpr.
inline long required_atom_count(double noise, int bar_length, double target_fpr) {
  double p = 1.0 - std::pow(1.0 - noise, bar_length);
  return static_cast<long>(std::ceil(std::log(target_fpr) / std::log(p)));
}

}  // namespace aml
