#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "aml/index_set.hpp"

namespace aml {

// Seeded generator with portable derived draws: mt19937_64 output is fixed by
// the standard, and the helpers below avoid library-specific distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 1) : engine_(seed) {}

  void reseed(std::uint64_t seed) { engine_.seed(seed); }
  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) {
    auto limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do x = engine_();
    while (x >= limit);
    return x % n;
  }

  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  bool bernoulli(double p) { return unit() < p; }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

  template <class T>
  const T& pick(const std::vector<T>& v) { return v[below(v.size())]; }

  // Uniform member of a non-empty set, counted in ascending order.
  std::size_t pick(const IndexSet& s) { return *s.nth(below(s.size())); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace aml
