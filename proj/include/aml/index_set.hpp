#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <vector>

namespace aml {

// Growable bitset over non-negative indices. Operations accept operands of
// different lengths; missing words read as zero.
class IndexSet {
 public:
  IndexSet() = default;
  IndexSet(std::initializer_list<std::size_t> members) {
    for (auto m : members) insert(m);
  }
  template <class It>
  IndexSet(It first, It last) {
    for (; first != last; ++first) insert(static_cast<std::size_t>(*first));
  }

  static IndexSet range(std::size_t n) {
    IndexSet s;
    s.words_.assign((n + 63) / 64, ~std::uint64_t{0});
    if (n % 64) s.words_.back() = (std::uint64_t{1} << (n % 64)) - 1;
    return s;
  }

  void insert(std::size_t i) {
    auto w = i / 64;
    if (w >= words_.size()) words_.resize(w + 1, 0);
    words_[w] |= std::uint64_t{1} << (i % 64);
  }
  void erase(std::size_t i) {
    auto w = i / 64;
    if (w < words_.size()) words_[w] &= ~(std::uint64_t{1} << (i % 64));
  }
  bool contains(std::size_t i) const {
    auto w = i / 64;
    return w < words_.size() && (words_[w] >> (i % 64)) & 1u;
  }

  std::size_t size() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }
  bool empty() const {
    return std::all_of(words_.begin(), words_.end(), [](auto w) { return w == 0; });
  }
  void clear() { words_.clear(); }
  void release() { std::vector<std::uint64_t>().swap(words_); }

  IndexSet& operator|=(const IndexSet& o) {
    if (o.words_.size() > words_.size()) words_.resize(o.words_.size(), 0);
    for (std::size_t i = 0; i < o.words_.size(); ++i) words_[i] |= o.words_[i];
    return *this;
  }
  IndexSet& operator&=(const IndexSet& o) {
    auto n = std::min(words_.size(), o.words_.size());
    for (std::size_t i = 0; i < n; ++i) words_[i] &= o.words_[i];
    for (std::size_t i = n; i < words_.size(); ++i) words_[i] = 0;
    return *this;
  }
  IndexSet& operator-=(const IndexSet& o) {
    auto n = std::min(words_.size(), o.words_.size());
    for (std::size_t i = 0; i < n; ++i) words_[i] &= ~o.words_[i];
    return *this;
  }
  friend IndexSet operator|(IndexSet a, const IndexSet& b) { return a |= b; }
  friend IndexSet operator&(IndexSet a, const IndexSet& b) { return a &= b; }
  friend IndexSet operator-(IndexSet a, const IndexSet& b) { return a -= b; }

  bool is_subset_of(const IndexSet& o) const {
    for (std::size_t i = 0; i < words_.size(); ++i) {
      auto ow = i < o.words_.size() ? o.words_[i] : 0;
      if (words_[i] & ~ow) return false;
    }
    return true;
  }
  bool intersects(const IndexSet& o) const {
    auto n = std::min(words_.size(), o.words_.size());
    for (std::size_t i = 0; i < n; ++i)
      if (words_[i] & o.words_[i]) return true;
    return false;
  }

  friend bool operator==(const IndexSet& a, const IndexSet& b) {
    const auto& lo = a.words_.size() < b.words_.size() ? a.words_ : b.words_;
    const auto& hi = a.words_.size() < b.words_.size() ? b.words_ : a.words_;
    for (std::size_t i = 0; i < lo.size(); ++i)
      if (lo[i] != hi[i]) return false;
    for (std::size_t i = lo.size(); i < hi.size(); ++i)
      if (hi[i]) return false;
    return true;
  }

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      auto bits = words_[w];
      while (bits) {
        auto b = static_cast<std::size_t>(std::countr_zero(bits));
        f(w * 64 + b);
        bits &= bits - 1;
      }
    }
  }

  std::vector<std::size_t> to_vector() const {
    std::vector<std::size_t> out;
    for_each([&](std::size_t i) { out.push_back(i); });
    return out;
  }

  std::optional<std::size_t> first() const {
    for (std::size_t w = 0; w < words_.size(); ++w)
      if (words_[w]) return w * 64 + static_cast<std::size_t>(std::countr_zero(words_[w]));
    return std::nullopt;
  }

  // k-th member in ascending order (0-based).
  std::optional<std::size_t> nth(std::size_t k) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      auto c = static_cast<std::size_t>(std::popcount(words_[w]));
      if (k < c) {
        auto bits = words_[w];
        for (std::size_t j = 0; j < k; ++j) bits &= bits - 1;
        return w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
      }
      k -= c;
    }
    return std::nullopt;
  }

  std::size_t hash() const {
    std::size_t n = words_.size();
    while (n && words_[n - 1] == 0) --n;
    std::size_t h = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < n; ++i) h = (h ^ std::hash<std::uint64_t>{}(words_[i])) * 0x100000001b3ull;
    return h;
  }

  // Lexicographic order on member lists; used only to sort sets deterministically.
  friend bool operator<(const IndexSet& a, const IndexSet& b) { return a.to_vector() < b.to_vector(); }

 private:
  std::vector<std::uint64_t> words_;
};

struct IndexSetHash {
  std::size_t operator()(const IndexSet& s) const { return s.hash(); }
};

}  // namespace aml
