#pragma once

// Independent reference implementations used by the tests. Nothing here
// calls into the trace or crossing machinery.

#include <cstdint>
#include <vector>

#include "aml/aml.hpp"

namespace aml::oracle {

// A relation over constant sets: lhs < rhs or its negation.
struct SetRelation {
  bool positive = true;
  ConstantSet lhs;
  ConstantSet rhs;
};

inline std::vector<SetRelation> lower(const AlgebraState& st, std::span<const Relation> rels) {
  std::vector<SetRelation> out;
  for (const auto& r : rels) out.push_back({r.positive(), st.components(r.lhs), st.components(r.rhs)});
  return out;
}

// Constants entailed below the join of `start` by the positive relations.
inline ConstantSet horn_closure(const std::vector<SetRelation>& rels, ConstantSet start) {
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& r : rels) {
      if (!r.positive || !r.rhs.is_subset_of(start) || r.lhs.is_subset_of(start)) continue;
      start |= r.lhs;
      changed = true;
    }
  }
  return start;
}

inline bool entails_leq(const std::vector<SetRelation>& rels, const ConstantSet& a, const ConstantSet& b) {
  return a.is_subset_of(horn_closure(rels, b));
}

inline bool consistent(const std::vector<SetRelation>& rels) {
  for (const auto& r : rels)
    if (!r.positive && entails_leq(rels, r.lhs, r.rhs)) return false;
  return true;
}

// R |= not(a < b): adding a < b makes R inconsistent.
inline bool entails_not_leq(std::vector<SetRelation> rels, const ConstantSet& a, const ConstantSet& b) {
  rels.push_back({true, a, b});
  return !consistent(rels);
}

// Every fingerprint over n constants that satisfies all positive relations
// on its own. This family is the freest model of the positives.
inline std::vector<ConstantSet> admissible_fingerprints(std::size_t n, const std::vector<SetRelation>& rels) {
  std::vector<ConstantSet> out;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    ConstantSet fp;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) fp.insert(i);
    bool ok = true;
    for (const auto& r : rels)
      if (r.positive && fp.intersects(r.lhs) && !fp.intersects(r.rhs)) ok = false;
    if (ok) out.push_back(fp);
  }
  return out;
}

inline bool family_leq(const std::vector<ConstantSet>& atoms, const ConstantSet& a, const ConstantSet& b) {
  for (const auto& fp : atoms)
    if (fp.intersects(a) && !fp.intersects(b)) return false;
  return true;
}

inline bool brute_consistent(std::size_t n, const std::vector<SetRelation>& rels) {
  auto family = admissible_fingerprints(n, rels);
  for (const auto& r : rels)
    if (!r.positive && family_leq(family, r.lhs, r.rhs)) return false;
  return true;
}

inline bool brute_entails_leq(std::size_t n, const std::vector<SetRelation>& rels, const ConstantSet& a,
                              const ConstantSet& b) {
  return family_leq(admissible_fingerprints(n, rels), a, b);
}

inline bool brute_entails_not_leq(std::size_t n, std::vector<SetRelation> rels, const ConstantSet& a,
                                  const ConstantSet& b) {
  rels.push_back({true, a, b});
  return !brute_consistent(n, rels);
}

inline bool holds(const AlgebraState& st, const Relation& r) { return st.leq(r.lhs, r.rhs) == r.positive(); }

inline bool all_hold(const AlgebraState& st, std::span<const Relation> rels) {
  for (const auto& r : rels)
    if (!holds(st, r)) return false;
  return true;
}

inline ConstantSet random_subset(Rng& rng, std::size_t n, std::size_t min_size, std::size_t max_size,
                                 const ConstantSet& exclude = {}) {
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < n; ++i)
    if (!exclude.contains(i)) pool.push_back(i);
  rng.shuffle(pool);
  auto hi = std::min(max_size, pool.size());
  auto lo = std::min(min_size, hi);
  auto k = lo + rng.below(hi - lo + 1);
  return ConstantSet(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
}

struct Instance {
  AlgebraState st;
  std::vector<Relation> rels;
};

// Constants c0..c{n-1}; each relation is c < T or not(c < T) with c outside T.
// With `single_lhs`, every relation has c0 on the left, as in classification.
inline Instance random_instance(Rng& rng, std::size_t n, std::size_t n_rels, double neg_frac, bool single_lhs = false) {
  Instance inst{AlgebraState(rng.next()), {}};
  for (std::size_t i = 0; i < n; ++i) inst.st.add_constant("c" + std::to_string(i));
  for (std::size_t k = 0; k < n_rels; ++k) {
    std::size_t lhs = single_lhs ? 0 : rng.below(n);
    auto rhs = random_subset(rng, n, 1, n - 1, ConstantSet{lhs});
    auto t = inst.st.define_term(rhs);
    auto c = ElementRef::constant(static_cast<std::uint32_t>(lhs));
    inst.rels.push_back(rng.bernoulli(neg_frac) ? Relation::neg(c, t) : Relation::pos(c, t));
  }
  return inst;
}

// Draws until the relation set is consistent by the Horn oracle.
inline Instance random_consistent_instance(Rng& rng, std::size_t n, std::size_t n_rels, double neg_frac,
                                           bool single_lhs = false) {
  for (;;) {
    auto inst = random_instance(rng, n, n_rels, neg_frac, single_lhs);
    if (consistent(lower(inst.st, inst.rels))) return inst;
  }
}

// The worked 2x2 example: c1..c8 and v, two positive and three negative
// images.
struct Toy {
  AlgebraState st;
  ElementRef v;
  ElementRef t1p, t2p, t1n, t2n, t3n;
  std::vector<Relation> rels;

  explicit Toy(std::uint64_t seed = 1) : st(seed) {
    for (int i = 1; i <= 8; ++i) st.add_constant("c" + std::to_string(i));
    v = st.add_constant("v");
    t1p = term({1, 2, 7, 8});
    t2p = term({3, 4, 5, 6});
    t1n = term({2, 4, 5, 7});
    t2n = term({3, 5, 6, 8});
    t3n = term({4, 5, 6, 7});
    rels = {Relation::pos(v, t1p), Relation::pos(v, t2p), Relation::neg(v, t1n), Relation::neg(v, t2n),
            Relation::neg(v, t3n)};
  }

  ElementRef c(int i) const { return ElementRef::constant(static_cast<std::uint32_t>(i - 1)); }

  ElementRef term(std::initializer_list<int> ids) {
    ConstantSet s;
    for (int i : ids) s.insert(static_cast<std::size_t>(i - 1));
    return st.define_term(s);
  }
};

inline ConstantSet names_to_set(const ModelSnapshot& snap, std::initializer_list<const char*> names) {
  ConstantSet s;
  for (const char* n : names) s.insert(*snap.constant_index(n));
  return s;
}

}  // namespace aml::oracle
