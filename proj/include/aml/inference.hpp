#pragma once

#include <span>
#include <unordered_set>
#include <vector>

#include "aml/algebra.hpp"
#include "aml/crossing.hpp"
#include "aml/snapshot.hpp"
#include "aml/trace.hpp"

namespace aml {

struct VoteResult {
  int agreements = 0;
  bool decision = false;
  int threshold = 0;
};

// a < b in a snapshot model, for constant sets a and b: every atom meeting a
// meets b.
inline bool snapshot_leq(const ModelSnapshot& snap, const ConstantSet& a, const ConstantSet& b) {
  for (const auto& fp : snap.atoms)
    if (fp.intersects(a) && !fp.intersects(b)) return false;
  return true;
}

inline bool contains(const ModelSnapshot& snap, std::uint32_t class_constant, const ConstantSet& q) {
  if (class_constant >= snap.constants.size())
    throw Error(ErrorCode::UnknownConstant, "constant index " + std::to_string(class_constant));
  for (const auto& fp : snap.atoms)
    if (fp.contains(class_constant) && !fp.intersects(q)) return false;
  return true;
}

inline VoteResult vote(std::span<const ModelSnapshot> snaps, std::uint32_t class_constant, const ConstantSet& q,
                       int threshold) {
  VoteResult r;
  r.threshold = threshold;
  for (const auto& s : snaps) r.agreements += contains(s, class_constant, q);
  r.decision = r.agreements >= threshold;
  return r;
}

// Number of distinct pinning fingerprints of the class constant that miss q.
inline std::size_t count_misses(std::span<const AtomFingerprint> pinning, std::uint32_t class_constant,
                                const ConstantSet& q) {
  std::unordered_set<AtomFingerprint, IndexSetHash> seen;
  std::size_t misses = 0;
  for (const auto& fp : pinning) {
    if (!fp.contains(class_constant) || !seen.insert(fp).second) continue;
    misses += !fp.intersects(q);
  }
  return misses;
}

inline bool misses_classify(std::span<const AtomFingerprint> pinning, std::uint32_t class_constant,
                            const ConstantSet& q, std::size_t cutoff) {
  return count_misses(pinning, class_constant, q) <= cutoff;
}

namespace detail {

inline AlgebraState scratch_copy(const AlgebraState& schema) {
  AlgebraState st = schema;
  st.clear_atoms();
  st.reset_dual();
  return st;
}

}  // namespace detail

// Dual built from R alone: the duals of the negative right-hand sides get an
// atom each, and terms of R receive the atoms shared by all of their
// components. `atoms` pairs each non-bottom dual atom with the fingerprint of
// its master atom: the constants whose dual lacks it.
struct LeastFreeConstruction {
  AlgebraState dual;
  std::vector<std::pair<DualAtomId, ConstantSet>> atoms;
};

inline LeastFreeConstruction least_free_construction(const AlgebraState& schema, std::span<const Relation> rels) {
  LeastFreeConstruction out{detail::scratch_copy(schema), {}};
  auto& st = out.dual;
  if (!preprocess_duals(st, rels).consistent) throw Error(ErrorCode::InconsistentInput, "relations are inconsistent");

  std::vector<ElementRef> terms;
  for (const auto& r : rels)
    for (auto x : {r.lhs, r.rhs})
      if (x.kind == ElementKind::Term) terms.push_back(x);
  for (bool changed = true; changed;) {
    changed = false;
    for (auto t : terms) {
      std::optional<AtomSet> shared;
      st.components(t).for_each([&](std::size_t c) {
        if (!shared) shared = st.constant_dual_atoms(c);
        else *shared &= st.constant_dual_atoms(c);
      });
      auto missing = *shared - st.node_atoms_dual(st.node_of(t));
      missing.for_each([&](std::size_t z) { st.edge_dual_atom(static_cast<DualAtomId>(z), st.node_of(t)); });
      changed = changed || !missing.empty();
    }
  }
  for (const auto& r : rels)
    if (!r.positive() && !reverted_negative_holds(st, r))
      throw Error(ErrorCode::InconsistentInput, "relations are inconsistent");

  auto duals = st.live_dual_atoms();
  duals.erase(kBottomDualAtom);
  duals.for_each([&](std::size_t z) {
    ConstantSet fp;
    for (std::size_t c = 0; c < st.constant_count(); ++c)
      if (!st.constant_dual_atoms(c).contains(z)) fp.insert(c);
    out.atoms.emplace_back(static_cast<DualAtomId>(z), fp);
  });
  return out;
}

// One master atom per dual atom of the construction above.
inline ModelSnapshot build_least_free_model(const AlgebraState& schema, std::span<const Relation> rels) {
  auto lf = least_free_construction(schema, rels);
  auto st = detail::scratch_copy(schema);
  for (const auto& [z, fp] : lf.atoms)
    if (!fp.empty()) st.add_atom_with_fingerprint(fp);
  return take_snapshot(st, 0);
}

// One atom per constant, then every positive relation enforced by full
// crossing.
inline ModelSnapshot build_freest_model(const AlgebraState& schema, std::span<const Relation> rels,
                                        std::size_t atom_cap = 100000) {
  auto st = detail::scratch_copy(schema);
  for (std::size_t c = 0; c < st.constant_count(); ++c) st.add_atom_with_fingerprint(ConstantSet{c});
  for (const auto& r : rels) {
    if (!r.positive()) continue;
    full_crossing(st, r.lhs, r.rhs);
    if (st.atom_count() > atom_cap) throw Error(ErrorCode::SizeLimitExceeded, "freest model exceeds the atom cap");
  }
  return take_snapshot(st, 0);
}

}  // namespace aml
