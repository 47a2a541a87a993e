#pragma once

#include <span>
#include <vector>

#include "aml/algebra.hpp"

namespace aml {

struct ReductionStats {
  std::size_t atoms_before = 0;
  std::size_t atoms_after = 0;
  AtomSet kept;
};

// Keeps, for each constant, just enough atoms to reproduce its trace.
inline ReductionStats reduce_master(AlgebraState& st) {
  ReductionStats s;
  s.atoms_before = st.atom_count();
  std::vector<std::uint32_t> order(st.constant_count());
  for (std::uint32_t c = 0; c < order.size(); ++c) order[c] = c;
  st.rng().shuffle(order);

  AtomSet keep;
  std::vector<AtomId> candidates;
  for (auto c : order) {
    const auto& here = st.atoms_at(c);
    AtomSet w = st.atom_trace(kBottomAtom);
    for (auto id : here)
      if (keep.contains(id)) w &= st.atom_trace(id);
    const AtomSet& target = st.constant_trace(c);
    while (!(w == target)) {
      auto xi = st.rng().pick(w - target);
      candidates.clear();
      for (auto id : here)
        if (!st.atom_trace(id).contains(xi)) candidates.push_back(id);
      auto phi = st.rng().pick(candidates);
      keep.insert(phi);
      w &= st.atom_trace(phi);
    }
  }

  std::vector<AtomId> doomed;
  for (auto id : st.live_atoms())
    if (!keep.contains(id)) doomed.push_back(id);
  st.delete_atom_ids(doomed);
  s.atoms_after = st.atom_count();
  s.kept = keep;
  return s;
}

// Keeps one dual atom per negative relation whose reverted form is not yet
// witnessed by a kept atom.
inline ReductionStats reduce_dual(AlgebraState& st, std::span<const Relation> rneg) {
  ReductionStats s;
  s.atoms_before = st.dual_atom_count();
  auto order = negatives(rneg);
  st.rng().shuffle(order);
  AtomSet keep{kBottomDualAtom};
  for (const auto& r : order) {
    auto dis = st.node_atoms_dual(st.node_of(r.rhs)) - st.node_atoms_dual(st.node_of(r.lhs));
    if (dis.empty() || dis.intersects(keep)) continue;
    keep.insert(st.rng().pick(dis));
  }
  st.delete_dual_atoms(st.live_dual_atoms() - keep);
  s.atoms_after = st.dual_atom_count();
  s.kept = keep;
  return s;
}

// Removes every atom that has, at each of its constants, another atom with a
// smaller fingerprint (equal fingerprints: the lower index wins).
inline ReductionStats eliminate_redundant_atoms(AlgebraState& st) {
  ReductionStats s;
  s.atoms_before = st.atom_count();
  std::vector<AtomId> doomed;
  for (auto phi : st.live_atoms()) {
    const auto& fp = st.fingerprint_ref(phi);
    bool redundant = true;
    fp.for_each([&](std::size_t c) {
      if (!redundant) return;
      bool witness = false;
      for (auto eta : st.atoms_at(c)) {
        if (eta == phi) continue;
        const auto& fe = st.fingerprint_ref(eta);
        if (!fe.is_subset_of(fp)) continue;
        if (fe == fp && eta > phi) continue;
        witness = true;
        break;
      }
      redundant = witness;
    });
    if (redundant) doomed.push_back(phi);
    else s.kept.insert(phi);
  }
  st.delete_atom_ids(doomed);
  s.atoms_after = st.atom_count();
  return s;
}

}  // namespace aml
