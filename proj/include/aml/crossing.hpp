#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "aml/algebra.hpp"
#include "aml/reduction.hpp"
#include "aml/trace.hpp"

namespace aml {

struct CreatedAtom {
  AtomId atom;     // kBottomAtom when the product collapses into atom 0
  AtomId parent;   // atom of dis(a,b), or the copied atom of b for a protective copy
  AtomId partner;  // atom of b it was crossed with; kBottomAtom for copies
  bool copy = false;
};

struct CrossingPlan {
  ElementRef source;
  ElementRef target;
  AtomSet discriminant;
  std::vector<CreatedAtom> created;
  AtomSet marked_for_deletion;
};

enum class TraceCheck { Enforce, Skip };

namespace detail {

inline void require_trace_constraint(const AlgebraState& st, ElementRef a, ElementRef b) {
  if (!st.trace(b).is_subset_of(st.trace(a)))
    throw Error(ErrorCode::TraceConstraintMissing, "Tr(b) is not contained in Tr(a)");
}

inline void cross_pair(AlgebraState& st, CrossingPlan& plan, AtomId phi, AtomId eps) {
  if (eps == kBottomAtom) {
    plan.created.push_back({kBottomAtom, phi, kBottomAtom, false});
    return;
  }
  ConstantSet fp = st.fingerprint_ref(phi) | st.fingerprint_ref(eps);
  plan.created.push_back({st.add_atom_with_fingerprint(fp), phi, eps, false});
}

inline void copy_atoms(AlgebraState& st, CrossingPlan& plan, const std::vector<AtomId>& used) {
  for (auto eps : used) {
    ConstantSet fp = st.fingerprint_ref(eps);
    plan.created.push_back({st.add_atom_with_fingerprint(fp), eps, kBottomAtom, true});
  }
}

inline void finish(AlgebraState& st, CrossingPlan& plan, const std::vector<AtomId>& dis,
                   const std::vector<AtomId>& used) {
  std::vector<AtomId> doomed(dis);
  doomed.insert(doomed.end(), used.begin(), used.end());
  for (auto id : doomed) plan.marked_for_deletion.insert(id);
  st.delete_atom_ids(doomed);
}

}  // namespace detail

// Replaces every atom of dis(a,b) by its products with all atoms of b and
// copies every atom of b.
inline CrossingPlan full_crossing(AlgebraState& st, ElementRef a, ElementRef b, TraceCheck check = TraceCheck::Enforce) {
  CrossingPlan plan{a, b, {}, {}, {}};
  auto dis = st.discriminant(a, b);
  if (dis.empty()) return plan;
  if (check == TraceCheck::Enforce) detail::require_trace_constraint(st, a, b);
  for (auto id : dis) plan.discriminant.insert(id);
  auto cols = st.node_atoms(st.components(b)).to_vector();
  for (auto phi : dis)
    for (auto eps : cols) detail::cross_pair(st, plan, phi, static_cast<AtomId>(eps));
  std::vector<AtomId> used;
  for (auto eps : cols)
    if (eps != kBottomAtom) used.push_back(static_cast<AtomId>(eps));
  detail::copy_atoms(st, plan, used);
  detail::finish(st, plan, dis, used);
  return plan;
}

// Crosses each atom of dis(a,b) with only as many atoms of b as needed to
// keep its trace.
inline CrossingPlan sparse_crossing(AlgebraState& st, ElementRef a, ElementRef b,
                                    TraceCheck check = TraceCheck::Enforce) {
  CrossingPlan plan{a, b, {}, {}, {}};
  auto dis = st.discriminant(a, b);
  if (dis.empty()) return plan;
  if (check == TraceCheck::Enforce) detail::require_trace_constraint(st, a, b);
  for (auto id : dis) plan.discriminant.insert(id);

  // Drawn without replacement by a partial Fisher-Yates pass per atom.
  auto pool = st.node_atoms(st.components(b)).to_vector();
  const AtomSet all = st.live_dual_atoms();
  AtomSet used_set;
  for (auto phi : dis) {
    AtomSet delta = all - st.atom_trace(phi);
    std::size_t k = 0;
    do {
      if (k == pool.size()) throw Error(ErrorCode::TraceConstraintMissing, "atoms of b cannot restore the trace");
      std::swap(pool[k], pool[k + st.rng().below(pool.size() - k)]);
      auto eps = static_cast<AtomId>(pool[k++]);
      AtomSet next = delta & st.atom_trace(eps);
      if (!(next == delta) || delta.empty()) {
        detail::cross_pair(st, plan, phi, eps);
        if (eps != kBottomAtom) used_set.insert(eps);
        delta = std::move(next);
      }
    } while (!delta.empty());
  }
  std::vector<AtomId> used;
  used_set.for_each([&](std::size_t e) { used.push_back(static_cast<AtomId>(e)); });
  detail::copy_atoms(st, plan, used);
  detail::finish(st, plan, dis, used);
  return plan;
}

// Sparse-crosses every positive relation, in a seeded random order. With
// reduce_growth > 0, reduce_master runs whenever the atom count exceeds
// reduce_growth times its size after the previous reduction (floor 64).
inline void enforce_positive_relations(AlgebraState& st, std::span<const Relation> rpos, double reduce_growth = 0) {
  auto order = positives(rpos);
  st.rng().shuffle(order);
  auto base = std::max<std::size_t>(st.atom_count(), 64);
  for (const auto& r : order) {
    sparse_crossing(st, r.lhs, r.rhs);
    if (reduce_growth > 0 && static_cast<double>(st.atom_count()) > reduce_growth * static_cast<double>(base)) {
      reduce_master(st);
      base = std::max<std::size_t>(st.atom_count(), 64);
    }
  }
}

}  // namespace aml
