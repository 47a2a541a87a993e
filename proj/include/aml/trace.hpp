#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "aml/algebra.hpp"

namespace aml {

using Trace = AtomSet;

struct ConsistencyReport {
  bool consistent = true;
  std::vector<Relation> failed_relations;
};

struct EnforceStats {
  std::size_t passes = 0;
  std::size_t atoms_added = 0;
  std::size_t dual_atoms_added = 0;
  std::size_t dual_edges_added = 0;
};

inline Trace trace(const AlgebraState& st, ElementRef x) { return st.trace(x); }

inline bool negative_trace_holds(const AlgebraState& st, const Relation& r) {
  return !st.trace(r.rhs).is_subset_of(st.trace(r.lhs));
}

inline bool positive_trace_holds(const AlgebraState& st, const Relation& r) {
  return st.trace(r.rhs).is_subset_of(st.trace(r.lhs));
}

// The reverted form of a negative relation in M*, read constant-wise: some
// component c of lhs outside rhs has GL^a([rhs]) not contained in GL^a([c]).
// This implies the plain reverted relation and is what atom insertion needs.
inline bool reverted_negative_holds(const AlgebraState& st, const Relation& r) {
  const auto& gb = st.node_atoms_dual(st.node_of(r.rhs));
  auto omega = st.components(r.lhs) - st.components(r.rhs);
  bool ok = false;
  omega.for_each([&](std::size_t c) { ok = ok || !gb.is_subset_of(st.constant_dual_atoms(c)); });
  return ok;
}

// Adds the positive relations to M* and one dual atom under the dual of every
// distinct negative right-hand side, then checks the reverted negatives.
inline ConsistencyReport preprocess_duals(AlgebraState& st, std::span<const Relation> rels) {
  for (const auto& r : rels)
    if (r.positive()) st.add_dual_positive_edge(r);
  IndexSet seeded;
  for (const auto& r : rels) {
    if (r.positive()) continue;
    auto n = st.node_of(r.rhs);
    if (seeded.contains(n)) continue;
    seeded.insert(n);
    st.add_dual_atom({ElementRef{ElementKind::DualConstant, n}});
  }
  ConsistencyReport rep;
  for (const auto& r : rels)
    if (!r.positive() && !reverted_negative_holds(st, r)) rep.failed_relations.push_back(r);
  rep.consistent = rep.failed_relations.empty();
  return rep;
}

// A component of lhs outside rhs whose dual lacks some atom of Tr(rhs).
inline std::optional<std::size_t> find_strongly_discriminant_constant(AlgebraState& st, const Relation& r) {
  auto omega = (st.components(r.lhs) - st.components(r.rhs)).to_vector();
  if (omega.empty()) return std::nullopt;
  auto u = st.trace(r.rhs);
  u.erase(kBottomDualAtom);
  auto order = u.to_vector();
  st.rng().shuffle(order);
  std::vector<std::size_t> eligible;
  for (auto z : order) {
    eligible.clear();
    for (auto c : omega)
      if (!st.constant_dual_atoms(c).contains(z)) eligible.push_back(c);
    if (!eligible.empty()) return st.rng().pick(eligible);
  }
  return std::nullopt;
}

// Makes Tr(rhs) not a subset of Tr(lhs) for a negative relation.
inline EnforceStats enforce_negative(AlgebraState& st, const Relation& r) {
  EnforceStats s;
  if (negative_trace_holds(st, r)) return s;
  for (;;) {
    if (auto c = find_strongly_discriminant_constant(st, r)) {
      st.add_atom_with_fingerprint(ConstantSet{*c});
      ++s.atoms_added;
      return s;
    }
    auto omega = (st.components(r.lhs) - st.components(r.rhs)).to_vector();
    if (omega.empty()) throw Error(ErrorCode::NoDiscriminantPossible, "lhs components all inside rhs");
    // Nodes below [rhs] that fail to reach some constant of omega.
    std::vector<char> reaches_all(st.node_count(), 1);
    for (auto c : omega) {
      std::vector<char> below(st.node_count(), 0);
      for (auto n : st.dual_lower_nodes(st.node_of(ElementRef::constant(static_cast<std::uint32_t>(c))))) below[n] = 1;
      for (std::size_t n = 0; n < below.size(); ++n) reaches_all[n] = reaches_all[n] && below[n];
    }
    std::vector<NodeId> candidates;
    for (auto h : st.dual_lower_nodes(st.node_of(r.rhs)))
      if (!reaches_all[h]) candidates.push_back(h);
    if (candidates.empty()) throw Error(ErrorCode::NoDiscriminantPossible, "no dual constant separates the relation");
    auto h = st.rng().pick(candidates);
    st.add_dual_atom({ElementRef{ElementKind::DualConstant, h}});
    ++s.dual_atoms_added;
  }
}

// Makes Tr(rhs) a subset of Tr(lhs) for a positive relation.
inline EnforceStats enforce_positive(AlgebraState& st, const Relation& r) {
  EnforceStats s;
  auto d_node = st.node_of(r.lhs);
  for (;;) {
    auto te = st.trace(r.rhs);
    auto missing = te - st.trace(r.lhs);
    if (missing.empty()) return s;
    auto z = static_cast<DualAtomId>(st.rng().pick(missing));
    std::vector<std::size_t> gamma;
    st.components(r.rhs).for_each([&](std::size_t c) {
      if (!st.constant_dual_atoms(c).contains(z)) gamma.push_back(c);
    });
    if (gamma.empty()) {
      st.edge_dual_atom(z, d_node);
      ++s.dual_edges_added;
    } else {
      st.add_atom_with_fingerprint(ConstantSet{st.rng().pick(gamma)});
      ++s.atoms_added;
    }
  }
}

inline void accumulate(EnforceStats& into, const EnforceStats& s) {
  into.atoms_added += s.atoms_added;
  into.dual_atoms_added += s.dual_atoms_added;
  into.dual_edges_added += s.dual_edges_added;
}

inline EnforceStats enforce_negative_constraints(AlgebraState& st, std::span<const Relation> rneg) {
  EnforceStats total;
  for (const auto& r : rneg)
    if (!r.positive()) accumulate(total, enforce_negative(st, r));
  return total;
}

inline EnforceStats enforce_positive_constraints(AlgebraState& st, std::span<const Relation> rpos) {
  EnforceStats total;
  for (const auto& r : rpos)
    if (r.positive()) accumulate(total, enforce_positive(st, r));
  return total;
}

// Alternates both families until a full pass makes no change.
inline EnforceStats enforce_all(AlgebraState& st, std::span<const Relation> rels, std::size_t max_passes = 10000) {
  auto neg = negatives(rels);
  auto pos = positives(rels);
  EnforceStats total;
  try {
    while (total.passes < max_passes) {
      ++total.passes;
      auto a = enforce_negative_constraints(st, neg);
      auto b = enforce_positive_constraints(st, pos);
      accumulate(total, a);
      accumulate(total, b);
      if (a.atoms_added + a.dual_atoms_added + a.dual_edges_added + b.atoms_added + b.dual_atoms_added +
              b.dual_edges_added ==
          0)
        return total;
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NoDiscriminantPossible) throw Error(ErrorCode::InconsistentInput, e.what());
    throw;
  }
  throw Error(ErrorCode::InconsistentInput, "trace constraints did not converge");
}

}  // namespace aml
