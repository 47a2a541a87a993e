#pragma once

#include <gtest/gtest.h>

#include "oracles.hpp"

#define EXPECT_AML_ERROR(stmt, expected)                                   \
  do {                                                                     \
    try {                                                                  \
      stmt;                                                                \
      ADD_FAILURE() << "expected " #expected;                              \
    } catch (const ::aml::Error& e) {                                      \
      EXPECT_EQ(e.code(), ::aml::ErrorCode::expected) << e.what();         \
    }                                                                      \
  } while (0)

namespace aml::testing {

// Preprocess, trace enforcement, crossing and reduction on a relation set.
inline void embed(AlgebraState& st, std::span<const Relation> rels) {
  if (!preprocess_duals(st, rels).consistent) throw Error(ErrorCode::InconsistentInput, "inconsistent");
  enforce_all(st, rels);
  enforce_positive_relations(st, rels);
  reduce_master(st);
}

// Dual atoms below the dual of x, without 0*.
inline AtomSet learned_dual_atoms(const AlgebraState& st, ElementRef x) {
  auto s = st.node_atoms_dual(st.node_of(x));
  s.erase(kBottomDualAtom);
  return s;
}

inline AtomSet without_bottom(AtomSet s) {
  s.erase(kBottomAtom);
  return s;
}

// GL([phi]) from its definition: 0* plus the dual atoms of every constant
// containing phi.
inline AtomSet atom_trace_by_definition(const AlgebraState& st, AtomId id) {
  AtomSet out{kBottomDualAtom};
  auto fp = st.fingerprint(id);
  fp.for_each([&](std::size_t c) { out |= st.constant_dual_atoms(c); });
  return out;
}

inline AtomSet trace_by_definition(const AlgebraState& st, ElementRef x) {
  std::optional<AtomSet> out;
  st.atoms_of(x).for_each([&](std::size_t a) {
    auto t = atom_trace_by_definition(st, static_cast<AtomId>(a));
    if (!out) out = t;
    else *out &= t;
  });
  return *out;
}

}  // namespace aml::testing
