#include "test_support.hpp"

using namespace aml;
using aml::oracle::Toy;
using aml::testing::learned_dual_atoms;
using aml::testing::trace_by_definition;

namespace {

AtomSet zetas(const Toy& toy) {
  AtomSet z{kBottomDualAtom};
  for (auto t : {toy.t1n, toy.t2n, toy.t3n}) z |= learned_dual_atoms(toy.st, t);
  return z;
}

bool all_trace_constraints_hold(const AlgebraState& st, std::span<const Relation> rels) {
  for (const auto& r : rels) {
    auto ta = trace_by_definition(st, r.lhs), tb = trace_by_definition(st, r.rhs);
    if (r.positive() != tb.is_subset_of(ta)) return false;
  }
  return true;
}

}  // namespace

TEST(Trace, ToyBeforeAndAfterPhi) {
  Toy toy;
  ASSERT_TRUE(preprocess_duals(toy.st, toy.rels).consistent);
  EXPECT_EQ(toy.st.trace(toy.v), zetas(toy));
  EXPECT_EQ(zetas(toy).size(), 4u);
  toy.st.add_atom({toy.v});
  EXPECT_EQ(toy.st.trace(toy.v), AtomSet{kBottomDualAtom});
}

TEST(Trace, RejectsDualElement) {
  Toy toy;
  EXPECT_AML_ERROR(trace(toy.st, toy.st.dual_of(toy.v)), DualElementGiven);
}

TEST(Trace, Linearity) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    Rng rng(seed);
    auto inst = oracle::random_consistent_instance(rng, 7, 6, 0.5);
    aml::testing::embed(inst.st, inst.rels);
    for (int i = 0; i < 20; ++i) {
      auto a = inst.st.define_term(oracle::random_subset(rng, 7, 1, 3));
      auto b = inst.st.define_term(oracle::random_subset(rng, 7, 1, 3));
      auto ab = inst.st.define_term(inst.st.components(a) | inst.st.components(b));
      EXPECT_EQ(inst.st.trace(ab), inst.st.trace(a) & inst.st.trace(b));
      EXPECT_EQ(inst.st.trace(ab), trace_by_definition(inst.st, ab));
    }
  }
}

TEST(PreprocessDuals, ToyIsConsistentWithThreeZetas) {
  Toy toy;
  auto rep = preprocess_duals(toy.st, toy.rels);
  EXPECT_TRUE(rep.consistent);
  EXPECT_TRUE(rep.failed_relations.empty());
  EXPECT_EQ(toy.st.dual_atom_count(), 3u);
}

TEST(PreprocessDuals, DirectContradiction) {
  AlgebraState st;
  auto v = st.add_constant("v");
  st.add_constant("a");
  auto t = st.define_term(ConstantSet{1});
  std::vector<Relation> rels{Relation::pos(v, t), Relation::neg(v, t)};
  auto rep = preprocess_duals(st, rels);
  EXPECT_FALSE(rep.consistent);
  ASSERT_EQ(rep.failed_relations.size(), 1u);
  EXPECT_EQ(rep.failed_relations[0], rels[1]);
}

TEST(PreprocessDuals, TransitiveContradiction) {
  AlgebraState st;
  auto a = st.add_constant("a"), b = st.add_constant("b"), c = st.add_constant("c");
  auto tb = st.define_term(std::vector<ElementRef>{b}), tc = st.define_term(std::vector<ElementRef>{c});
  std::vector<Relation> rels{Relation::pos(a, tb), Relation::pos(b, tc), Relation::neg(a, tc)};
  EXPECT_FALSE(oracle::brute_consistent(3, oracle::lower(st, rels)));
  EXPECT_FALSE(preprocess_duals(st, rels).consistent);
}

// The dual check is sound. Inconsistencies that need meets of dual
// constants slip through it and surface as non-convergence of enforce_all.
TEST(PreprocessDuals, SoundAndBackedByEnforcement) {
  int flagged = 0, caught_later = 0;
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    Rng rng(seed);
    auto inst = oracle::random_instance(rng, 5, 6, 0.4);
    auto lowered = oracle::lower(inst.st, inst.rels);
    bool truth = oracle::consistent(lowered);
    ASSERT_EQ(truth, oracle::brute_consistent(5, lowered)) << "oracles disagree, seed " << seed;
    auto rep = preprocess_duals(inst.st, inst.rels);
    if (!rep.consistent) {
      EXPECT_FALSE(truth) << "seed " << seed;
      ++flagged;
      continue;
    }
    if (truth) continue;
    EXPECT_AML_ERROR(enforce_all(inst.st, inst.rels, 300), InconsistentInput);
    ++caught_later;
  }
  EXPECT_GT(flagged, 0);
  RecordProperty("caught_by_enforcement", caught_later);
}

TEST(EnforceNegative, ToyAddsAtomUnderV) {
  Toy toy;
  ASSERT_TRUE(preprocess_duals(toy.st, toy.rels).consistent);
  Relation r = toy.rels[2];
  EXPECT_FALSE(negative_trace_holds(toy.st, r));
  auto s = enforce_negative_constraints(toy.st, std::span<const Relation>(&r, 1));
  EXPECT_EQ(s.atoms_added, 1u);
  ASSERT_EQ(toy.st.atom_count(), 1u);
  EXPECT_EQ(toy.st.fingerprint(toy.st.live_atoms()[0]), (ConstantSet{toy.v.index}));
  EXPECT_EQ(toy.st.trace(toy.v), AtomSet{kBottomDualAtom});
  EXPECT_TRUE(negative_trace_holds(toy.st, r));
}

TEST(EnforceNegative, HoldingConstraintIsLeftAlone) {
  Toy toy;
  ASSERT_TRUE(preprocess_duals(toy.st, toy.rels).consistent);
  toy.st.add_atom({toy.v});
  auto before = toy.st.atom_count();
  auto s = enforce_negative_constraints(toy.st, toy.rels);
  EXPECT_EQ(s.atoms_added + s.dual_atoms_added, 0u);
  EXPECT_EQ(toy.st.atom_count(), before);
}

TEST(EnforcePositive, ToyFirstPositiveNeedsOneAtom) {
  Toy toy;
  ASSERT_TRUE(preprocess_duals(toy.st, toy.rels).consistent);
  toy.st.add_atom({toy.v});
  auto s = enforce_positive(toy.st, toy.rels[0]);
  EXPECT_EQ(s.atoms_added, 1u);
  EXPECT_EQ(toy.st.trace(toy.t1p), AtomSet{kBottomDualAtom});
  EXPECT_EQ(toy.st.trace(toy.t1p), toy.st.trace(toy.v));
}

TEST(EnforcePositive, ToySecondPositiveReachesBottomTrace) {
  Toy toy;
  ASSERT_TRUE(preprocess_duals(toy.st, toy.rels).consistent);
  toy.st.add_atom({toy.v});
  enforce_positive(toy.st, toy.rels[1]);
  EXPECT_EQ(toy.st.trace(toy.t2p), AtomSet{kBottomDualAtom});
}

TEST(EnforcePositive, HoldingConstraintIsLeftAlone) {
  Toy toy;
  ASSERT_TRUE(preprocess_duals(toy.st, toy.rels).consistent);
  auto s = enforce_positive(toy.st, toy.rels[0]);
  EXPECT_EQ(s.atoms_added + s.dual_edges_added, 0u);
}

TEST(EnforceAll, ToyConvergesQuickly) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Toy toy(seed);
    ASSERT_TRUE(preprocess_duals(toy.st, toy.rels).consistent);
    auto s = enforce_all(toy.st, toy.rels);
    EXPECT_LE(s.passes, 3u) << "seed " << seed;
    EXPECT_TRUE(all_trace_constraints_hold(toy.st, toy.rels));
  }
}

TEST(EnforceAll, EmptyIsNoOp) {
  Toy toy;
  auto s = enforce_all(toy.st, std::vector<Relation>{});
  EXPECT_EQ(s.passes, 1u);
  EXPECT_EQ(toy.st.atom_count(), 0u);
}

TEST(EnforceAll, RandomConsistentInstances) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    Rng rng(seed);
    auto inst = oracle::random_consistent_instance(rng, 4 + rng.below(6), 3 + rng.below(8), 0.5);
    if (!preprocess_duals(inst.st, inst.rels).consistent) continue;
    auto& st = inst.st;
    auto s = enforce_all(st, inst.rels);
    EXPECT_TRUE(all_trace_constraints_hold(st, inst.rels)) << "seed " << seed;
    EXPECT_FALSE(st.audit().has_value());
    EXPECT_LE(s.passes, 4 * (st.atom_count() + st.constant_count()) + 2);
  }
}

// Relations carried by the term structure survive enforcement. A relation
// that held only through the atoms present can break, and only through a
// fresh atom placed in a component of the left side outside the right side.
TEST(EnforceAll, KeepsStructuralPositiveRelations) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    Rng rng(seed);
    auto inst = oracle::random_consistent_instance(rng, 6, 6, 0.5);
    auto& st = inst.st;
    for (int i = 0; i < 4; ++i) st.add_atom_with_fingerprint(oracle::random_subset(rng, 6, 1, 3));
    std::vector<std::pair<ElementRef, ElementRef>> holding;
    for (int i = 0; i < 40; ++i) {
      auto a = st.define_term(oracle::random_subset(rng, 6, 1, 2));
      auto b = st.define_term(oracle::random_subset(rng, 6, 1, 4));
      if (st.leq(a, b)) holding.emplace_back(a, b);
    }
    auto before = st.atom_capacity();
    if (!preprocess_duals(st, inst.rels).consistent) continue;
    enforce_all(st, inst.rels);
    for (auto [a, b] : holding) {
      if (st.components(a).is_subset_of(st.components(b))) {
        EXPECT_TRUE(st.leq(a, b));
      }
      if (st.leq(a, b)) continue;
      bool explained = false;
      for (auto id : st.live_atoms())
        explained = explained || (id >= before && st.fingerprint(id).is_subset_of(st.components(a) - st.components(b)));
      EXPECT_TRUE(explained) << "seed " << seed;
    }
  }
}

TEST(TraceOrder, LeqReversesTraces) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    Rng rng(seed);
    auto inst = oracle::random_consistent_instance(rng, 6, 6, 0.5);
    aml::testing::embed(inst.st, inst.rels);
    auto& st = inst.st;
    std::vector<ElementRef> els;
    for (std::uint32_t c = 0; c < 6; ++c) els.push_back(ElementRef::constant(c));
    for (int i = 0; i < 10; ++i) els.push_back(st.define_term(oracle::random_subset(rng, 6, 1, 4)));
    for (auto a : els)
      for (auto b : els)
        if (st.leq(a, b)) {
          EXPECT_TRUE(st.trace(b).is_subset_of(st.trace(a)));
        }
  }
}
