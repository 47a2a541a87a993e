#include "test_support.hpp"

using namespace aml;
using aml::oracle::Toy;

namespace {

std::vector<AtomSet> constant_traces(const AlgebraState& st) {
  std::vector<AtomSet> out;
  for (std::uint32_t c = 0; c < st.constant_count(); ++c) out.push_back(st.trace(ElementRef::constant(c)));
  return out;
}

// Toy embedded to the two-atom model {c1,c4,v}, {c1,c3,v}.
Toy two_atom_toy() {
  Toy toy(1);
  aml::testing::embed(toy.st, toy.rels);
  EXPECT_EQ(toy.st.atom_count(), 2u);
  return toy;
}

// A random consistent instance after trace enforcement and crossing, before
// any reduction.
std::optional<oracle::Instance> crossed_instance(std::uint64_t seed) {
  Rng rng(seed);
  auto inst = oracle::random_consistent_instance(rng, 4 + rng.below(9), 3 + rng.below(8), 0.5);
  if (!preprocess_duals(inst.st, inst.rels).consistent) return std::nullopt;
  try {
    enforce_all(inst.st, inst.rels, 500);
  } catch (const Error&) {
    return std::nullopt;
  }
  enforce_positive_relations(inst.st, inst.rels);
  return inst;
}

}  // namespace

TEST(ReduceMaster, RemovesSpuriousBeta) {
  auto toy = two_atom_toy();
  auto& st = toy.st;
  auto phis = st.live_atoms();
  auto beta = st.add_atom({toy.c(1)});
  EXPECT_EQ(st.atom_trace(beta.index), AtomSet{kBottomDualAtom});
  auto before = constant_traces(st);

  int calls = 0;
  while (st.atom_alive(beta.index) && calls < 10) {
    reduce_master(st);
    ++calls;
    EXPECT_EQ(constant_traces(st), before);
  }
  EXPECT_FALSE(st.atom_alive(beta.index));
  for (auto id : phis) EXPECT_TRUE(st.atom_alive(id));
  EXPECT_TRUE(oracle::all_hold(st, toy.rels));
}

// Over seeds, a single call usually removes beta: only the order that
// reaches c1 first and then draws beta keeps it.
TEST(ReduceMaster, BetaUsuallyGoesInOneCall) {
  int removed = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto toy = two_atom_toy();
    toy.st.reseed(seed);
    auto beta = toy.st.add_atom({toy.c(1)});
    reduce_master(toy.st);
    removed += !toy.st.atom_alive(beta.index);
  }
  EXPECT_GE(removed, 25);
}

TEST(ReduceMaster, ToyModelIsIrreducible) {
  auto toy = two_atom_toy();
  auto s = reduce_master(toy.st);
  EXPECT_EQ(s.atoms_before, 2u);
  EXPECT_EQ(s.atoms_after, 2u);
}

TEST(ReduceMaster, PreservesConstantTraces) {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 120; ++seed) {
    auto inst = crossed_instance(seed);
    if (!inst) continue;
    ++checked;
    auto& st = inst->st;
    auto before = constant_traces(st);
    auto s = reduce_master(st);
    EXPECT_EQ(constant_traces(st), before) << "seed " << seed;
    EXPECT_LE(s.atoms_after, s.atoms_before);
    EXPECT_TRUE(oracle::all_hold(st, inst->rels)) << "seed " << seed;
    EXPECT_FALSE(st.audit().has_value());
  }
  EXPECT_GE(checked, 100);
}

TEST(ReduceMaster, KeepsAtMostOneAtomPerDualAtomAndConstant) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    auto inst = crossed_instance(seed);
    if (!inst) continue;
    auto& st = inst->st;
    reduce_master(st);
    EXPECT_LE(st.atom_count(), st.constant_count() * st.dual_atom_count()) << "seed " << seed;
  }
}

TEST(ReduceDual, KeepsOneWitnessPerNegative) {
  for (std::uint64_t seed = 1; seed <= 80; ++seed) {
    auto inst = crossed_instance(seed);
    if (!inst) continue;
    auto& st = inst->st;
    auto neg = negatives(inst->rels);
    auto s = reduce_dual(st, neg);
    EXPECT_TRUE(s.kept.contains(kBottomDualAtom));
    EXPECT_LE(st.dual_atom_count(), neg.size() + 1);
    for (const auto& r : neg) EXPECT_TRUE(reverted_negative_holds(st, r)) << "seed " << seed;
  }
}

TEST(ReduceDual, NoNegativesLeavesBottomOnly) {
  Toy toy;
  ASSERT_TRUE(preprocess_duals(toy.st, toy.rels).consistent);
  ASSERT_GT(toy.st.dual_atom_count(), 1u);
  reduce_dual(toy.st, std::vector<Relation>{});
  EXPECT_EQ(toy.st.live_dual_atoms(), AtomSet{kBottomDualAtom});
}

TEST(EliminateRedundant, DuplicateKeepsLowerIndex) {
  Toy toy;
  auto a = toy.st.add_atom_with_fingerprint({0, 1});
  auto b = toy.st.add_atom_with_fingerprint({0, 1});
  eliminate_redundant_atoms(toy.st);
  EXPECT_TRUE(toy.st.atom_alive(a));
  EXPECT_FALSE(toy.st.atom_alive(b));
}

TEST(EliminateRedundant, SupersetCoveredAtEveryConstant) {
  Toy toy;
  auto a = toy.st.add_atom_with_fingerprint({0});
  auto b = toy.st.add_atom_with_fingerprint({1});
  auto ab = toy.st.add_atom_with_fingerprint({0, 1});
  auto abc = toy.st.add_atom_with_fingerprint({0, 1, 2});
  auto s = eliminate_redundant_atoms(toy.st);
  EXPECT_TRUE(toy.st.atom_alive(a));
  EXPECT_TRUE(toy.st.atom_alive(b));
  EXPECT_FALSE(toy.st.atom_alive(ab));
  // c3 has no smaller atom, so abc stays.
  EXPECT_TRUE(toy.st.atom_alive(abc));
  EXPECT_EQ(s.atoms_after, 3u);
}

TEST(EliminateRedundant, ExactAtomizationIsAlreadyIrredundant) {
  AlgebraState st;
  auto enc = ImageEncoder::install(st, 2, 3);
  auto v = st.add_constant("v");
  for (const auto& fp : exact_vertical_bar_atomization(3, 2, enc, v.index)) st.add_atom_with_fingerprint(fp);
  auto s = eliminate_redundant_atoms(st);
  EXPECT_EQ(s.atoms_before, 9u);
  EXPECT_EQ(s.atoms_after, 9u);
}

TEST(EliminateRedundant, OrderIsUnchanged) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    Rng rng(seed);
    AlgebraState st(seed);
    std::size_t n = 6;
    for (std::size_t i = 0; i < n; ++i) st.add_constant("c" + std::to_string(i));
    for (int i = 0; i < 14; ++i) st.add_atom_with_fingerprint(oracle::random_subset(rng, n, 1, 4));
    std::vector<ElementRef> els;
    for (int i = 0; i < 12; ++i) els.push_back(st.define_term(oracle::random_subset(rng, n, 1, 3)));
    std::vector<bool> before;
    for (auto x : els)
      for (auto y : els) before.push_back(st.leq(x, y));
    eliminate_redundant_atoms(st);
    std::size_t k = 0;
    for (auto x : els)
      for (auto y : els) EXPECT_EQ(st.leq(x, y), before[k++]) << "seed " << seed;
  }
}
