#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "aml/algebra.hpp"
#include "aml/crossing.hpp"
#include "aml/reduction.hpp"
#include "aml/snapshot.hpp"
#include "aml/trace.hpp"

namespace aml {

struct PinningEntry {
  AtomFingerprint fingerprint;
  int origin_epoch = 0;
};

// Fingerprints of past atoms. Each entry stands for the negative relations
// not(c < T) for every c in the fingerprint, T being the merge of all other
// constants.
class PinningStructure {
 public:
  // False when the fingerprint is already present or was discarded earlier.
  bool add(const AtomFingerprint& fp, int epoch) {
    if (fp.empty() || index_.count(fp) || discarded_.count(fp)) return false;
    index_.insert(fp);
    entries_.push_back({fp, epoch});
    return true;
  }

  void discard(const AtomFingerprint& fp) {
    if (!index_.erase(fp)) return;
    discarded_.insert(fp);
    entries_.erase(std::remove_if(entries_.begin(), entries_.end(),
                                  [&](const PinningEntry& e) { return e.fingerprint == fp; }),
                   entries_.end());
  }

  void merge(const PinningStructure& delta) {
    for (const auto& e : delta.entries_) add(e.fingerprint, e.origin_epoch);
  }

  const std::vector<PinningEntry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool contains(const AtomFingerprint& fp) const { return index_.count(fp) > 0; }
  bool was_discarded(const AtomFingerprint& fp) const { return discarded_.count(fp) > 0; }

  std::vector<AtomFingerprint> fingerprints() const {
    std::vector<AtomFingerprint> out;
    for (const auto& e : entries_) out.push_back(e.fingerprint);
    return out;
  }

 private:
  std::vector<PinningEntry> entries_;
  std::unordered_set<AtomFingerprint, IndexSetHash> index_;
  std::unordered_set<AtomFingerprint, IndexSetHash> discarded_;
};

inline ConstantSet pinning_term_components(const AlgebraState& st, const AtomFingerprint& fp) {
  return ConstantSet::range(st.constant_count()) - fp;
}

// The pinning relations of one entry; defines its term. Empty when the
// fingerprint covers every constant.
inline std::vector<Relation> pinning_relations(AlgebraState& st, const AtomFingerprint& fp) {
  auto comp = pinning_term_components(st, fp);
  if (comp.empty()) return {};
  auto t = st.define_term(comp);
  std::vector<Relation> out;
  fp.for_each([&](std::size_t c) { out.push_back(Relation::neg(ElementRef::constant(static_cast<std::uint32_t>(c)), t)); });
  return out;
}

inline PinningStructure generate_pinning(const AlgebraState& st, int epoch) {
  PinningStructure delta;
  auto all = ConstantSet::range(st.constant_count());
  for (auto id : st.live_atoms()) {
    const auto& fp = st.fingerprint_ref(id);
    if (fp.empty() || fp == all) continue;
    delta.add(fp, epoch);
  }
  return delta;
}

struct PinningFilter {
  std::vector<Relation> kept;
  std::vector<AtomFingerprint> discarded;
};

// Starts a fresh dual generation holding the batch and the pinning
// relations, then drops every pinning entry with a relation that fails in M*.
inline PinningFilter filter_pinning(AlgebraState& st, std::span<const Relation> batch, PinningStructure& pinning) {
  st.reset_dual();
  std::vector<std::vector<Relation>> per_entry;
  std::vector<Relation> all(batch.begin(), batch.end());
  for (const auto& e : pinning.entries()) {
    per_entry.push_back(pinning_relations(st, e.fingerprint));
    all.insert(all.end(), per_entry.back().begin(), per_entry.back().end());
  }
  preprocess_duals(st, all);

  for (const auto& r : batch)
    if (!r.positive() && !reverted_negative_holds(st, r))
      throw Error(ErrorCode::InconsistentTrainingSet, "a negative relation of the batch is entailed by its positives");

  std::unordered_set<std::uint32_t> batch_terms;
  for (const auto& r : batch)
    for (auto x : {r.lhs, r.rhs})
      if (x.kind == ElementKind::Term) batch_terms.insert(x.index);

  PinningFilter out;
  std::vector<ElementRef> retired;
  auto entries = pinning.entries();
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& rels = per_entry[i];
    bool ok = true;
    for (const auto& r : rels) ok = ok && reverted_negative_holds(st, r);
    if (ok) {
      out.kept.insert(out.kept.end(), rels.begin(), rels.end());
      continue;
    }
    out.discarded.push_back(entries[i].fingerprint);
    pinning.discard(entries[i].fingerprint);
    if (!rels.empty() && !batch_terms.count(rels.front().rhs.index)) retired.push_back(rels.front().rhs);
  }
  st.retire_terms(retired);
  return out;
}

struct EpochConfig {
  std::vector<Relation> batch;
  std::optional<std::uint64_t> seed;
  int epoch = 1;
  int reduce_every = 1;
  std::size_t max_trace_iterations = 10000;
  std::size_t pinning_cap = 0;  // 0: enforce every holding pinning relation
  bool retire_batch_terms = true;
  double reduce_growth = 2.0;  // mid-crossing reduction trigger; 0 disables
};

struct EpochStats {
  std::size_t pinning_kept = 0;
  std::size_t pinning_discarded = 0;
  std::size_t pinning_enforced = 0;
  std::size_t dual_atoms = 0;
  EnforceStats enforce;
  std::size_t atoms_after_crossing = 0;
  std::size_t atoms_after_reduction = 0;
};

inline ModelSnapshot train_epoch(AlgebraState& st, const EpochConfig& cfg, PinningStructure& pinning,
                                 EpochStats* stats = nullptr) {
  if (cfg.seed) st.reseed(*cfg.seed);
  EpochStats local;
  auto filtered = filter_pinning(st, cfg.batch, pinning);
  local.pinning_kept = filtered.kept.size();
  local.pinning_discarded = filtered.discarded.size();

  // The filtering dual is cut down to one witness per batch negative.
  auto neg = negatives(cfg.batch);
  reduce_dual(st, neg);
  local.dual_atoms = st.dual_atom_count();

  std::vector<Relation> holding;
  for (const auto& r : filtered.kept)
    if (reverted_negative_holds(st, r)) holding.push_back(r);
  if (cfg.pinning_cap > 0 && holding.size() > cfg.pinning_cap) {
    st.rng().shuffle(holding);
    holding.resize(cfg.pinning_cap);
  }
  local.pinning_enforced = holding.size();

  std::vector<Relation> rels(cfg.batch);
  rels.insert(rels.end(), holding.begin(), holding.end());
  local.enforce = enforce_all(st, rels, cfg.max_trace_iterations);
  enforce_positive_relations(st, cfg.batch, cfg.reduce_growth);
  local.atoms_after_crossing = st.atom_count();
  if (cfg.reduce_every > 0 && cfg.epoch % cfg.reduce_every == 0) reduce_master(st);
  local.atoms_after_reduction = st.atom_count();

  pinning.merge(generate_pinning(st, cfg.epoch));
  auto snap = take_snapshot(st, cfg.epoch, pinning.fingerprints());

  if (cfg.retire_batch_terms) {
    std::unordered_set<std::uint32_t> keep;
    for (const auto& e : pinning.entries())
      if (auto t = st.find_term(pinning_term_components(st, e.fingerprint))) keep.insert(t->index);
    std::vector<ElementRef> retire;
    for (const auto& r : cfg.batch)
      for (auto x : {r.lhs, r.rhs})
        if (x.kind == ElementKind::Term && !keep.count(x.index)) retire.push_back(x);
    st.retire_terms(retire);
  }
  if (stats) *stats = local;
  return snap;
}

}  // namespace aml
