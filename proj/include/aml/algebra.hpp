#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "aml/error.hpp"
#include "aml/index_set.hpp"
#include "aml/rng.hpp"

namespace aml {

using ConstantSet = IndexSet;
using AtomSet = IndexSet;
using AtomId = std::uint32_t;
using DualAtomId = std::uint32_t;
using NodeId = std::uint32_t;

inline constexpr AtomId kBottomAtom = 0;
inline constexpr DualAtomId kBottomDualAtom = 0;

enum class ElementKind : std::uint8_t { Constant, Term, Atom, DualConstant, DualOfAtom, DualAtom };

struct ElementRef {
  ElementKind kind = ElementKind::Constant;
  std::uint32_t index = 0;

  static constexpr ElementRef constant(std::uint32_t i) { return {ElementKind::Constant, i}; }
  static constexpr ElementRef term(std::uint32_t i) { return {ElementKind::Term, i}; }
  static constexpr ElementRef atom(std::uint32_t i) { return {ElementKind::Atom, i}; }
  static constexpr ElementRef dual_atom(std::uint32_t i) { return {ElementKind::DualAtom, i}; }

  constexpr bool is_master() const {
    return kind == ElementKind::Constant || kind == ElementKind::Term || kind == ElementKind::Atom;
  }
  constexpr bool is_node() const { return kind == ElementKind::Constant || kind == ElementKind::Term; }

  friend constexpr auto operator<=>(const ElementRef&, const ElementRef&) = default;
};

enum class Sign : std::uint8_t { Positive, Negative };

// lhs and rhs are constants or terms of the same state.
struct Relation {
  Sign sign = Sign::Positive;
  ElementRef lhs;
  ElementRef rhs;

  static Relation pos(ElementRef l, ElementRef r) { return {Sign::Positive, l, r}; }
  static Relation neg(ElementRef l, ElementRef r) { return {Sign::Negative, l, r}; }
  bool positive() const { return sign == Sign::Positive; }

  friend auto operator<=>(const Relation&, const Relation&) = default;
};

inline std::vector<Relation> positives(std::span<const Relation> r) {
  std::vector<Relation> out;
  for (const auto& x : r)
    if (x.positive()) out.push_back(x);
  return out;
}

inline std::vector<Relation> negatives(std::span<const Relation> r) {
  std::vector<Relation> out;
  for (const auto& x : r)
    if (!x.positive()) out.push_back(x);
  return out;
}

// Master algebra M and dual algebra M*.
//
// Master elements are represented by atom-sets. Each learned atom carries a
// fingerprint, the set of constants it lies under; a term contains an atom iff
// the fingerprint meets one of its components. Atom 0 lies under every
// constant and is never deleted.
//
// Each constant and term has a dual node in M*. Edges x -> y in M* mean
// x <= y: a term points to every constant or term whose components are a
// subset of its own, and a positive relation d < e contributes [e] -> [d].
// The atom-set of a dual node is the union of the dual atoms attached at or
// below it. The trace of a master atom is {0*} plus the dual atom-sets of the
// constants in its fingerprint.
class AlgebraState {
 public:
  static constexpr std::uint64_t kDefaultSeed = 1;

  explicit AlgebraState(std::uint64_t seed = kDefaultSeed) : rng_(seed), seed_(seed) {
    atoms_.push_back(AtomRecord{{}, AtomSet{kBottomDualAtom}, true});
    dual_alive_.insert(kBottomDualAtom);
    dual_anchor_.emplace_back();
    tr0_.insert(kBottomDualAtom);
  }

  Rng& rng() { return rng_; }
  std::uint64_t seed() const { return seed_; }
  void reseed(std::uint64_t seed) {
    seed_ = seed;
    rng_.reseed(seed);
  }

  // ---- constants and terms ----

  ElementRef add_constant(std::string_view name) {
    std::string key(name);
    if (constant_index_.count(key)) throw Error(ErrorCode::DuplicateName, key);
    auto idx = static_cast<std::uint32_t>(constants_.size());
    ConstantSet self{idx};
    auto node = new_node(ElementRef::constant(idx), self);
    constants_.push_back(ConstantRecord{key, self, node, {}});
    constant_index_.emplace(std::move(key), idx);
    const_tr_.push_back(tr0_);
    const_dirty_.push_back(0);
    return ElementRef::constant(idx);
  }

  std::size_t constant_count() const { return constants_.size(); }
  const std::string& constant_name(std::size_t c) const { return constants_.at(c).name; }

  std::optional<ElementRef> find_constant(std::string_view name) const {
    auto it = constant_index_.find(std::string(name));
    if (it == constant_index_.end()) return std::nullopt;
    return ElementRef::constant(it->second);
  }

  ElementRef constant(std::string_view name) const {
    if (auto r = find_constant(name)) return *r;
    throw Error(ErrorCode::UnknownConstant, std::string(name));
  }

  ElementRef define_term(const ConstantSet& components) {
    if (components.empty()) throw Error(ErrorCode::EmptyTerm, "term without components");
    components.for_each([&](std::size_t c) {
      if (c >= constants_.size()) throw Error(ErrorCode::UnknownConstant, "constant index " + std::to_string(c));
    });
    if (auto it = term_index_.find(components); it != term_index_.end()) return ElementRef::term(it->second);

    auto idx = static_cast<std::uint32_t>(terms_.size());
    auto node = new_node(ElementRef::term(idx), components);
    terms_.push_back(TermRecord{components, node, true});
    term_index_.emplace(components, idx);

    for (NodeId y = 0; y < nodes_.size(); ++y) {
      if (y == node || !nodes_[y].alive) continue;
      const auto& cy = nodes_[y].comp;
      if (cy.is_subset_of(components)) link(node, y);
      if (components.is_subset_of(cy)) {
        link(y, node);
        gl_[node] |= gl_[y];
      }
    }
    return ElementRef::term(idx);
  }

  ElementRef define_term(std::span<const ElementRef> constants) {
    ConstantSet comp;
    for (auto r : constants) {
      if (r.kind == ElementKind::Constant) {
        if (r.index >= constants_.size()) throw Error(ErrorCode::UnknownConstant, "constant index " + std::to_string(r.index));
        comp.insert(r.index);
      } else if (r.kind == ElementKind::Term) {
        comp |= components(r);
      } else {
        throw Error(ErrorCode::UnknownConstant, "term components must be constants");
      }
    }
    return define_term(comp);
  }

  std::optional<ElementRef> find_term(const ConstantSet& components) const {
    auto it = term_index_.find(components);
    if (it == term_index_.end()) return std::nullopt;
    return ElementRef::term(it->second);
  }

  // Removes terms and their dual nodes. Dual atoms attached only to removed
  // nodes are deleted.
  void retire_terms(std::span<const ElementRef> terms) {
    bool any = false;
    for (auto t : terms) {
      if (t.kind != ElementKind::Term || t.index >= terms_.size() || !terms_[t.index].alive) continue;
      auto& rec = terms_[t.index];
      rec.alive = false;
      term_index_.erase(rec.comp);
      auto n = rec.node;
      auto& node = nodes_[n];
      node.alive = false;
      for (auto y : node.up) erase_one(nodes_[y].down, n);
      for (auto y : node.down) erase_one(nodes_[y].up, n);
      node.up.clear();
      node.down.clear();
      node.up.shrink_to_fit();
      node.down.shrink_to_fit();
      node.direct.for_each([&](std::size_t z) {
        auto& anchors = dual_anchor_[z];
        erase_one(anchors, n);
        if (anchors.empty() && z != kBottomDualAtom) dual_alive_.erase(z);
      });
      node.direct.release();
      gl_[n].release();
      for (auto it = positive_edges_.begin(); it != positive_edges_.end();) {
        if (it->first == n || it->second == n)
          it = positive_edges_.erase(it);
        else
          ++it;
      }
      any = true;
    }
    if (any) recompute_closure();
  }

  void retire_term(ElementRef t) { retire_terms(std::span<const ElementRef>(&t, 1)); }

  bool is_live(ElementRef r) const {
    switch (r.kind) {
      case ElementKind::Constant: return r.index < constants_.size();
      case ElementKind::Term: return r.index < terms_.size() && terms_[r.index].alive;
      case ElementKind::Atom: return r.index < atoms_.size() && atoms_[r.index].alive;
      case ElementKind::DualConstant: return r.index < nodes_.size() && nodes_[r.index].alive;
      case ElementKind::DualOfAtom: return r.index < atoms_.size() && atoms_[r.index].alive;
      case ElementKind::DualAtom: return dual_alive_.contains(r.index);
    }
    return false;
  }

  std::vector<ElementRef> live_terms() const {
    std::vector<ElementRef> out;
    for (std::uint32_t i = 0; i < terms_.size(); ++i)
      if (terms_[i].alive) out.push_back(ElementRef::term(i));
    return out;
  }

  // Component constants of a constant ({c}) or term.
  const ConstantSet& components(ElementRef r) const {
    if (r.kind == ElementKind::Constant && r.index < constants_.size()) return constants_[r.index].self;
    if (r.kind == ElementKind::Term && r.index < terms_.size() && terms_[r.index].alive) return terms_[r.index].comp;
    throw Error(ErrorCode::UnknownTarget, "not a live constant or term");
  }

  // ---- master atoms ----

  ElementRef add_atom(std::span<const ElementRef> targets) {
    ConstantSet fp;
    for (auto t : targets) {
      if (t.kind == ElementKind::Constant && t.index < constants_.size()) {
        fp.insert(t.index);
      } else if (t.kind == ElementKind::Atom && t.index != kBottomAtom && t.index < atoms_.size() &&
                 atoms_[t.index].alive) {
        fp |= atoms_[t.index].fingerprint;
      } else {
        throw Error(ErrorCode::UnknownTarget, "atom targets must be live constants or learned atoms");
      }
    }
    return ElementRef::atom(add_atom_with_fingerprint(fp));
  }

  ElementRef add_atom(std::initializer_list<ElementRef> targets) {
    return add_atom(std::span<const ElementRef>(targets.begin(), targets.size()));
  }

  AtomId add_atom_with_fingerprint(const ConstantSet& fp) {
    fp.for_each([&](std::size_t c) {
      if (c >= constants_.size()) throw Error(ErrorCode::UnknownTarget, "constant index " + std::to_string(c));
    });
    auto id = static_cast<AtomId>(atoms_.size());
    AtomSet tr{kBottomDualAtom};
    fp.for_each([&](std::size_t c) { tr |= gl_[constants_[c].node]; });
    fp.for_each([&](std::size_t c) {
      constants_[c].atoms.push_back(id);
      if (!const_dirty_[c]) const_tr_[c] &= tr;
    });
    atoms_.push_back(AtomRecord{fp, std::move(tr), true});
    live_atoms_.push_back(id);
    return id;
  }

  void delete_atoms(std::span<const ElementRef> atoms) {
    std::vector<AtomId> ids;
    for (auto a : atoms) {
      if (a.kind != ElementKind::Atom || a.index == kBottomAtom || a.index >= atoms_.size() || !atoms_[a.index].alive)
        throw Error(ErrorCode::UnknownAtom, "atom " + std::to_string(a.index));
      ids.push_back(a.index);
    }
    delete_atom_ids(ids);
  }

  void delete_atoms(std::initializer_list<ElementRef> atoms) {
    delete_atoms(std::span<const ElementRef>(atoms.begin(), atoms.size()));
  }

  void delete_atom_ids(std::span<const AtomId> ids) {
    if (ids.empty()) return;
    ConstantSet touched;
    for (auto id : ids) {
      if (id == kBottomAtom || id >= atoms_.size()) throw Error(ErrorCode::UnknownAtom, "atom " + std::to_string(id));
      auto& rec = atoms_[id];
      if (!rec.alive) continue;
      rec.alive = false;
      touched |= rec.fingerprint;
    }
    touched.for_each([&](std::size_t c) {
      auto& list = constants_[c].atoms;
      list.erase(std::remove_if(list.begin(), list.end(), [&](AtomId a) { return !atoms_[a].alive; }), list.end());
      const_dirty_[c] = 1;
    });
    live_atoms_.erase(
        std::remove_if(live_atoms_.begin(), live_atoms_.end(), [&](AtomId a) { return !atoms_[a].alive; }),
        live_atoms_.end());
    for (auto id : ids) {
      atoms_[id].fingerprint.release();
      atoms_[id].trace.release();
    }
  }

  void clear_atoms() {
    std::vector<AtomId> ids(live_atoms_.begin(), live_atoms_.end());
    delete_atom_ids(ids);
  }

  bool atom_alive(AtomId id) const { return id < atoms_.size() && atoms_[id].alive; }
  const std::vector<AtomId>& live_atoms() const { return live_atoms_; }
  std::size_t atom_count() const { return live_atoms_.size(); }
  std::size_t atom_capacity() const { return atoms_.size(); }
  const std::vector<AtomId>& atoms_at(std::size_t c) const { return constants_.at(c).atoms; }

  // Fingerprint of a learned atom. The bottom atom reports all constants.
  ConstantSet fingerprint(AtomId id) const {
    if (id == kBottomAtom) return ConstantSet::range(constants_.size());
    if (id >= atoms_.size() || !atoms_[id].alive) throw Error(ErrorCode::UnknownAtom, "atom " + std::to_string(id));
    return atoms_[id].fingerprint;
  }
  const ConstantSet& fingerprint_ref(AtomId id) const { return atoms_[id].fingerprint; }

  // Atoms of a master constant or term: the learned atoms whose fingerprint
  // meets its components, plus atom 0.
  AtomSet node_atoms(const ConstantSet& comp) const {
    AtomSet out{kBottomAtom};
    comp.for_each([&](std::size_t c) {
      for (auto a : constants_[c].atoms) out.insert(a);
    });
    return out;
  }

  // GL^a(x) in the algebra x belongs to.
  AtomSet atoms_of(ElementRef x) const {
    switch (x.kind) {
      case ElementKind::Constant:
      case ElementKind::Term: return node_atoms(components(x));
      case ElementKind::Atom:
        require_atom(x.index);
        return AtomSet{x.index};
      case ElementKind::DualConstant: return gl_.at(require_node(x.index));
      case ElementKind::DualOfAtom: return atom_trace(x.index);
      case ElementKind::DualAtom:
        if (!dual_alive_.contains(x.index)) throw Error(ErrorCode::UnknownTarget, "dual atom " + std::to_string(x.index));
        return AtomSet{x.index};
    }
    return {};
  }

  // Atoms of a that are not atoms of b (master constants/terms only).
  std::vector<AtomId> discriminant(ElementRef a, ElementRef b) const {
    const auto& ca = components(a);
    const auto& cb = components(b);
    std::vector<AtomId> out;
    ca.for_each([&](std::size_t c) {
      for (auto id : constants_[c].atoms)
        if (!atoms_[id].fingerprint.intersects(cb)) out.push_back(id);
    });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  bool leq(ElementRef a, ElementRef b) const {
    if (a.is_master() != b.is_master()) throw Error(ErrorCode::MixedAlgebras, "leq across M and M*");
    if (a.is_node() && b.is_node()) {
      const auto& cb = components(b);
      bool ok = true;
      components(a).for_each([&](std::size_t c) {
        if (!ok) return;
        for (auto id : constants_[c].atoms)
          if (!atoms_[id].fingerprint.intersects(cb)) {
            ok = false;
            return;
          }
      });
      return ok;
    }
    return atoms_of(a).is_subset_of(atoms_of(b));
  }

  // ---- dual algebra ----

  ElementRef dual_of(ElementRef x) const {
    switch (x.kind) {
      case ElementKind::Constant:
      case ElementKind::Term: return {ElementKind::DualConstant, node_of(x)};
      case ElementKind::Atom:
        require_atom(x.index);
        return {ElementKind::DualOfAtom, x.index};
      default: throw Error(ErrorCode::UnknownTarget, "dual_of expects a master element");
    }
  }

  NodeId node_of(ElementRef x) const {
    if (x.kind == ElementKind::Constant && x.index < constants_.size()) return constants_[x.index].node;
    if (x.kind == ElementKind::Term && x.index < terms_.size() && terms_[x.index].alive) return terms_[x.index].node;
    if (x.kind == ElementKind::DualConstant) return require_node(x.index);
    throw Error(ErrorCode::UnknownTarget, "not a live constant or term");
  }

  std::size_t node_count() const { return nodes_.size(); }
  bool node_alive(NodeId n) const { return n < nodes_.size() && nodes_[n].alive; }
  ElementRef node_master(NodeId n) const { return nodes_.at(n).master; }
  const ConstantSet& node_components(NodeId n) const { return nodes_.at(n).comp; }
  const std::vector<NodeId>& node_up(NodeId n) const { return nodes_.at(n).up; }
  const std::vector<NodeId>& node_down(NodeId n) const { return nodes_.at(n).down; }
  const AtomSet& node_direct(NodeId n) const { return nodes_.at(n).direct; }
  const AtomSet& node_atoms_dual(NodeId n) const { return gl_.at(n); }
  const AtomSet& constant_dual_atoms(std::size_t c) const { return gl_[constants_[c].node]; }
  const std::set<std::pair<NodeId, NodeId>>& positive_edges() const { return positive_edges_; }

  ElementRef add_dual_atom(std::span<const ElementRef> targets) {
    std::vector<NodeId> nodes;
    for (auto t : targets) {
      if (t.kind != ElementKind::DualConstant || !node_alive(t.index))
        throw Error(ErrorCode::UnknownTarget, "dual atom targets must be live dual constants");
      nodes.push_back(t.index);
    }
    auto z = static_cast<DualAtomId>(dual_anchor_.size());
    dual_anchor_.emplace_back();
    dual_alive_.insert(z);
    for (auto n : nodes) attach(z, n);
    return ElementRef::dual_atom(z);
  }

  ElementRef add_dual_atom(std::initializer_list<ElementRef> targets) {
    return add_dual_atom(std::span<const ElementRef>(targets.begin(), targets.size()));
  }

  // Edges an existing dual atom to one more dual constant.
  void edge_dual_atom(DualAtomId z, NodeId n) {
    if (!dual_alive_.contains(z) || z == kBottomDualAtom) throw Error(ErrorCode::UnknownTarget, "dual atom");
    if (!node_alive(n)) throw Error(ErrorCode::UnknownTarget, "dual constant");
    attach(z, n);
  }

  // Records d < e in M* as [e] -> [d].
  void add_dual_positive_edge(const Relation& rel) {
    if (!rel.positive()) throw Error(ErrorCode::UnknownTarget, "positive relation expected");
    auto from = node_of(rel.rhs);
    auto to = node_of(rel.lhs);
    if (from == to || !positive_edges_.emplace(from, to).second) return;
    link(from, to);
    const AtomSet src = gl_[from];
    ConstantSet changed;
    std::vector<NodeId> stack{to};
    while (!stack.empty()) {
      auto y = stack.back();
      stack.pop_back();
      if (src.is_subset_of(gl_[y])) continue;
      gl_[y] |= src;
      if (nodes_[y].master.kind == ElementKind::Constant) changed.insert(nodes_[y].master.index);
      for (auto u : nodes_[y].up) stack.push_back(u);
    }
    refresh_traces(changed);
  }

  bool dual_atom_alive(DualAtomId z) const { return dual_alive_.contains(z); }
  const AtomSet& live_dual_atoms() const { return dual_alive_; }
  std::size_t dual_atom_count() const { return dual_alive_.size() - 1; }
  std::uint64_t dual_generation() const { return generation_; }

  void delete_dual_atoms(const AtomSet& doomed_in) {
    AtomSet doomed = doomed_in;
    doomed.erase(kBottomDualAtom);
    doomed &= dual_alive_;
    if (doomed.empty()) return;
    dual_alive_ -= doomed;
    doomed.for_each([&](std::size_t z) {
      for (auto n : dual_anchor_[z]) nodes_[n].direct.erase(z);
      dual_anchor_[z].clear();
    });
    for (NodeId n = 0; n < nodes_.size(); ++n)
      if (nodes_[n].alive) gl_[n] -= doomed;
    for (auto id : live_atoms_) atoms_[id].trace -= doomed;
    tr0_ -= doomed;
    for (auto& t : const_tr_) t -= doomed;
  }

  // Starts a new dual generation: every dual atom except 0* and every
  // positive-relation edge is dropped, and dual atom indices restart at 1.
  void reset_dual() {
    for (auto [from, to] : positive_edges_) unlink(from, to);
    positive_edges_.clear();
    for (auto& n : nodes_) n.direct.release();
    dual_anchor_.assign(1, {});
    dual_alive_ = AtomSet{kBottomDualAtom};
    ++generation_;
    recompute_closure();
  }

  // Nodes n with n <= target in M* (target included).
  std::vector<NodeId> dual_lower_nodes(NodeId target) const {
    std::vector<NodeId> out;
    std::vector<char> seen(nodes_.size(), 0);
    std::vector<NodeId> stack{target};
    seen[target] = 1;
    while (!stack.empty()) {
      auto y = stack.back();
      stack.pop_back();
      out.push_back(y);
      for (auto d : nodes_[y].down)
        if (!seen[d]) {
          seen[d] = 1;
          stack.push_back(d);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  // True iff there is a directed path from -> ... -> to in M*.
  bool dual_reaches(NodeId from, NodeId to) const {
    if (from == to) return true;
    std::vector<char> seen(nodes_.size(), 0);
    std::vector<NodeId> stack{from};
    seen[from] = 1;
    while (!stack.empty()) {
      auto y = stack.back();
      stack.pop_back();
      for (auto u : nodes_[y].up) {
        if (u == to) return true;
        if (!seen[u]) {
          seen[u] = 1;
          stack.push_back(u);
        }
      }
    }
    return false;
  }

  // ---- traces ----

  const AtomSet& atom_trace(AtomId id) const {
    if (id == kBottomAtom) return tr0_;
    require_atom(id);
    return atoms_[id].trace;
  }

  const AtomSet& constant_trace(std::size_t c) const {
    if (const_dirty_[c]) {
      AtomSet t = tr0_;
      for (auto id : constants_[c].atoms) t &= atoms_[id].trace;
      const_tr_[c] = std::move(t);
      const_dirty_[c] = 0;
    }
    return const_tr_[c];
  }

  // Tr(x): intersection of the traces of x's atoms.
  AtomSet trace(ElementRef x) const {
    switch (x.kind) {
      case ElementKind::Atom: return atom_trace(x.index);
      case ElementKind::Constant:
      case ElementKind::Term: {
        const auto& comp = components(x);
        std::optional<AtomSet> t;
        comp.for_each([&](std::size_t c) {
          if (!t)
            t = constant_trace(c);
          else
            *t &= constant_trace(c);
        });
        return t ? *t : tr0_;
      }
      default: throw Error(ErrorCode::DualElementGiven, "trace of a dual element");
    }
  }

  // Recomputes every derived set from scratch and compares with the
  // maintained ones. Returns a description of the first mismatch.
  std::optional<std::string> audit() const {
    AlgebraState copy = *this;
    copy.recompute_closure();
    for (NodeId n = 0; n < nodes_.size(); ++n)
      if (nodes_[n].alive && !(copy.gl_[n] == gl_[n])) return "dual closure of node " + std::to_string(n);
    for (auto id : live_atoms_)
      if (!(copy.atoms_[id].trace == atoms_[id].trace)) return "trace of atom " + std::to_string(id);
    if (!(copy.tr0_ == tr0_)) return "trace of atom 0";
    for (std::size_t c = 0; c < constants_.size(); ++c) {
      AtomSet t = tr0_;
      for (auto id : constants_[c].atoms) t &= atoms_[id].trace;
      if (!(t == constant_trace(c))) return "cached trace of constant " + std::to_string(c);
      for (auto id : constants_[c].atoms)
        if (!atoms_[id].alive || !atoms_[id].fingerprint.contains(c))
          return "atom list of constant " + std::to_string(c);
    }
    for (auto id : live_atoms_) {
      bool ok = true;
      atoms_[id].fingerprint.for_each([&](std::size_t c) {
        const auto& l = constants_[c].atoms;
        ok = ok && std::binary_search(l.begin(), l.end(), id);
      });
      if (!ok) return "fingerprint of atom " + std::to_string(id);
    }
    for (NodeId x = 0; x < nodes_.size(); ++x) {
      if (!nodes_[x].alive) continue;
      for (NodeId y = 0; y < nodes_.size(); ++y)
        if (y != x && nodes_[y].alive && subset_edge(x, y) && !has_edge(x, y))
          return "missing subset edge " + std::to_string(x) + "->" + std::to_string(y);
    }
    return std::nullopt;
  }

 private:
  struct ConstantRecord {
    std::string name;
    ConstantSet self;
    NodeId node;
    std::vector<AtomId> atoms;  // ascending
  };
  struct TermRecord {
    ConstantSet comp;
    NodeId node;
    bool alive;
  };
  struct AtomRecord {
    ConstantSet fingerprint;
    AtomSet trace;
    bool alive;
  };
  struct DualNode {
    ElementRef master;
    ConstantSet comp;
    bool alive = true;
    AtomSet direct;
    std::vector<NodeId> up;
    std::vector<NodeId> down;
  };

  NodeId new_node(ElementRef master, const ConstantSet& comp) {
    auto n = static_cast<NodeId>(nodes_.size());
    nodes_.push_back(DualNode{master, comp, true, {}, {}, {}});
    gl_.push_back(AtomSet{kBottomDualAtom});
    return n;
  }

  bool subset_edge(NodeId x, NodeId y) const { return nodes_[y].comp.is_subset_of(nodes_[x].comp); }
  bool has_edge(NodeId x, NodeId y) const {
    const auto& u = nodes_[x].up;
    return std::find(u.begin(), u.end(), y) != u.end();
  }

  void link(NodeId x, NodeId y) {
    if (has_edge(x, y)) return;
    nodes_[x].up.push_back(y);
    nodes_[y].down.push_back(x);
  }

  void unlink(NodeId x, NodeId y) {
    if (subset_edge(x, y)) return;
    erase_one(nodes_[x].up, y);
    erase_one(nodes_[y].down, x);
  }

  static void erase_one(std::vector<NodeId>& v, NodeId n) {
    auto it = std::find(v.begin(), v.end(), n);
    if (it != v.end()) v.erase(it);
  }

  NodeId require_node(std::uint32_t n) const {
    if (!node_alive(n)) throw Error(ErrorCode::UnknownTarget, "dual constant " + std::to_string(n));
    return n;
  }

  void require_atom(AtomId id) const {
    if (id >= atoms_.size() || !atoms_[id].alive) throw Error(ErrorCode::UnknownAtom, "atom " + std::to_string(id));
  }

  void attach(DualAtomId z, NodeId n) {
    if (nodes_[n].direct.contains(z)) return;
    nodes_[n].direct.insert(z);
    dual_anchor_[z].push_back(n);
    ConstantSet changed;
    std::vector<NodeId> stack{n};
    while (!stack.empty()) {
      auto y = stack.back();
      stack.pop_back();
      if (gl_[y].contains(z)) continue;
      gl_[y].insert(z);
      if (nodes_[y].master.kind == ElementKind::Constant) changed.insert(nodes_[y].master.index);
      for (auto u : nodes_[y].up) stack.push_back(u);
    }
    if (changed.empty()) return;
    tr0_.insert(z);
    ConstantSet dirty;
    changed.for_each([&](std::size_t c) {
      for (auto id : constants_[c].atoms) {
        auto& rec = atoms_[id];
        if (rec.trace.contains(z)) continue;
        rec.trace.insert(z);
        dirty |= rec.fingerprint;
      }
    });
    for (std::size_t c = 0; c < constants_.size(); ++c)
      if (constants_[c].atoms.empty() || dirty.contains(c)) const_dirty_[c] = 1;
  }

  // Rebuilds traces of atoms lying under constants whose dual atom-set grew.
  void refresh_traces(const ConstantSet& changed) {
    if (changed.empty()) return;
    changed.for_each([&](std::size_t c) { tr0_ |= gl_[constants_[c].node]; });
    std::vector<AtomId> ids;
    changed.for_each([&](std::size_t c) {
      for (auto id : constants_[c].atoms) ids.push_back(id);
    });
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    for (auto id : ids) {
      auto& rec = atoms_[id];
      AtomSet t{kBottomDualAtom};
      rec.fingerprint.for_each([&](std::size_t c) { t |= gl_[constants_[c].node]; });
      rec.trace = std::move(t);
    }
    std::fill(const_dirty_.begin(), const_dirty_.end(), 1);
  }

  void recompute_closure() {
    for (NodeId n = 0; n < nodes_.size(); ++n)
      if (nodes_[n].alive) gl_[n] = AtomSet{kBottomDualAtom};
    std::vector<std::uint32_t> stamp(nodes_.size(), 0);
    std::uint32_t round = 0;
    for (NodeId x = 0; x < nodes_.size(); ++x) {
      if (!nodes_[x].alive || nodes_[x].direct.empty()) continue;
      ++round;
      const auto& d = nodes_[x].direct;
      std::vector<NodeId> stack{x};
      stamp[x] = round;
      while (!stack.empty()) {
        auto y = stack.back();
        stack.pop_back();
        gl_[y] |= d;
        for (auto u : nodes_[y].up)
          if (stamp[u] != round) {
            stamp[u] = round;
            stack.push_back(u);
          }
      }
    }
    tr0_ = AtomSet{kBottomDualAtom};
    for (const auto& c : constants_) tr0_ |= gl_[c.node];
    for (auto id : live_atoms_) {
      auto& rec = atoms_[id];
      AtomSet t{kBottomDualAtom};
      rec.fingerprint.for_each([&](std::size_t c) { t |= gl_[constants_[c].node]; });
      rec.trace = std::move(t);
    }
    std::fill(const_dirty_.begin(), const_dirty_.end(), 1);
  }

  std::vector<ConstantRecord> constants_;
  std::unordered_map<std::string, std::uint32_t> constant_index_;
  std::vector<TermRecord> terms_;
  std::unordered_map<ConstantSet, std::uint32_t, IndexSetHash> term_index_;
  std::vector<AtomRecord> atoms_;
  std::vector<AtomId> live_atoms_;
  std::vector<DualNode> nodes_;
  std::vector<AtomSet> gl_;
  std::set<std::pair<NodeId, NodeId>> positive_edges_;
  std::vector<std::vector<NodeId>> dual_anchor_;
  AtomSet dual_alive_;
  AtomSet tr0_;
  mutable std::vector<AtomSet> const_tr_;
  mutable std::vector<char> const_dirty_;
  Rng rng_;
  std::uint64_t seed_;
  std::uint64_t generation_ = 0;
};

}  // namespace aml
