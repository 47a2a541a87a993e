#pragma once

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "aml/algebra.hpp"
#include "aml/error.hpp"
#include "aml/snapshot.hpp"

namespace aml {

// file: column index (a = 0); rank: row index (rank 1 = 0).
struct Square {
  int file = 0;
  int rank = 0;

  std::string name() const { return std::string(1, static_cast<char>('a' + file)) + std::to_string(rank + 1); }
  friend bool operator==(const Square&, const Square&) = default;
};

inline Square parse_square(const std::string& s) {
  if (s.size() < 2 || s[0] < 'a' || s[0] > 'z') throw Error(ErrorCode::InvalidBoardConfig, "bad square " + s);
  char* end = nullptr;
  long rank = std::strtol(s.c_str() + 1, &end, 10);
  if (*end != '\0' || rank < 1) throw Error(ErrorCode::InvalidBoardConfig, "bad square " + s);
  return {s[0] - 'a', static_cast<int>(rank - 1)};
}

inline bool attacks(Square a, Square b) {
  if (a == b) return false;
  return a.file == b.file || a.rank == b.rank || std::abs(a.file - b.file) == std::abs(a.rank - b.rank);
}

struct BoardSpec {
  int size = 8;
  std::vector<Square> blocked;
};

inline void validate_spec(const BoardSpec& spec) {
  if (spec.size < 1 || spec.size > 26) throw Error(ErrorCode::InvalidBoardConfig, "board size must be 1..26");
  for (std::size_t i = 0; i < spec.blocked.size(); ++i) {
    const auto& q = spec.blocked[i];
    if (q.file < 0 || q.rank < 0 || q.file >= spec.size || q.rank >= spec.size)
      throw Error(ErrorCode::InvalidBoardConfig, q.name() + " is off the board");
    for (std::size_t j = 0; j < i; ++j)
      if (spec.blocked[j] == q || attacks(spec.blocked[j], q))
        throw Error(ErrorCode::InvalidBoardConfig, spec.blocked[j].name() + " and " + q.name() + " conflict");
  }
}

// Constants of the board algebra: Q and E per square, R per rank, C per
// file, U and S.
struct QueensLayout {
  int size = 0;
  std::vector<std::uint32_t> queen;  // indexed rank * size + file
  std::vector<std::uint32_t> empty;
  std::vector<std::uint32_t> row;
  std::vector<std::uint32_t> col;
  std::uint32_t u = 0;
  std::uint32_t s = 0;

  std::uint32_t q(Square sq) const { return queen[static_cast<std::size_t>(sq.rank) * size + sq.file]; }
  std::uint32_t e(Square sq) const { return empty[static_cast<std::size_t>(sq.rank) * size + sq.file]; }

  static QueensLayout install(AlgebraState& st, int size) {
    QueensLayout l;
    l.size = size;
    for (int r = 0; r < size; ++r)
      for (int f = 0; f < size; ++f) l.queen.push_back(st.add_constant("Q" + Square{f, r}.name()).index);
    for (int r = 0; r < size; ++r)
      for (int f = 0; f < size; ++f) l.empty.push_back(st.add_constant("E" + Square{f, r}.name()).index);
    for (int r = 0; r < size; ++r) l.row.push_back(st.add_constant("R" + std::to_string(r + 1)).index);
    for (int f = 0; f < size; ++f) l.col.push_back(st.add_constant(std::string("C") + static_cast<char>('a' + f)).index);
    l.u = st.add_constant("U").index;
    l.s = st.add_constant("S").index;
    return l;
  }

  // Same layout recovered from a snapshot's constant table.
  static QueensLayout lookup(const std::vector<std::string>& names, int size) {
    auto find = [&](const std::string& n) -> std::uint32_t {
      for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == n) return static_cast<std::uint32_t>(i);
      throw Error(ErrorCode::UnknownConstant, n);
    };
    QueensLayout l;
    l.size = size;
    for (int r = 0; r < size; ++r)
      for (int f = 0; f < size; ++f) l.queen.push_back(find("Q" + Square{f, r}.name()));
    for (int r = 0; r < size; ++r)
      for (int f = 0; f < size; ++f) l.empty.push_back(find("E" + Square{f, r}.name()));
    for (int r = 0; r < size; ++r) l.row.push_back(find("R" + std::to_string(r + 1)));
    for (int f = 0; f < size; ++f) l.col.push_back(find(std::string("C") + static_cast<char>('a' + f)));
    l.u = find("U");
    l.s = find("S");
    return l;
  }
};

struct QueensEncoding {
  std::vector<Relation> rules;
  std::vector<Relation> game;

  std::vector<Relation> all() const {
    auto out = rules;
    out.insert(out.end(), game.begin(), game.end());
    return out;
  }
};

inline QueensEncoding encode_queens(AlgebraState& st, const QueensLayout& l, const BoardSpec& spec) {
  validate_spec(spec);
  if (spec.size != l.size) throw Error(ErrorCode::InvalidBoardConfig, "layout size differs from board size");
  const int m = spec.size;
  std::vector<Square> squares;
  for (int r = 0; r < m; ++r)
    for (int f = 0; f < m; ++f) squares.push_back({f, r});

  auto c = [](std::uint32_t i) { return ElementRef::constant(i); };
  auto term = [&](const ConstantSet& comp) {
    return comp.size() == 1 ? c(static_cast<std::uint32_t>(*comp.first())) : st.define_term(comp);
  };
  ConstantSet all_q, all_e, all_rc;
  for (auto sq : squares) {
    all_q.insert(l.q(sq));
    all_e.insert(l.e(sq));
  }
  for (int i = 0; i < m; ++i) {
    all_rc.insert(l.row[i]);
    all_rc.insert(l.col[i]);
  }

  QueensEncoding enc;
  auto& R = enc.rules;
  for (auto s : squares) {
    auto uq = term(ConstantSet{l.u, l.q(s)});
    for (auto t : squares)
      if (attacks(s, t)) R.push_back(Relation::pos(c(l.e(t)), uq));
  }
  for (auto s : squares) {
    ConstantSet same_file{l.u}, same_rank{l.u};
    for (auto t : squares) {
      if (t == s) continue;
      if (t.file == s.file) same_file.insert(l.e(t));
      if (t.rank == s.rank) same_rank.insert(l.e(t));
    }
    R.push_back(Relation::pos(c(l.q(s)), term(same_file)));
    R.push_back(Relation::pos(c(l.q(s)), term(same_rank)));
  }
  for (auto s : squares) R.push_back(Relation::pos(term(ConstantSet{l.row[s.rank], l.col[s.file]}), c(l.q(s))));
  for (int i = 0; i < m; ++i) {
    ConstantSet off_rank = all_e, off_file = all_e;
    for (auto t : squares) {
      if (t.rank != i) off_rank.insert(l.q(t));
      if (t.file != i) off_file.insert(l.q(t));
    }
    R.push_back(Relation::neg(c(l.row[i]), term(off_rank)));
    R.push_back(Relation::neg(c(l.col[i]), term(off_file)));
  }
  ConstantSet u_rc = all_rc;
  u_rc.insert(l.u);
  auto urc = term(u_rc);
  for (auto s : squares) {
    ConstantSet other_q = all_q | all_e;
    other_q.erase(l.q(s));
    ConstantSet other_e = all_q | all_e;
    other_e.erase(l.e(s));
    R.push_back(Relation::neg(c(l.q(s)), term(other_q)));
    R.push_back(Relation::neg(c(l.e(s)), term(other_e)));
    R.push_back(Relation::neg(c(l.q(s)), term(ConstantSet{l.u, l.e(s)})));
    R.push_back(Relation::neg(c(l.e(s)), term(ConstantSet{l.u, l.q(s)})));
    R.push_back(Relation::neg(c(l.q(s)), urc));
    R.push_back(Relation::neg(c(l.e(s)), urc));
  }

  auto& G = enc.game;
  if (!spec.blocked.empty()) {
    ConstantSet fixed;
    for (auto b : spec.blocked) fixed.insert(l.q(b));
    G.push_back(Relation::pos(term(fixed), c(l.s)));
  }
  G.push_back(Relation::pos(c(l.s), term(all_q | all_e)));
  auto us = term(ConstantSet{l.u, l.s});
  for (auto s : squares) G.push_back(Relation::neg(term(ConstantSet{l.e(s), l.q(s)}), us));
  for (int i = 0; i < m; ++i) G.push_back(Relation::pos(c(l.row[i]), c(l.s)));
  for (int i = 0; i < m; ++i) G.push_back(Relation::pos(c(l.col[i]), c(l.s)));
  return enc;
}

enum class Cell { Queen, Empty, Unknown, Conflict };

struct Board {
  int size = 0;
  std::vector<Cell> cells;  // rank * size + file

  Cell at(Square s) const { return cells[static_cast<std::size_t>(s.rank) * size + s.file]; }

  bool decided() const {
    for (auto c : cells)
      if (c == Cell::Unknown || c == Cell::Conflict) return false;
    return true;
  }

  std::vector<Square> queens() const {
    std::vector<Square> out;
    for (int r = 0; r < size; ++r)
      for (int f = 0; f < size; ++f)
        if (at({f, r}) == Cell::Queen) out.push_back({f, r});
    return out;
  }

  // Top rank first, files left to right; Q queen, . empty, ? unknown, ! both.
  std::string render() const {
    std::string out;
    for (int r = size - 1; r >= 0; --r) {
      for (int f = 0; f < size; ++f) {
        switch (at({f, r})) {
          case Cell::Queen: out += 'Q'; break;
          case Cell::Empty: out += '.'; break;
          case Cell::Unknown: out += '?'; break;
          case Cell::Conflict: out += '!'; break;
        }
      }
      out += '\n';
    }
    return out;
  }
};

namespace detail {

// x < y for constants of a snapshot: every atom of x is an atom of y.
inline bool snapshot_constant_leq(const ModelSnapshot& snap, std::uint32_t x, std::uint32_t y) {
  for (const auto& fp : snap.atoms)
    if (fp.contains(x) && !fp.contains(y)) return false;
  return true;
}

}  // namespace detail

inline Board read_board(const ModelSnapshot& snap, const BoardSpec& spec) {
  auto l = QueensLayout::lookup(snap.constants, spec.size);
  Board b{spec.size, {}};
  for (int r = 0; r < spec.size; ++r)
    for (int f = 0; f < spec.size; ++f) {
      bool q = detail::snapshot_constant_leq(snap, l.q({f, r}), l.s);
      bool e = detail::snapshot_constant_leq(snap, l.e({f, r}), l.s);
      b.cells.push_back(q && e ? Cell::Conflict : q ? Cell::Queen : e ? Cell::Empty : Cell::Unknown);
    }
  return b;
}

inline bool validate_board(const Board& b) {
  for (auto c : b.cells)
    if (c == Cell::Unknown) throw Error(ErrorCode::UndecidedSquares, "board has unknown squares");
  for (auto c : b.cells)
    if (c == Cell::Conflict) return false;
  auto qs = b.queens();
  if (static_cast<int>(qs.size()) != b.size) return false;
  for (std::size_t i = 0; i < qs.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (attacks(qs[i], qs[j])) return false;
  return true;
}

// Squares where a queen can be added to the current queens of the board.
inline std::vector<Square> legal_squares(const Board& b, const std::vector<Square>& extra_queens) {
  auto qs = b.queens();
  qs.insert(qs.end(), extra_queens.begin(), extra_queens.end());
  std::vector<Square> out;
  for (int r = 0; r < b.size; ++r)
    for (int f = 0; f < b.size; ++f) {
      Square s{f, r};
      bool ok = true;
      for (auto q : qs) ok = ok && !(q == s) && !attacks(q, s);
      if (ok) out.push_back(s);
    }
  return out;
}

}  // namespace aml
