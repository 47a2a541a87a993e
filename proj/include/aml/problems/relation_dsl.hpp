#pragma once

#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "aml/algebra.hpp"

namespace aml {

// Text form of relations, one per line:
//   pos <lhs> < <rhs>
//   neg <lhs> < <rhs>
// where each side is one constant name or several joined by '+'.
// Blank lines and lines starting with '#' are ignored.

inline std::string format_side(const AlgebraState& st, ElementRef side) {
  std::string out;
  st.components(side).for_each([&](std::size_t c) {
    if (!out.empty()) out += '+';
    out += st.constant_name(c);
  });
  return out;
}

inline std::string format_relations(const AlgebraState& st, const std::vector<Relation>& rels) {
  std::string out;
  for (const auto& r : rels) {
    out += r.positive() ? "pos " : "neg ";
    out += format_side(st, r.lhs) + " < " + format_side(st, r.rhs) + "\n";
  }
  return out;
}

// Parses relations; unknown constant names are registered when add_missing is set.
inline std::vector<Relation> parse_relations(AlgebraState& st, std::istream& in, bool add_missing = false) {
  auto side = [&](const std::string& text, int line) {
    ConstantSet comp;
    std::stringstream ss(text);
    std::string name;
    while (std::getline(ss, name, '+')) {
      if (name.empty()) throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": empty constant name");
      auto c = st.find_constant(name);
      if (!c) {
        if (!add_missing) throw Error(ErrorCode::UnknownConstant, name);
        c = st.add_constant(name);
      }
      comp.insert(c->index);
    }
    if (comp.size() == 1) return ElementRef::constant(static_cast<std::uint32_t>(*comp.first()));
    return st.define_term(comp);
  };
  std::vector<Relation> out;
  std::string text;
  int line = 0;
  while (std::getline(in, text)) {
    ++line;
    std::stringstream ss(text);
    std::string sign, lhs, lt, rhs, extra;
    if (!(ss >> sign) || sign[0] == '#') continue;
    if (!(ss >> lhs >> lt >> rhs) || lt != "<" || (ss >> extra) || (sign != "pos" && sign != "neg"))
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + text);
    auto l = side(lhs, line);
    auto r = side(rhs, line);
    out.push_back(sign == "pos" ? Relation::pos(l, r) : Relation::neg(l, r));
  }
  return out;
}

inline std::vector<Relation> parse_relations(AlgebraState& st, const std::string& text, bool add_missing = false) {
  std::istringstream in(text);
  return parse_relations(st, in, add_missing);
}

}  // namespace aml
