#include "hou/position.hpp"

#include <charconv>

#include "hou/errors.hpp"
#include "hou/normalize.hpp"

namespace hou {

std::string format_position(const Position& p) {
  if (p.empty()) return "e";
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(p[i]);
  }
  return out;
}

Position parse_position(std::string_view text) {
  if (text == "e" || text == "ε") return {};
  Position p;
  std::size_t start = 0;
  while (true) {
    std::size_t dot = text.find('.', start);
    std::string_view part = text.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start);
    std::uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (part.empty() || ec != std::errc() || ptr != part.data() + part.size() || v == 0)
      throw InvalidPosition("malformed position '" + std::string(text) + "'");
    p.push_back(v);
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return p;
}

namespace {

Term subterm_rec(const Term& t, const Position& p, std::size_t at) {
  if (at == p.size()) return t;
  std::uint32_t i = p[at];
  if (t.is_lam()) {
    if (i != 1) throw InvalidPosition("only position 1 exists below a binder");
    return subterm_rec(t.body(), p, at + 1);
  }
  std::size_t n = spine_length(t);
  if (i == 0 || i > n) throw InvalidPosition("argument index out of range at " + format_position(p));
  const Term* cur = &t;
  for (std::size_t k = n; k > i; --k) cur = &cur->fn();
  return subterm_rec(cur->arg(), p, at + 1);
}

Term replace_rec(const Term& t, const Position& p, std::size_t at, const Term& r) {
  if (at == p.size()) {
    if (r.type() != t.type()) throw TypeMismatch("replacement has a different type");
    return r;
  }
  std::uint32_t i = p[at];
  if (t.is_lam()) {
    if (i != 1) throw InvalidPosition("only position 1 exists below a binder");
    return Term::lam(t.binder_type(), replace_rec(t.body(), p, at + 1, r));
  }
  Spine s = spine(t);
  if (i == 0 || i > s.args.size()) throw InvalidPosition("argument index out of range at " + format_position(p));
  s.args[i - 1] = replace_rec(s.args[i - 1], p, at + 1, r);
  return Term::apply(s.head, s.args);
}

void positions_rec(const Term& t, Position& cur, std::vector<Position>& out) {
  out.push_back(cur);
  if (t.is_lam()) {
    cur.push_back(1);
    positions_rec(t.body(), cur, out);
    cur.pop_back();
    return;
  }
  Spine s = spine(t);
  for (std::size_t i = 0; i < s.args.size(); ++i) {
    cur.push_back(static_cast<std::uint32_t>(i + 1));
    positions_rec(s.args[i], cur, out);
    cur.pop_back();
  }
}

void context_rec(const Term& s, const Term& t, Position& cur, CommonContext& out) {
  if (s == t) return;
  if (s.is_lam() && t.is_lam()) {
    cur.push_back(1);
    context_rec(s.body(), t.body(), cur, out);
    cur.pop_back();
    return;
  }
  Spine a = spine(s);
  Spine b = spine(t);
  bool same_head = !a.head.is_lam() && a.head == b.head && a.args.size() == b.args.size();
  if (!same_head) {
    out.holes.push_back(cur);
    out.pairs.emplace_back(s, t);
    return;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    cur.push_back(static_cast<std::uint32_t>(i + 1));
    context_rec(a.args[i], b.args[i], cur, out);
    cur.pop_back();
  }
}

}  // namespace

Term subterm_at(const Term& t, const Position& p) {
  if (!is_beta_normal(t)) throw InvalidState("subterm_at requires a beta-normal term");
  return subterm_rec(t, p, 0);
}

Term replace_at(const Term& t, const Position& p, const Term& replacement) {
  return replace_rec(t, p, 0, replacement);
}

std::vector<Position> positions(const Term& t) {
  std::vector<Position> out;
  Position cur;
  positions_rec(t, cur, out);
  return out;
}

Term CommonContext::fill(std::span<const Term> fillers) const {
  if (fillers.size() != holes.size()) throw InvalidPosition("filler count differs from hole count");
  Term out = skeleton;
  for (std::size_t i = 0; i < holes.size(); ++i) out = replace_at(out, holes[i], fillers[i]);
  return out;
}

Term CommonContext::fill_left() const { return skeleton; }

Term CommonContext::fill_right() const {
  std::vector<Term> rhs;
  rhs.reserve(pairs.size());
  for (const auto& pr : pairs) rhs.push_back(pr.second);
  return fill(rhs);
}

CommonContext common_context(const Term& s, const Term& t) {
  if (s.type() != t.type()) throw TypeMismatch("common_context: operands have different types");
  CommonContext out;
  out.skeleton = s;
  Position cur;
  context_rec(s, t, cur, out);
  return out;
}

}  // namespace hou
