#include "hou/fingerprint.hpp"

#include <algorithm>
#include <stdexcept>

#include "hou/errors.hpp"
#include "hou/normalize.hpp"

namespace hou {

namespace {

FoTerm encode_rec(const Term& t) {
  Abstraction ab = strip_lams(t);
  Spine sp = spine(ab.body);
  FoTerm out;
  if (sp.head.is_free_var()) {
    out.kind = FoTerm::Kind::Var;
    out.var = sp.head.var_id();
    return out;
  }
  out.kind = FoTerm::Kind::Sym;
  out.sym = sp.head.is_const() ? FoSymbol{FoSymbol::Kind::Const, sp.head.const_id()}
                               : FoSymbol{FoSymbol::Kind::Db, sp.head.bound_index()};
  out.args.reserve(sp.args.size());
  for (const Term& a : sp.args) out.args.push_back(encode_rec(a));
  return out;
}

}  // namespace

FoTerm encode(const Term& t) { return encode_rec(eta_long_beta_normal(t)); }

Feature gfpf(const FoTerm& t, const Position& p) {
  const FoTerm* cur = &t;
  for (std::uint32_t i : p) {
    if (cur->kind == FoTerm::Kind::Var) return Feature::b();
    if (i == 0 || i > cur->args.size()) return Feature::n();
    cur = &cur->args[i - 1];
  }
  return cur->kind == FoTerm::Kind::Var ? Feature::a() : Feature::symbol(cur->sym);
}

Fingerprint fp_ho(const Term& t, std::span<const Position> positions) {
  FoTerm fo = encode(t);
  Fingerprint fp;
  fp.reserve(positions.size());
  for (const Position& p : positions) fp.push_back(gfpf(fo, p));
  return fp;
}

bool feature_compatible_unif(const Feature& a, const Feature& b) {
  using K = Feature::Kind;
  if (a.kind == K::B || b.kind == K::B) return true;
  if (a.kind == K::Sym && b.kind == K::Sym) return a.sym == b.sym;
  if (a.kind == K::N || b.kind == K::N) return a.kind == b.kind;
  return true;
}

bool feature_compatible_match(const Feature& query, const Feature& target) {
  using K = Feature::Kind;
  switch (query.kind) {
    case K::Sym: return target.kind == K::Sym && target.sym == query.sym;
    case K::A: return target.kind == K::Sym || target.kind == K::A;
    case K::B: return true;
    case K::N: return target.kind == K::N;
  }
  return false;
}

namespace {

template <class F>
bool all_components(const Fingerprint& a, const Fingerprint& b, F&& f) {
  if (a.size() != b.size()) throw std::invalid_argument("fingerprints of different lengths");
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!f(a[i], b[i])) return false;
  return true;
}

}  // namespace

bool compatible_unif(const Fingerprint& a, const Fingerprint& b) { return all_components(a, b, feature_compatible_unif); }

bool compatible_match(const Fingerprint& query, const Fingerprint& target) {
  return all_components(query, target, feature_compatible_match);
}

std::vector<Position> default_positions() { return {{}, {1}, {2}, {1, 1}, {1, 2}, {2, 1}}; }

std::vector<Position> parse_positions(std::string_view text) {
  std::vector<Position> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    std::string_view part = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
    while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
    out.push_back(parse_position(part));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string format_positions(std::span<const Position> positions) {
  std::string out;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (i) out += ",";
    out += format_position(positions[i]);
  }
  return out;
}

std::string format_feature(const Feature& f, const std::function<std::string(SymbolId)>& const_name) {
  switch (f.kind) {
    case Feature::Kind::A: return "A";
    case Feature::Kind::B: return "B";
    case Feature::Kind::N: return "N";
    case Feature::Kind::Sym:
      if (f.sym.kind == FoSymbol::Kind::Db) return "db" + std::to_string(f.sym.id);
      return const_name ? const_name(f.sym.id) : "c" + std::to_string(f.sym.id);
  }
  return "?";
}

std::string format_fingerprint(const Fingerprint& fp, const std::function<std::string(SymbolId)>& const_name) {
  std::string out = "(";
  for (std::size_t i = 0; i < fp.size(); ++i) {
    if (i) out += ", ";
    out += format_feature(fp[i], const_name);
  }
  return out + ")";
}

FingerprintIndex::FingerprintIndex(std::vector<Position> positions) : positions_(std::move(positions)) {
  nodes_.emplace_back();
}

void FingerprintIndex::insert(std::size_t id, const Fingerprint& fp) {
  if (fp.size() != positions_.size()) throw std::invalid_argument("fingerprint length does not match the index");
  std::size_t cur = 0;
  for (const Feature& f : fp) {
    auto it = nodes_[cur].children.find(f);
    if (it == nodes_[cur].children.end()) {
      nodes_.emplace_back();
      it = nodes_[cur].children.emplace(f, nodes_.size() - 1).first;
    }
    cur = it->second;
  }
  nodes_[cur].ids.push_back(id);
  ++count_;
}

template <class Compat>
std::vector<std::size_t> FingerprintIndex::retrieve(const Fingerprint& query, Compat&& compat) const {
  if (query.size() != positions_.size()) throw std::invalid_argument("fingerprint length does not match the index");
  std::vector<std::size_t> out;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, 0}};
  while (!stack.empty()) {
    auto [node, depth] = stack.back();
    stack.pop_back();
    if (depth == query.size()) {
      out.insert(out.end(), nodes_[node].ids.begin(), nodes_[node].ids.end());
      continue;
    }
    for (const auto& [f, child] : nodes_[node].children)
      if (compat(query[depth], f)) stack.emplace_back(child, depth + 1);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::size_t> FingerprintIndex::retrieve_unifiable(const Fingerprint& query) const {
  return retrieve(query, feature_compatible_unif);
}

std::vector<std::size_t> FingerprintIndex::retrieve_matching(const Fingerprint& query) const {
  return retrieve(query, feature_compatible_match);
}

}  // namespace hou
