#include "hou/term.hpp"

#include <algorithm>
#include <cassert>
#include <string>
#include <unordered_set>

#include "hou/errors.hpp"

namespace hou {

struct Term::Node {
  TermKind kind;
  VarSort sort = VarSort::Plain;
  std::uint32_t id = 0;  // var id, bound index or constant id
  Type type;
  Type binder;  // Lam only
  Term left;    // App: fn, Lam: body
  Term right;   // App: arg
  std::size_t hash = 0;
  std::size_t size = 1;
  std::uint32_t loose = 0;
  std::uint64_t bloom = 0;
};

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

}  // namespace

Term Term::free_var(VarId id, Type type, VarSort sort) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::FreeVar;
  n->id = id;
  n->sort = sort;
  n->hash = mix(mix(1, id), type.hash());
  n->bloom = var_bloom_bit(id);
  n->type = std::move(type);
  return Term(std::move(n));
}

Term Term::bound_var(std::uint32_t index, Type type) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::BoundVar;
  n->id = index;
  n->hash = mix(mix(2, index), type.hash());
  n->loose = index + 1;
  n->type = std::move(type);
  return Term(std::move(n));
}

Term Term::constant(SymbolId id, Type type) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::Const;
  n->id = id;
  n->hash = mix(mix(3, id), type.hash());
  n->type = std::move(type);
  return Term(std::move(n));
}

Term Term::app(Term fn, Term arg) {
  const Type& ft = fn.type();
  if (!ft.is_arrow()) throw IllTyped("application of a term of base type");
  if (ft.domain() != arg.type()) throw IllTyped("argument type does not match function domain");
  auto n = std::make_shared<Node>();
  n->kind = TermKind::App;
  n->type = ft.codomain();
  n->hash = mix(mix(4, fn.hash()), arg.hash());
  n->size = fn.size() + arg.size();
  n->loose = std::max(fn.loose_bound(), arg.loose_bound());
  n->bloom = fn.var_bloom() | arg.var_bloom();
  n->left = std::move(fn);
  n->right = std::move(arg);
  return Term(std::move(n));
}

Term Term::apply(Term head, std::span<const Term> args) {
  for (const Term& a : args) head = app(std::move(head), a);
  return head;
}

Term Term::lam(Type binder, Term body) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::Lam;
  n->type = Type::arrow(binder, body.type());
  n->hash = mix(mix(5, binder.hash()), body.hash());
  n->size = body.size() + 1;
  n->loose = body.loose_bound() > 0 ? body.loose_bound() - 1 : 0;
  n->bloom = body.var_bloom();
  n->binder = std::move(binder);
  n->left = std::move(body);
  return Term(std::move(n));
}

Term Term::lams(std::span<const Type> binders, Term body) {
  for (auto it = binders.rbegin(); it != binders.rend(); ++it) body = lam(*it, std::move(body));
  return body;
}

TermKind Term::kind() const { return node_->kind; }
const Type& Term::type() const { return node_->type; }
VarId Term::var_id() const { return node_->id; }
VarSort Term::sort() const { return node_->sort; }
std::uint32_t Term::bound_index() const { return node_->id; }
SymbolId Term::const_id() const { return node_->id; }
const Term& Term::fn() const { return node_->left; }
const Term& Term::arg() const { return node_->right; }
const Term& Term::body() const { return node_->left; }
const Type& Term::binder_type() const { return node_->binder; }
std::size_t Term::hash() const { return node_->hash; }
std::size_t Term::size() const { return node_->size; }
std::uint32_t Term::loose_bound() const { return node_->loose; }
std::uint64_t Term::var_bloom() const { return node_->bloom; }
bool Term::may_contain_var(VarId id) const { return (node_->bloom & var_bloom_bit(id)) != 0; }

bool operator==(const Term& a, const Term& b) {
  const Term::Node* x = a.node_.get();
  const Term::Node* y = b.node_.get();
  // Iterative on the left spine, recursive on arguments and bodies.
  while (true) {
    if (x == y) return true;
    if (!x || !y) return false;
    if (x->hash != y->hash || x->kind != y->kind || x->size != y->size) return false;
    switch (x->kind) {
      case TermKind::FreeVar:
      case TermKind::BoundVar:
      case TermKind::Const:
        return x->id == y->id && x->type == y->type;
      case TermKind::Lam:
        if (x->binder != y->binder) return false;
        x = x->left.node_.get();
        y = y->left.node_.get();
        break;
      case TermKind::App:
        if (!(x->right == y->right)) return false;
        x = x->left.node_.get();
        y = y->left.node_.get();
        break;
    }
  }
}

Spine spine(const Term& t) {
  Spine s;
  const Term* cur = &t;
  while (cur->is_app()) {
    s.args.push_back(cur->arg());
    cur = &cur->fn();
  }
  std::reverse(s.args.begin(), s.args.end());
  s.head = *cur;
  return s;
}

const Term& head_of(const Term& t) {
  const Term* cur = &t;
  while (cur->is_app()) cur = &cur->fn();
  return *cur;
}

std::size_t spine_length(const Term& t) {
  std::size_t n = 0;
  const Term* cur = &t;
  while (cur->is_app()) {
    ++n;
    cur = &cur->fn();
  }
  return n;
}

Abstraction strip_lams(const Term& t) {
  Abstraction a;
  const Term* cur = &t;
  while (cur->is_lam()) {
    a.binders.push_back(cur->binder_type());
    cur = &cur->body();
  }
  a.body = *cur;
  return a;
}

namespace {

Term shift_rec(const Term& t, std::int32_t delta, std::uint32_t cutoff) {
  if (t.loose_bound() <= cutoff) return t;
  detail::spend_work();
  switch (t.kind()) {
    case TermKind::BoundVar: {
      std::int64_t idx = static_cast<std::int64_t>(t.bound_index()) + delta;
      if (idx < 0) throw InvalidState("negative de Bruijn index after shift");
      return Term::bound_var(static_cast<std::uint32_t>(idx), t.type());
    }
    case TermKind::App:
      return Term::app(shift_rec(t.fn(), delta, cutoff), shift_rec(t.arg(), delta, cutoff));
    case TermKind::Lam:
      return Term::lam(t.binder_type(), shift_rec(t.body(), delta, cutoff + 1));
    default:
      return t;
  }
}

// Replaces index `depth` by value (shifted by depth) and lowers indices above it.
Term subst_rec(const Term& t, const Term& value, std::uint32_t depth) {
  if (t.loose_bound() <= depth) return t;
  detail::spend_work();
  switch (t.kind()) {
    case TermKind::BoundVar: {
      std::uint32_t i = t.bound_index();
      if (i == depth) return depth == 0 ? value : shift_rec(value, static_cast<std::int32_t>(depth), 0);
      return Term::bound_var(i - 1, t.type());
    }
    case TermKind::App:
      return Term::app(subst_rec(t.fn(), value, depth), subst_rec(t.arg(), value, depth));
    case TermKind::Lam:
      return Term::lam(t.binder_type(), subst_rec(t.body(), value, depth + 1));
    default:
      return t;
  }
}

Term subst_many_rec(const Term& t, std::span<const Term> values, std::uint32_t depth) {
  if (t.loose_bound() <= depth) return t;
  detail::spend_work();
  auto n = static_cast<std::uint32_t>(values.size());
  switch (t.kind()) {
    case TermKind::BoundVar: {
      std::uint32_t i = t.bound_index();
      if (i >= depth + n) return Term::bound_var(i - n, t.type());
      const Term& v = values[n - 1 - (i - depth)];
      return depth == 0 ? v : shift_rec(v, static_cast<std::int32_t>(depth), 0);
    }
    case TermKind::App:
      return Term::app(subst_many_rec(t.fn(), values, depth), subst_many_rec(t.arg(), values, depth));
    case TermKind::Lam:
      return Term::lam(t.binder_type(), subst_many_rec(t.body(), values, depth + 1));
    default:
      return t;
  }
}

}  // namespace

Term shift(const Term& t, std::int32_t delta, std::uint32_t cutoff) {
  if (delta == 0) return t;
  return shift_rec(t, delta, cutoff);
}

Term instantiate(const Term& body, const Term& value) { return subst_rec(body, value, 0); }

Term instantiate_many(const Term& body, std::span<const Term> values) {
  if (values.empty()) return body;
  if (values.size() == 1) return subst_rec(body, values[0], 0);
  return subst_many_rec(body, values, 0);
}

bool occurs(VarId id, const Term& t) {
  if (!t.may_contain_var(id)) return false;
  switch (t.kind()) {
    case TermKind::FreeVar:
      return t.var_id() == id;
    case TermKind::App:
      return occurs(id, t.fn()) || occurs(id, t.arg());
    case TermKind::Lam:
      return occurs(id, t.body());
    default:
      return false;
  }
}

namespace {

void collect_rec(const Term& t, std::unordered_set<VarId>& seen, std::vector<Term>& out) {
  if (t.ground()) return;
  switch (t.kind()) {
    case TermKind::FreeVar:
      if (seen.insert(t.var_id()).second) out.push_back(t);
      return;
    case TermKind::App:
      collect_rec(t.fn(), seen, out);
      collect_rec(t.arg(), seen, out);
      return;
    case TermKind::Lam:
      collect_rec(t.body(), seen, out);
      return;
    default:
      return;
  }
}

}  // namespace

void collect_free_vars(const Term& t, std::vector<Term>& out) {
  std::unordered_set<VarId> seen;
  for (const Term& v : out) seen.insert(v.var_id());
  collect_rec(t, seen, out);
}

std::vector<Term> free_vars(const Term& t) {
  std::vector<Term> out;
  collect_free_vars(t, out);
  return out;
}

VarId var_id_limit(const Term& t) {
  VarId limit = 0;
  for (const Term& v : free_vars(t)) limit = std::max(limit, v.var_id() + 1);
  return limit;
}

namespace detail {

thread_local std::int64_t g_work_fuel = -1;

void work_exhausted() {
  g_work_fuel = 0;
  throw WorkBudgetExceeded();
}

}  // namespace detail

WorkBudget::WorkBudget(std::uint64_t nodes) : saved_(detail::g_work_fuel) {
  auto n = static_cast<std::int64_t>(std::min<std::uint64_t>(nodes, INT64_MAX));
  granted_ = saved_ >= 0 ? std::min(saved_, n) : n;
  detail::g_work_fuel = granted_;
}

WorkBudget::~WorkBudget() {
  std::int64_t used = granted_ - std::max<std::int64_t>(detail::g_work_fuel, 0);
  detail::g_work_fuel = saved_ >= 0 ? std::max<std::int64_t>(saved_ - used, 0) : -1;
}

}  // namespace hou
