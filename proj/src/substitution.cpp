#include "hou/substitution.hpp"

#include <algorithm>

#include "hou/errors.hpp"
#include "hou/normalize.hpp"

namespace hou {

namespace {

Term apply_rec(const Term& t, const Substitution& s) {
  if ((t.var_bloom() & s.bloom()) == 0) return t;
  detail::spend_work();
  switch (t.kind()) {
    case TermKind::FreeVar: {
      const Term* img = s.lookup(t.var_id());
      return img ? *img : t;
    }
    case TermKind::App: {
      Term f = apply_rec(t.fn(), s);
      Term a = apply_rec(t.arg(), s);
      if (f.identity() == t.fn().identity() && a.identity() == t.arg().identity()) return t;
      return Term::app(std::move(f), std::move(a));
    }
    case TermKind::Lam: {
      Term b = apply_rec(t.body(), s);
      if (b.identity() == t.body().identity()) return t;
      return Term::lam(t.binder_type(), std::move(b));
    }
    default:
      return t;
  }
}

bool is_eta_identity(const Term& var, const Term& image) {
  if (image == var) return true;
  return eta_long_beta_normal(image) == eta_long_beta_normal(var);
}

}  // namespace

Substitution Substitution::single(const Term& var, const Term& image) {
  Substitution s;
  s.set(var, image);
  return s;
}

const Term* Substitution::lookup(VarId id) const {
  auto it = map_.find(id);
  return it == map_.end() ? nullptr : &it->second.image;
}

std::vector<Term> Substitution::domain() const {
  std::vector<Term> out;
  out.reserve(map_.size());
  for (const auto& [id, e] : map_) out.push_back(e.var);
  return out;
}

void Substitution::set(const Term& var, const Term& image) {
  if (!var.is_free_var()) throw InvalidState("substitution domain must consist of free variables");
  if (var.type() != image.type()) throw TypeMismatch("substitution image type differs from variable type");
  if (!image.closed()) throw InvalidState("substitution image has loose bound variables");
  map_[var.var_id()] = Entry{var, image};
  bloom_ |= var_bloom_bit(var.var_id());
}

Term Substitution::apply(const Term& t) const {
  if (map_.empty()) return t;
  return apply_rec(t, *this);
}

Substitution Substitution::restrict(std::span<const Term> vars) const {
  Substitution out;
  for (const Term& v : vars) {
    auto it = map_.find(v.var_id());
    if (it != map_.end()) out.set(it->second.var, it->second.image);
  }
  return out;
}

Substitution Substitution::normalized() const {
  Substitution out;
  for (const auto& [id, e] : map_) out.set(e.var, eta_long_beta_normal(e.image));
  return out;
}

Substitution Substitution::without_trivial() const {
  Substitution out;
  for (const auto& [id, e] : map_)
    if (!is_eta_identity(e.var, e.image)) out.set(e.var, e.image);
  return out;
}

bool Substitution::is_idempotent() const {
  for (const auto& [id, e] : map_) {
    if ((e.image.var_bloom() & bloom_) == 0) continue;
    for (const Term& v : free_vars(e.image)) {
      if (!map_.count(v.var_id())) continue;
      if (v.var_id() != id || !is_eta_identity(e.var, e.image)) return false;
    }
  }
  return true;
}

void Substitution::extend(const Term& var, const Term& image) {
  VarId id = var.var_id();
  if (map_.count(id)) throw IdempotenceViolation("variable is already mapped");
  if (occurs(id, image)) throw IdempotenceViolation("variable occurs in its own image");
  if (image.var_bloom() & bloom_) {
    for (const Term& v : free_vars(image))
      if (map_.count(v.var_id())) throw IdempotenceViolation("image mentions a mapped variable");
  }
  Substitution one = single(var, image);
  for (auto& [k, e] : map_)
    if (e.image.may_contain_var(id)) e.image = one.apply(e.image);
  set(var, image);
}

Substitution compose(const Substitution& rho, const Substitution& sigma) {
  Substitution out;
  for (const auto& [id, e] : sigma.entries()) out.set(e.var, rho.apply(e.image));
  for (const auto& [id, e] : rho.entries())
    if (!sigma.maps(id)) out.set(e.var, e.image);
  return out;
}

Term whnf_deref(const Term& t, const Substitution& sigma) {
  Term cur = hnf(t);
  while (true) {
    Abstraction ab = strip_lams(cur);
    const Term& h = head_of(ab.body);
    if (!h.is_free_var()) return cur;
    const Term* img = sigma.lookup(h.var_id());
    if (!img) return cur;
    Spine s = spine(ab.body);
    cur = hnf(Term::lams(ab.binders, Term::apply(*img, s.args)));
  }
}

}  // namespace hou
