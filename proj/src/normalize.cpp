#include "hou/normalize.hpp"

#include <vector>

#include "hou/errors.hpp"

namespace hou {

namespace {

thread_local std::uint64_t g_audited = 0;
thread_local int g_audit_depth = 0;
thread_local int g_exempt_depth = 0;

void note_full_normalization() {
  if (g_audit_depth > 0 && g_exempt_depth == 0) ++g_audited;
}

// Reduces the head redex chain of a non-abstraction body.
Term reduce_spine(Term t) {
  while (true) {
    const Term& h = head_of(t);
    if (!h.is_lam() || !t.is_app()) return t;
    Spine s = spine(t);
    std::size_t used = 0;
    const Term* inner = &s.head;
    while (inner->is_lam() && used < s.args.size()) {
      inner = &inner->body();
      ++used;
    }
    Term cur = instantiate_many(*inner, std::span<const Term>(s.args).first(used));
    t = Term::apply(cur, std::span<const Term>(s.args).subspan(used));
    if (t.is_lam()) return t;
  }
}

Term elnf_rec(const Term& t) {
  detail::spend_work();
  Term h = hnf(t);
  Abstraction ab = strip_lams(h);
  Spine s = spine(ab.body);
  const Type& bt = ab.body.type();
  std::size_t k = bt.arity();
  std::vector<Term> args;
  args.reserve(s.args.size() + k);
  Term head = s.head;
  if (k > 0) {
    std::vector<Type> extra = bt.arg_types();
    head = shift(head, static_cast<std::int32_t>(k));
    for (const Term& a : s.args) args.push_back(elnf_rec(shift(a, static_cast<std::int32_t>(k))));
    for (std::size_t j = 0; j < k; ++j) {
      args.push_back(elnf_rec(Term::bound_var(static_cast<std::uint32_t>(k - 1 - j), extra[j])));
      ab.binders.push_back(extra[j]);
    }
  } else {
    for (const Term& a : s.args) args.push_back(elnf_rec(a));
  }
  return Term::lams(ab.binders, Term::apply(head, args));
}

bool is_elnf_rec(const Term& t) {
  Abstraction ab = strip_lams(t);
  if (!ab.body.type().is_base()) return false;
  Spine s = spine(ab.body);
  if (s.head.is_lam()) return false;
  for (const Term& a : s.args)
    if (!is_elnf_rec(a)) return false;
  return true;
}

}  // namespace

const Type& type_of(const Term& t) { return t.type(); }

Term hnf(const Term& t) {
  std::vector<Type> binders;
  Term cur = t;
  while (true) {
    if (cur.is_lam()) {
      binders.push_back(cur.binder_type());
      cur = cur.body();
      continue;
    }
    Term red = reduce_spine(cur);
    if (red.is_lam()) {
      cur = red;
      continue;
    }
    if (binders.empty() && red.identity() == t.identity()) return t;
    return Term::lams(binders, red);
  }
}

bool is_hnf(const Term& t) {
  Abstraction ab = strip_lams(t);
  return !head_of(ab.body).is_lam();
}

bool is_beta_normal(const Term& t) {
  switch (t.kind()) {
    case TermKind::Lam:
      return is_beta_normal(t.body());
    case TermKind::App: {
      if (head_of(t).is_lam()) return false;
      const Term* cur = &t;
      while (cur->is_app()) {
        if (!is_beta_normal(cur->arg())) return false;
        cur = &cur->fn();
      }
      return true;
    }
    default:
      return true;
  }
}

Term eta_long_beta_normal(const Term& t) {
  note_full_normalization();
  return elnf_rec(t);
}

bool is_eta_long_beta_normal(const Term& t) { return is_elnf_rec(t); }

bool alpha_beta_eta_equal(const Term& s, const Term& t) {
  if (s.type() != t.type()) throw TypeMismatch("alpha_beta_eta_equal: operands have different types");
  if (s == t) return true;
  return eta_long_beta_normal(s) == eta_long_beta_normal(t);
}

std::size_t size(const Term& t) { return t.size(); }

Term eta_expand_top(const Term& t) {
  std::size_t k = t.type().arity();
  if (k == 0) return t;
  std::vector<Type> tys = t.type().arg_types();
  std::vector<Term> args;
  args.reserve(k);
  for (std::size_t j = 0; j < k; ++j) args.push_back(Term::bound_var(static_cast<std::uint32_t>(k - 1 - j), tys[j]));
  return Term::lams(tys, Term::apply(shift(t, static_cast<std::int32_t>(k)), args));
}

std::uint64_t audited_normalizations() { return g_audited; }
void reset_audited_normalizations() { g_audited = 0; }

NormalizationExempt::NormalizationExempt() { ++g_exempt_depth; }
NormalizationExempt::~NormalizationExempt() { --g_exempt_depth; }
NormalizationAudit::NormalizationAudit() { ++g_audit_depth; }
NormalizationAudit::~NormalizationAudit() { --g_audit_depth; }

}  // namespace hou
