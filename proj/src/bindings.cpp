#include "hou/bindings.hpp"

#include <algorithm>
#include <set>

#include "hou/errors.hpp"

namespace hou {

namespace {

// x_j (1-based) among n outer binders, seen from `inner` further binders.
Term outer_bvar(const std::vector<Type>& xs, std::size_t j, std::size_t inner = 0) {
  return Term::bound_var(static_cast<std::uint32_t>(inner + xs.size() - j), xs[j - 1]);
}

std::vector<Term> outer_bvars(const std::vector<Type>& xs, std::size_t inner = 0) {
  std::vector<Term> out;
  out.reserve(xs.size());
  for (std::size_t j = 1; j <= xs.size(); ++j) out.push_back(outer_bvar(xs, j, inner));
  return out;
}

// Fresh F_j : xs -> gamma_j applied to the bound variables xs.
Term fresh_applied(FreshSupply& supply, const std::vector<Type>& xs, const Type& gamma, std::vector<Term>& fresh,
                   std::size_t inner = 0, std::span<const Type> ys = {}) {
  std::vector<Type> dom = xs;
  dom.insert(dom.end(), ys.begin(), ys.end());
  Term v = supply.fresh(Type::arrows(dom, gamma));
  fresh.push_back(v);
  std::vector<Term> args = outer_bvars(xs, inner);
  for (std::size_t l = 1; l <= ys.size(); ++l)
    args.push_back(Term::bound_var(static_cast<std::uint32_t>(ys.size() - l), ys[l - 1]));
  return Term::apply(v, args);
}

Binding make_binding(BindingKind kind, const Term& F, const Term& image, std::vector<Term> fresh) {
  Binding b{kind, Substitution::single(F, image), std::move(fresh)};
  return b;
}

}  // namespace

const char* binding_kind_name(BindingKind k) {
  switch (k) {
    case BindingKind::JPProjection: return "jp-projection";
    case BindingKind::HuetProjection: return "huet-projection";
    case BindingKind::Imitation: return "imitation";
    case BindingKind::Elimination: return "elimination";
    case BindingKind::Identification: return "identification";
    case BindingKind::Iteration: return "iteration";
  }
  return "?";
}

std::optional<Binding> jp_projection(const Term& F, std::size_t i) {
  std::vector<Type> xs = F.type().arg_types();
  const Type& beta = F.type().result();
  if (xs.empty() || i == 0 || i > xs.size() || xs[i - 1] != beta) return std::nullopt;
  Binding b = make_binding(BindingKind::JPProjection, F, Term::lams(xs, outer_bvar(xs, i)), {});
  return b;
}

std::vector<Binding> jp_projections(const Term& F) {
  std::vector<Binding> out;
  for (std::size_t i = 1; i <= F.type().arity(); ++i)
    if (auto b = jp_projection(F, i)) out.push_back(std::move(*b));
  return out;
}

std::optional<Binding> huet_projection(const Term& F, std::size_t i, FreshSupply& supply) {
  std::vector<Type> xs = F.type().arg_types();
  const Type& beta = F.type().result();
  if (xs.empty() || i == 0 || i > xs.size() || xs[i - 1].result() != beta) return std::nullopt;
  std::vector<Type> gammas = xs[i - 1].arg_types();
  std::vector<Term> fresh;
  std::vector<Term> args;
  for (const Type& g : gammas) args.push_back(fresh_applied(supply, xs, g, fresh));
  Term body = Term::apply(outer_bvar(xs, i), args);
  Binding b = make_binding(BindingKind::HuetProjection, F, Term::lams(xs, body), std::move(fresh));
  b.functional = !gammas.empty();
  return b;
}

std::optional<Binding> imitation(const Term& F, const Term& g, FreshSupply& supply) {
  std::vector<Type> xs = F.type().arg_types();
  if (g.type().result() != F.type().result()) return std::nullopt;
  std::vector<Term> fresh;
  std::vector<Term> args;
  for (const Type& gamma : g.type().arg_types()) args.push_back(fresh_applied(supply, xs, gamma, fresh));
  Term head = shift(g, static_cast<std::int32_t>(xs.size()));
  return make_binding(BindingKind::Imitation, F, Term::lams(xs, Term::apply(head, args)), std::move(fresh));
}

Binding elimination(const Term& F, std::span<const std::uint32_t> keep, FreshSupply& supply) {
  std::vector<Type> xs = F.type().arg_types();
  if (xs.empty()) throw InvalidState("elimination requires a functional variable");
  if (keep.size() >= xs.size()) throw InvalidState("elimination must remove at least one argument");
  for (std::size_t k = 0; k < keep.size(); ++k) {
    if (keep[k] == 0 || keep[k] > xs.size() || (k > 0 && keep[k] <= keep[k - 1]))
      throw InvalidState("elimination indices must be strictly increasing within range");
  }
  std::vector<Type> dom;
  std::vector<Term> args;
  for (std::uint32_t j : keep) {
    dom.push_back(xs[j - 1]);
    args.push_back(outer_bvar(xs, j));
  }
  Term G = supply.fresh(Type::arrows(dom, F.type().result()), VarSort::Elimination);
  Binding b = make_binding(BindingKind::Elimination, F, Term::lams(xs, Term::apply(G, args)), {G});
  b.removed = static_cast<std::uint32_t>(xs.size() - keep.size());
  return b;
}

Binding identification(const Term& F, const Term& G, FreshSupply& supply) {
  if (F.var_id() == G.var_id()) throw InvalidState("identification requires distinct variables");
  const Type& beta = F.type().result();
  if (G.type().result() != beta) throw InvalidState("identification requires equal result types");
  std::vector<Type> xs = F.type().arg_types();
  std::vector<Type> ys = G.type().arg_types();
  std::vector<Type> hdom = xs;
  hdom.insert(hdom.end(), ys.begin(), ys.end());
  Term H = supply.fresh(Type::arrows(hdom, beta), VarSort::Identification);
  std::vector<Term> fresh{H};

  std::vector<Term> fargs = outer_bvars(xs);
  for (const Type& g : ys) fargs.push_back(fresh_applied(supply, xs, g, fresh));
  std::vector<Term> gargs;
  for (const Type& a : xs) gargs.push_back(fresh_applied(supply, ys, a, fresh));
  for (const Term& y : outer_bvars(ys)) gargs.push_back(y);

  Binding b{BindingKind::Identification, Substitution{}, std::move(fresh)};
  b.subst.set(F, Term::lams(xs, Term::apply(H, fargs)));
  b.subst.set(G, Term::lams(ys, Term::apply(H, gargs)));
  return b;
}

std::optional<Binding> iteration(const Term& F, std::size_t i, std::span<const Type> ytypes, FreshSupply& supply) {
  std::vector<Type> xs = F.type().arg_types();
  if (xs.empty() || i == 0 || i > xs.size()) return std::nullopt;
  const Type& alpha = xs[i - 1];
  std::vector<Type> gammas = alpha.arg_types();
  std::size_t k = ytypes.size();
  std::vector<Term> fresh;
  Type inner_type = Type::arrows(ytypes, alpha.result());
  std::vector<Type> hdom = xs;
  hdom.push_back(inner_type);
  Term H = supply.fresh(Type::arrows(hdom, F.type().result()));
  fresh.push_back(H);
  std::vector<Term> gargs;
  for (const Type& g : gammas) gargs.push_back(fresh_applied(supply, xs, g, fresh, k, ytypes));
  Term inner = Term::lams(ytypes, Term::apply(outer_bvar(xs, i, k), gargs));
  std::vector<Term> hargs = outer_bvars(xs);
  hargs.push_back(inner);
  return make_binding(BindingKind::Iteration, F, Term::lams(xs, Term::apply(H, hargs)), std::move(fresh));
}

Binding BindingSpec::materialize(FreshSupply& supply) const {
  switch (kind) {
    case BindingKind::JPProjection:
      return *jp_projection(target, index);
    case BindingKind::HuetProjection:
      return *huet_projection(target, index, supply);
    case BindingKind::Imitation:
      return *imitation(target, other, supply);
    case BindingKind::Elimination:
      return elimination(target, keep, supply);
    case BindingKind::Identification:
      return identification(target, other, supply);
    case BindingKind::Iteration:
      return *iteration(target, index, ytypes, supply);
  }
  throw InvalidState("unknown binding kind");
}

Counters binding_cost(const BindingSpec& spec) {
  Counters c;
  switch (spec.kind) {
    case BindingKind::JPProjection:
      break;
    case BindingKind::HuetProjection:
      if (spec.functional) {
        c.func_proj = 1;
        c.total = 1;
      }
      break;
    case BindingKind::Imitation:
      c.imit = 1;
      c.total = 1;
      break;
    case BindingKind::Elimination:
      c.elim = spec.removed;
      c.total = 1;
      break;
    case BindingKind::Identification:
      c.ident = 1;
      c.total = 1;
      break;
    case BindingKind::Iteration:
      c.total = 1;
      break;
  }
  return c;
}

bool is_limited(const BindingSpec& spec) {
  if (spec.kind == BindingKind::JPProjection) return false;
  if (spec.kind == BindingKind::HuetProjection) return spec.functional;
  return true;
}

bool within_limits(const Counters& used, const Counters& cost, const Limits& limits) {
  return used.total + cost.total <= limits.total && used.func_proj + cost.func_proj <= limits.func_proj &&
         used.elim + cost.elim <= limits.elim && used.imit + cost.imit <= limits.imit &&
         used.ident + cost.ident <= limits.ident;
}

Counters add_counters(const Counters& a, const Counters& b) {
  return Counters{a.total + b.total, a.func_proj + b.func_proj, a.elim + b.elim, a.imit + b.imit, a.ident + b.ident};
}

TypeTupleEnumerator::TypeTupleEnumerator(std::vector<Type> universe) : universe_(std::move(universe)) {
  fill_length(0);
}

void TypeTupleEnumerator::fill_length(std::size_t len) {
  len_ = len;
  pos_ = 0;
  bucket_.clear();
  if (len == 0) {
    bucket_.emplace_back();
    return;
  }
  if (universe_.empty()) return;
  std::vector<std::size_t> idx(len, 0);
  while (true) {
    std::vector<Type> tup;
    tup.reserve(len);
    for (std::size_t i : idx) tup.push_back(universe_[i]);
    bucket_.push_back(std::move(tup));
    std::size_t d = len;
    while (d > 0 && ++idx[d - 1] == universe_.size()) {
      idx[d - 1] = 0;
      --d;
    }
    if (d == 0) break;
  }
  auto total = [](const std::vector<Type>& t) {
    std::size_t sz = 0;
    for (const Type& x : t) sz += x.size();
    return sz;
  };
  std::stable_sort(bucket_.begin(), bucket_.end(),
                   [&](const auto& a, const auto& b) { return total(a) < total(b); });
}

std::optional<std::vector<Type>> TypeTupleEnumerator::next() {
  while (pos_ >= bucket_.size()) {
    if (universe_.empty()) return std::nullopt;
    fill_length(len_ + 1);
  }
  return bucket_[pos_++];
}

std::vector<Type> type_universe(std::span<const Type> roots) {
  std::vector<Type> out;
  std::vector<Type> stack(roots.begin(), roots.end());
  while (!stack.empty()) {
    Type t = stack.back();
    stack.pop_back();
    if (std::find(out.begin(), out.end(), t) != out.end()) continue;
    out.push_back(t);
    if (t.is_arrow()) {
      stack.push_back(t.domain());
      stack.push_back(t.codomain());
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

void push_huet_projections(const Term& F, std::vector<BindingSpec>& out) {
  if (F.sort() == VarSort::Identification) return;
  std::vector<Type> xs = F.type().arg_types();
  for (std::size_t i = 1; i <= xs.size(); ++i) {
    if (xs[i - 1].result() != F.type().result()) continue;
    BindingSpec s{BindingKind::HuetProjection, F};
    s.index = static_cast<std::uint32_t>(i);
    s.functional = xs[i - 1].is_arrow();
    out.push_back(std::move(s));
  }
}

void push_jp_projections(const Term& F, std::vector<BindingSpec>& out) {
  if (F.sort() == VarSort::Identification) return;
  std::vector<Type> xs = F.type().arg_types();
  for (std::size_t i = 1; i <= xs.size(); ++i) {
    if (xs[i - 1] != F.type().result()) continue;
    BindingSpec s{BindingKind::JPProjection, F};
    s.index = static_cast<std::uint32_t>(i);
    out.push_back(std::move(s));
  }
}

// Strict subsets of 1..n, larger subsets first, lexicographic within a size.
void push_eliminations(const Term& F, std::vector<BindingSpec>& out) {
  std::size_t n = F.type().arity();
  if (n == 0) return;
  for (std::size_t r = n; r-- > 0;) {
    std::vector<std::uint32_t> comb(r);
    for (std::size_t i = 0; i < r; ++i) comb[i] = static_cast<std::uint32_t>(i + 1);
    while (true) {
      BindingSpec s{BindingKind::Elimination, F};
      s.keep = comb;
      s.removed = static_cast<std::uint32_t>(n - r);
      out.push_back(s);
      std::size_t i = r;
      while (i > 0 && comb[i - 1] == n - r + i) --i;
      if (i == 0) break;
      ++comb[i - 1];
      for (std::size_t j = i; j < r; ++j) comb[j] = comb[j - 1] + 1;
    }
  }
}

struct Sides {
  Term flex;
  Term other;
  PairClass cls;
};

Sides analyse(const Term& a, const Term& b) {
  bool fa = a.is_free_var();
  bool fb = b.is_free_var();
  if (fa && fb) return {a, b, PairClass::FlexFlex};
  if (fa) return {a, b, PairClass::FlexRigid};
  if (fb) return {b, a, PairClass::FlexRigid};
  return {a, b, PairClass::RigidRigid};
}

class CompleteSequence final : public BindingSequence {
 public:
  CompleteSequence(std::vector<BindingSpec> finite, std::vector<std::pair<Term, std::uint32_t>> iter_sites,
                   std::shared_ptr<const std::vector<Type>> universe)
      : finite_(std::move(finite)), sites_(std::move(iter_sites)) {
    if (!sites_.empty()) tuples_.emplace(universe ? *universe : std::vector<Type>{});
  }

  std::optional<BindingSpec> next() override {
    if (pos_ < finite_.size()) return finite_[pos_++];
    if (sites_.empty()) return std::nullopt;
    if (site_ == 0 || site_ >= sites_.size()) {
      auto t = tuples_->next();
      if (!t) return std::nullopt;
      current_ = std::move(*t);
      site_ = 0;
    }
    const auto& [F, i] = sites_[site_++];
    BindingSpec s{BindingKind::Iteration, F};
    s.index = i;
    s.ytypes = current_;
    return s;
  }

 private:
  std::vector<BindingSpec> finite_;
  std::size_t pos_ = 0;
  std::vector<std::pair<Term, std::uint32_t>> sites_;
  std::optional<TypeTupleEnumerator> tuples_;
  std::vector<Type> current_;
  std::size_t site_ = 0;
};

}  // namespace

std::unique_ptr<BindingSequence> p_complete(const Term& lhs_head, const Term& rhs_head,
                                            std::shared_ptr<const std::vector<Type>> universe) {
  Sides s = analyse(lhs_head, rhs_head);
  std::vector<BindingSpec> finite;
  std::vector<std::pair<Term, std::uint32_t>> sites;
  switch (s.cls) {
    case PairClass::RigidRigid:
      break;
    case PairClass::FlexRigid:
      if (s.other.is_const()) finite.push_back(BindingSpec{BindingKind::Imitation, s.flex, s.other});
      push_huet_projections(s.flex, finite);
      break;
    case PairClass::FlexFlex:
      if (s.flex.var_id() != s.other.var_id()) {
        finite.push_back(BindingSpec{BindingKind::Identification, s.flex, s.other});
        push_jp_projections(s.flex, finite);
        push_jp_projections(s.other, finite);
        for (const Term* v : {&s.flex, &s.other})
          for (std::uint32_t i = 1; i <= v->type().arity(); ++i) sites.emplace_back(*v, i);
      } else if (s.flex.sort() != VarSort::Elimination) {
        push_eliminations(s.flex, finite);
        std::vector<Type> xs = s.flex.type().arg_types();
        for (std::uint32_t i = 1; i <= xs.size(); ++i)
          if (xs[i - 1].is_arrow()) sites.emplace_back(s.flex, i);
      }
      break;
  }
  return std::make_unique<CompleteSequence>(std::move(finite), std::move(sites), std::move(universe));
}

std::vector<BindingSpec> p_pragmatic_unfiltered(const Term& lhs_head, const Term& rhs_head) {
  Sides s = analyse(lhs_head, rhs_head);
  std::vector<BindingSpec> out;
  switch (s.cls) {
    case PairClass::RigidRigid:
      break;
    case PairClass::FlexRigid:
      if (s.other.is_const()) out.push_back(BindingSpec{BindingKind::Imitation, s.flex, s.other});
      push_huet_projections(s.flex, out);
      break;
    case PairClass::FlexFlex:
      if (s.flex.var_id() != s.other.var_id()) {
        out.push_back(BindingSpec{BindingKind::Identification, s.flex, s.other});
        push_huet_projections(s.flex, out);
        push_huet_projections(s.other, out);
      } else if (s.flex.sort() != VarSort::Elimination) {
        push_eliminations(s.flex, out);
      }
      break;
  }
  return out;
}

std::vector<BindingSpec> p_pragmatic(const Term& lhs_head, const Term& rhs_head, const Counters& used,
                                     const Limits& limits) {
  std::vector<BindingSpec> out;
  for (BindingSpec& s : p_pragmatic_unfiltered(lhs_head, rhs_head))
    if (!is_limited(s) || within_limits(used, binding_cost(s), limits)) out.push_back(std::move(s));
  return out;
}

}  // namespace hou
