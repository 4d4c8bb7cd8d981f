#include "hou/oracles.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_map>

#include "expose.hpp"
#include "hou/bindings.hpp"
#include "hou/errors.hpp"
#include "hou/normalize.hpp"

namespace hou {

using detail::expose;
using detail::Exposed;
using detail::Lookup;

const char* verdict_name(OracleVerdict::Kind k) {
  switch (k) {
    case OracleVerdict::Kind::Success: return "success";
    case OracleVerdict::Kind::NotUnifiable: return "not-unifiable";
    case OracleVerdict::Kind::NotApplicable: return "not-applicable";
  }
  return "?";
}

Goal make_goal(const Term& lhs, const Term& rhs) {
  if (lhs.type() != rhs.type()) throw TypeMismatch("constraint sides have different types");
  Goal g;
  g.lhs = lhs;
  g.rhs = rhs;
  return g;
}

std::optional<std::uint32_t> as_bound_var_eta(const Term& arg) {
  Term a = hnf(arg);
  Abstraction ab = strip_lams(a);
  std::size_t k = ab.binders.size();
  Spine sp = spine(ab.body);
  if (!sp.head.is_bound_var() || sp.head.bound_index() < k || sp.args.size() != k) return std::nullopt;
  for (std::size_t j = 0; j < k; ++j) {
    auto idx = as_bound_var_eta(sp.args[j]);
    if (!idx || *idx != k - 1 - j) return std::nullopt;
  }
  return static_cast<std::uint32_t>(sp.head.bound_index() - k);
}

namespace {

template <class FlexCheck>
bool all_flex_args(const Term& t, FlexCheck&& check) {
  Abstraction ab = strip_lams(t);
  Spine sp = spine(ab.body);
  if (sp.head.is_free_var()) return check(sp.args);
  for (const Term& a : sp.args)
    if (!all_flex_args(a, check)) return false;
  return true;
}

bool distinct_bvars(const std::vector<Term>& args) {
  std::vector<std::uint32_t> seen;
  for (const Term& a : args) {
    auto i = as_bound_var_eta(a);
    if (!i || std::find(seen.begin(), seen.end(), *i) != seen.end()) return false;
    seen.push_back(*i);
  }
  return true;
}

bool solid_args(const std::vector<Term>& args) {
  for (const Term& a : args) {
    if (as_bound_var_eta(a)) continue;
    if (a.type().is_base() && a.ground()) continue;
    return false;
  }
  return true;
}

void count_occurrences(const Term& t, std::unordered_map<VarId, int>& counts) {
  if (t.ground()) return;
  switch (t.kind()) {
    case TermKind::FreeVar: ++counts[t.var_id()]; return;
    case TermKind::App:
      count_occurrences(t.fn(), counts);
      count_occurrences(t.arg(), counts);
      return;
    case TermKind::Lam: count_occurrences(t.body(), counts); return;
    default: return;
  }
}

}  // namespace

bool is_pattern(const Term& t) { return all_flex_args(t, distinct_bvars); }
bool is_solid(const Term& t) { return all_flex_args(t, solid_args); }

bool is_linear(const Term& t) {
  std::unordered_map<VarId, int> counts;
  count_occurrences(t, counts);
  for (const auto& [id, n] : counts)
    if (n > 1) return false;
  return true;
}

// ---------------------------------------------------------------- fixpoint

namespace {

// body is F applied to the ctx bound variables in order.
bool is_eta_var_side(const Exposed& e, std::size_t ctx_len) {
  if (!e.head.is_free_var() || e.args.size() != ctx_len + e.binders.size()) return false;
  std::size_t n = e.args.size();
  for (std::size_t j = 0; j < n; ++j) {
    auto idx = as_bound_var_eta(e.args[j]);
    if (!idx || *idx != n - 1 - j) return false;
  }
  return true;
}

// An occurrence of F reachable through rigid heads only, below the root.
bool rigid_path_occurrence(const Term& t, VarId F, bool root) {
  Abstraction ab = strip_lams(t);
  Spine sp = spine(ab.body);
  if (sp.head.is_free_var()) return !root && sp.head.var_id() == F;
  for (const Term& a : sp.args)
    if (a.may_contain_var(F) && rigid_path_occurrence(a, F, false)) return true;
  return false;
}

}  // namespace

OracleVerdict fixpoint_oracle(const Goal& goal, const Substitution& sigma, FreshSupply&) {
  NormalizationExempt exempt;
  Lookup lk = detail::lookup_in(sigma);
  Exposed el = expose(goal.lhs, lk);
  Exposed er = expose(goal.rhs, lk);
  std::size_t n = goal.ctx.size();
  for (int orient = 0; orient < 2; ++orient) {
    const Exposed& var_side = orient == 0 ? el : er;
    const Term& other_body = orient == 0 ? goal.rhs : goal.lhs;
    if (!is_eta_var_side(var_side, n)) continue;
    const Term& F = var_side.head;
    Term u = eta_long_beta_normal(sigma.apply(Term::lams(goal.ctx, other_body)));
    if (!occurs(F.var_id(), u)) return OracleVerdict::success({Substitution::single(F, u)});
    // The rigid-path refutation needs both m = 0 and a non-abstraction side.
    if (n == 0 && !u.is_lam() && rigid_path_occurrence(u, F.var_id(), true)) return OracleVerdict::not_unifiable();
    return OracleVerdict::not_applicable();
  }
  return OracleVerdict::not_applicable();
}

// ----------------------------------------------------------------- pattern

namespace {

enum class Outcome { Ok, Fail, NotApplicable };

class PatternSolver {
 public:
  PatternSolver(const Substitution& sigma, FreshSupply& supply)
      : sigma_(sigma), supply_(supply), first_fresh_(supply.peek()) {}

  OracleVerdict run(const Goal& goal) {
    work_.push_back({goal.ctx, goal.lhs, goal.rhs});
    while (!work_.empty()) {
      Item it = std::move(work_.back());
      work_.pop_back();
      Outcome o = process(it);
      if (o == Outcome::Fail) return OracleVerdict::not_unifiable();
      if (o == Outcome::NotApplicable) return OracleVerdict::not_applicable();
    }
    Substitution out;
    for (const auto& [id, e] : theta_.entries())
      if (id < first_fresh_) out.set(e.var, eta_long_beta_normal(e.image));
    return OracleVerdict::success({std::move(out)});
  }

 private:
  struct Item {
    std::vector<Type> ctx;
    Term s;
    Term t;
  };

  Lookup lookup() { return detail::lookup_in(theta_, sigma_); }

  // Distinct bound-variable indices of a flex spine, or nullopt.
  static std::optional<std::vector<std::uint32_t>> pattern_args(const std::vector<Term>& args) {
    std::vector<std::uint32_t> out;
    for (const Term& a : args) {
      auto i = as_bound_var_eta(a);
      if (!i || std::find(out.begin(), out.end(), *i) != out.end()) return std::nullopt;
      out.push_back(*i);
    }
    return out;
  }

  void bind(const Term& F, const Term& image) { theta_.extend(F, theta_.apply(image)); }

  Outcome process(const Item& it) {
    Lookup lk = lookup();
    Exposed a = expose(it.s, lk);
    Exposed b = expose(it.t, lk);
    std::vector<Type> ctx = it.ctx;
    ctx.insert(ctx.end(), a.binders.begin(), a.binders.end());
    bool fa = a.head.is_free_var();
    bool fb = b.head.is_free_var();
    if (!fa && !fb) {
      if (a.head != b.head) return Outcome::Fail;
      for (std::size_t i = a.args.size(); i-- > 0;) work_.push_back({ctx, a.args[i], b.args[i]});
      return Outcome::Ok;
    }
    if (fa && fb) return flex_flex(a, b);
    return fa ? flex_rigid(a, b) : flex_rigid(b, a);
  }

  Outcome flex_flex(const Exposed& a, const Exposed& b) {
    auto ua = pattern_args(a.args);
    auto ub = pattern_args(b.args);
    if (!ua || !ub) return Outcome::NotApplicable;
    const Term& F = a.head;
    const Term& G = b.head;
    std::vector<Type> fx = F.type().arg_types();
    if (F.var_id() == G.var_id()) {
      std::vector<std::size_t> keep;
      for (std::size_t i = 0; i < ua->size(); ++i)
        if ((*ua)[i] == (*ub)[i]) keep.push_back(i);
      if (keep.size() == ua->size()) return Outcome::Ok;
      std::vector<Type> dom;
      std::vector<Term> args;
      for (std::size_t i : keep) {
        dom.push_back(fx[i]);
        args.push_back(Term::bound_var(static_cast<std::uint32_t>(fx.size() - 1 - i), fx[i]));
      }
      Term H = supply_.fresh(Type::arrows(dom, F.type().result()));
      bind(F, Term::lams(fx, Term::apply(H, args)));
      return Outcome::Ok;
    }
    std::vector<Type> gx = G.type().arg_types();
    std::vector<Type> dom;
    std::vector<Term> fargs, gargs;
    for (std::size_t i = 0; i < ua->size(); ++i) {
      auto it = std::find(ub->begin(), ub->end(), (*ua)[i]);
      if (it == ub->end()) continue;
      std::size_t j = static_cast<std::size_t>(it - ub->begin());
      dom.push_back(fx[i]);
      fargs.push_back(Term::bound_var(static_cast<std::uint32_t>(fx.size() - 1 - i), fx[i]));
      gargs.push_back(Term::bound_var(static_cast<std::uint32_t>(gx.size() - 1 - j), gx[j]));
    }
    Term H = supply_.fresh(Type::arrows(dom, F.type().result()));
    bind(F, Term::lams(fx, Term::apply(H, fargs)));
    bind(G, Term::lams(gx, Term::apply(H, gargs)));
    return Outcome::Ok;
  }

  Outcome flex_rigid(const Exposed& flex, const Exposed& rigid) {
    auto u = pattern_args(flex.args);
    if (!u) return Outcome::NotApplicable;
    const Term& F = flex.head;
    std::vector<Type> fx = F.type().arg_types();
    std::vector<Term> args;
    Outcome o = Outcome::Ok;
    for (const Term& r : rigid.args) {
      Term inv;
      o = invert(r, 0, F, *u, inv);
      if (o != Outcome::Ok) return o;
      args.push_back(inv);
    }
    Term head;
    o = invert_head(rigid.head, 0, *u, head);
    if (o != Outcome::Ok) return o;
    bind(F, Term::lams(fx, Term::apply(head, args)));
    return Outcome::Ok;
  }

  // Rigid head at local depth k relative to the ctx in which u is given.
  static Outcome invert_head(const Term& h, std::size_t k, const std::vector<std::uint32_t>& u, Term& out) {
    if (h.is_const()) {
      out = h;
      return Outcome::Ok;
    }
    std::uint32_t j = h.bound_index();
    if (j < k) {
      out = h;
      return Outcome::Ok;
    }
    auto it = std::find(u.begin(), u.end(), j - k);
    if (it == u.end()) return Outcome::Fail;
    std::size_t p = static_cast<std::size_t>(it - u.begin());
    out = Term::bound_var(static_cast<std::uint32_t>(k + u.size() - 1 - p), h.type());
    return Outcome::Ok;
  }

  Outcome invert(const Term& t, std::size_t k, const Term& F, const std::vector<std::uint32_t>& u, Term& out) {
    Exposed e = expose(t, lookup());
    std::size_t k2 = k + e.binders.size();
    if (e.head.is_free_var()) {
      auto w = pattern_args(e.args);
      if (!w) return Outcome::NotApplicable;
      if (e.head.var_id() == F.var_id()) return Outcome::Fail;
      std::vector<Type> gx = e.head.type().arg_types();
      std::vector<std::size_t> keep;
      std::vector<Term> translated;
      for (std::size_t i = 0; i < w->size(); ++i) {
        std::uint32_t a = (*w)[i];
        Term tr;
        if (invert_head(Term::bound_var(a, gx[i]), k2, u, tr) == Outcome::Ok) {
          keep.push_back(i);
          translated.push_back(tr);
        }
      }
      Term head = e.head;
      if (keep.size() != w->size()) {
        std::vector<Type> dom;
        std::vector<Term> hargs;
        for (std::size_t i : keep) {
          dom.push_back(gx[i]);
          hargs.push_back(Term::bound_var(static_cast<std::uint32_t>(gx.size() - 1 - i), gx[i]));
        }
        head = supply_.fresh(Type::arrows(dom, e.head.type().result()));
        bind(e.head, Term::lams(gx, Term::apply(head, hargs)));
      }
      out = Term::lams(e.binders, Term::apply(head, translated));
      return Outcome::Ok;
    }
    Term head;
    Outcome o = invert_head(e.head, k2, u, head);
    if (o != Outcome::Ok) return o;
    std::vector<Term> args;
    for (const Term& a : e.args) {
      Term inv;
      o = invert(a, k2, F, u, inv);
      if (o != Outcome::Ok) return o;
      args.push_back(inv);
    }
    out = Term::lams(e.binders, Term::apply(head, args));
    return Outcome::Ok;
  }

  const Substitution& sigma_;
  FreshSupply& supply_;
  VarId first_fresh_;
  Substitution theta_;
  std::vector<Item> work_;
};

}  // namespace

OracleVerdict pattern_oracle(const Goal& goal, const Substitution& sigma, FreshSupply& supply) {
  NormalizationExempt exempt;
  PatternSolver solver(sigma, supply);
  return solver.run(goal);
}

// ------------------------------------------------------------------- limit

OracleVerdict limit_oracle(const Goal& goal, const Substitution& sigma, const Limits& limits, FreshSupply& supply) {
  Lookup lk = detail::lookup_in(sigma);
  Exposed a = expose(goal.lhs, lk);
  Exposed b = expose(goal.rhs, lk);
  bool fa = a.head.is_free_var();
  bool fb = b.head.is_free_var();
  if (!fa && !fb) return OracleVerdict::not_applicable();
  bool any_limited = false;
  bool any_unlimited = false;
  for (const BindingSpec& s : p_pragmatic_unfiltered(a.head, b.head)) {
    if (!is_limited(s)) {
      any_unlimited = true;
      continue;
    }
    any_limited = true;
    if (within_limits(goal.counters, binding_cost(s), limits)) return OracleVerdict::not_applicable();
  }
  if (!any_limited) return OracleVerdict::not_applicable();
  if (fa && fb) {
    const Type& beta = a.head.type().result();
    Term H = supply.fresh(beta);
    Substitution triv;
    triv.set(a.head, Term::lams(a.head.type().arg_types(), H));
    if (b.head.var_id() != a.head.var_id()) triv.set(b.head, Term::lams(b.head.type().arg_types(), H));
    return OracleVerdict::success({std::move(triv)});
  }
  if (any_unlimited) return OracleVerdict::not_applicable();
  return OracleVerdict::not_unifiable();
}

OracleVerdict fixpoint_oracle(const Term& s, const Term& t, FreshSupply& supply) {
  return fixpoint_oracle(make_goal(s, t), Substitution{}, supply);
}
OracleVerdict pattern_oracle(const Term& s, const Term& t, FreshSupply& supply) {
  return pattern_oracle(make_goal(s, t), Substitution{}, supply);
}
OracleVerdict solid_oracle(const Term& s, const Term& t, FreshSupply& supply) {
  return solid_oracle(make_goal(s, t), Substitution{}, supply);
}

// ---------------------------------------------------------------- registry

namespace {

using OracleFn = OracleVerdict (*)(const Goal&, const Substitution&, FreshSupply&);

// Node visits granted to one oracle call inside the engine.
constexpr std::uint64_t kOracleWork = std::uint64_t{1} << 21;

class FunctionOracle final : public Oracle {
 public:
  FunctionOracle(std::string_view name, OracleFn fn) : name_(name), fn_(fn) {}
  std::string_view name() const override { return name_; }
  OracleVerdict decide(const Goal& g, const Substitution& s, FreshSupply& supply) const override {
    try {
      WorkBudget budget(kOracleWork);
      return fn_(g, s, supply);
    } catch (const WorkBudgetExceeded&) {
      return OracleVerdict::not_applicable();
    }
  }

 private:
  std::string_view name_;
  OracleFn fn_;
};

class LimitOracle final : public Oracle {
 public:
  explicit LimitOracle(const Limits& limits) : limits_(limits) {}
  std::string_view name() const override { return "limit"; }
  OracleVerdict decide(const Goal& g, const Substitution& s, FreshSupply& supply) const override {
    return limit_oracle(g, s, limits_, supply);
  }

 private:
  Limits limits_;
};

}  // namespace

std::unique_ptr<Oracle> make_oracle(std::string_view name, const Limits& limits) {
  if (name == "pattern") return std::make_unique<FunctionOracle>("pattern", static_cast<OracleFn>(&pattern_oracle));
  if (name == "fixpoint") return std::make_unique<FunctionOracle>("fixpoint", static_cast<OracleFn>(&fixpoint_oracle));
  if (name == "solid") return std::make_unique<FunctionOracle>("solid", static_cast<OracleFn>(&solid_oracle));
  if (name == "limit") return std::make_unique<LimitOracle>(limits);
  throw std::invalid_argument("unknown oracle '" + std::string(name) + "'");
}

std::vector<std::string> oracle_names() { return {"pattern", "fixpoint", "solid", "limit"}; }

}  // namespace hou
