#include <algorithm>
#include <unordered_set>

#include "expose.hpp"
#include "hou/errors.hpp"
#include "hou/normalize.hpp"
#include "hou/oracles.hpp"

namespace hou {

const char* pt_rule_name(PTRule r) {
  switch (r) {
    case PTRule::Deletion: return "deletion";
    case PTRule::Decomposition: return "decomposition";
    case PTRule::Failure: return "failure";
    case PTRule::Solution: return "solution";
    case PTRule::Imitation: return "imitation";
    case PTRule::Projection: return "projection";
    case PTRule::Preunified: return "preunified";
  }
  return "?";
}

PTConstraint make_pt_constraint(std::vector<Type> ctx, const Term& lhs, const Term& rhs) {
  if (lhs.type() != rhs.type()) throw TypeMismatch("constraint sides have different types");
  Abstraction a = strip_lams(eta_long_beta_normal(lhs));
  Abstraction b = strip_lams(eta_long_beta_normal(rhs));
  ctx.insert(ctx.end(), a.binders.begin(), a.binders.end());
  return PTConstraint{std::move(ctx), std::move(a.body), std::move(b.body), false};
}

namespace {

bool flex(const Term& body) { return head_of(body).is_free_var(); }

enum class Shape { Equal, Clash, SameRigid, FlexRigid, FlexFlex };

Shape shape_of(const PTConstraint& c) {
  if (c.lhs == c.rhs) return Shape::Equal;
  bool fl = flex(c.lhs);
  bool fr = flex(c.rhs);
  if (fl && fr) return Shape::FlexFlex;
  if (fl || fr) return Shape::FlexRigid;
  return head_of(c.lhs) == head_of(c.rhs) ? Shape::SameRigid : Shape::Clash;
}

// Applies rho to every constraint mentioning one of its variables.
void apply_all(const Substitution& rho, std::vector<PTConstraint>& cs) {
  std::uint64_t bloom = rho.bloom();
  for (PTConstraint& c : cs) {
    if (!(c.lhs.var_bloom() & bloom) && !(c.rhs.var_bloom() & bloom)) continue;
    c.lhs = eta_long_beta_normal(rho.apply(c.lhs));
    c.rhs = eta_long_beta_normal(rho.apply(c.rhs));
  }
}

std::vector<PTConstraint> decompose(const PTConstraint& c) {
  Spine a = spine(c.lhs);
  Spine b = spine(c.rhs);
  std::vector<PTConstraint> out;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    PTConstraint d = make_pt_constraint(c.ctx, a.args[i], b.args[i]);
    d.base_projection_descendant = c.base_projection_descendant;
    out.push_back(std::move(d));
  }
  return out;
}

// Arguments are exactly the context's bound variables, outermost first.
bool applied_to_ctx(const std::vector<Term>& args, std::size_t n) {
  if (args.size() != n) return false;
  for (std::size_t j = 0; j < n; ++j) {
    auto idx = as_bound_var_eta(args[j]);
    if (!idx || *idx != n - 1 - j) return false;
  }
  return true;
}

// Child that replaces constraint `sel` by `repl`, with rho applied
// everywhere and recorded in theta.
PTState child_with(const PTState& st, std::size_t sel, std::vector<PTConstraint> repl, const Term& F,
                   const Term& image) {
  PTState ch;
  ch.theta = st.theta;
  ch.theta.extend(F, image);
  Substitution rho = Substitution::single(F, image);
  ch.constraints.reserve(st.constraints.size() + repl.size());
  for (std::size_t i = 0; i < st.constraints.size(); ++i)
    if (i != sel) ch.constraints.push_back(st.constraints[i]);
  apply_all(rho, ch.constraints);
  apply_all(rho, repl);
  ch.constraints.insert(ch.constraints.begin() + static_cast<std::ptrdiff_t>(std::min(sel, ch.constraints.size())),
                        std::make_move_iterator(repl.begin()), std::make_move_iterator(repl.end()));
  return ch;
}

}  // namespace

std::optional<std::size_t> admissible_select(const PTState& st) {
  int best_rank = 5;
  std::size_t best = 0;
  for (std::size_t i = 0; i < st.constraints.size(); ++i) {
    const PTConstraint& c = st.constraints[i];
    int rank;
    switch (shape_of(c)) {
      case Shape::Equal: rank = 0; break;
      case Shape::Clash: rank = 1; break;
      case Shape::SameRigid: rank = 2; break;
      case Shape::FlexRigid: rank = c.base_projection_descendant ? 3 : 4; break;
      default: continue;
    }
    if (rank < best_rank) {
      best_rank = rank;
      best = i;
    }
  }
  if (best_rank == 5) return std::nullopt;
  return best;
}

PTStepResult pt_step(const PTState& st, FreshSupply& supply) {
  auto sel = admissible_select(st);
  if (!sel) return PTStepResult{PTRule::Preunified, 0, {st}, {PTRule::Preunified}};
  std::size_t i = *sel;
  const PTConstraint& c = st.constraints[i];
  PTStepResult res{PTRule::Failure, i, {}, {}};
  switch (shape_of(c)) {
    case Shape::Equal: {
      PTState ch{st.constraints, st.theta};
      ch.constraints.erase(ch.constraints.begin() + static_cast<std::ptrdiff_t>(i));
      res.rule = PTRule::Deletion;
      res.children.push_back(std::move(ch));
      res.child_rules.push_back(PTRule::Deletion);
      return res;
    }
    case Shape::Clash: return res;
    case Shape::SameRigid: {
      PTState ch{{}, st.theta};
      for (std::size_t k = 0; k < st.constraints.size(); ++k) {
        if (k != i) {
          ch.constraints.push_back(st.constraints[k]);
          continue;
        }
        for (PTConstraint& d : decompose(c)) ch.constraints.push_back(std::move(d));
      }
      res.rule = PTRule::Decomposition;
      res.children.push_back(std::move(ch));
      res.child_rules.push_back(PTRule::Decomposition);
      return res;
    }
    default: break;
  }

  bool lhs_flex = flex(c.lhs);
  const Term& flex_body = lhs_flex ? c.lhs : c.rhs;
  const Term& rigid_body = lhs_flex ? c.rhs : c.lhs;
  Spine fs = spine(flex_body);
  Spine rs = spine(rigid_body);
  const Term& F = fs.head;
  std::vector<Type> xs = F.type().arg_types();
  std::size_t m = xs.size();
  const Type& beta = F.type().result();

  if (applied_to_ctx(fs.args, c.ctx.size()) && !occurs(F.var_id(), rigid_body)) {
    res.rule = PTRule::Solution;
    res.children.push_back(child_with(st, i, {}, F, Term::lams(c.ctx, rigid_body)));
    res.child_rules.push_back(PTRule::Solution);
    return res;
  }

  auto fresh_args = [&](const std::vector<Type>& doms, std::size_t inner) {
    std::vector<Term> out;
    for (const Type& g : doms) {
      Term G = supply.fresh(Type::arrows(xs, g));
      std::vector<Term> xa;
      for (std::size_t j = 0; j < m; ++j)
        xa.push_back(Term::bound_var(static_cast<std::uint32_t>(inner + m - 1 - j), xs[j]));
      out.push_back(Term::apply(G, xa));
    }
    return out;
  };
  auto reduced = [&](const Term& image) {
    PTConstraint r = c;
    Substitution rho = Substitution::single(F, image);
    r.lhs = eta_long_beta_normal(rho.apply(r.lhs));
    r.rhs = eta_long_beta_normal(rho.apply(r.rhs));
    return r;
  };

  res.rule = PTRule::Projection;
  if (rs.head.is_const()) {
    std::vector<Type> gs = rs.head.type().arg_types();
    Term image = Term::lams(xs, Term::apply(rs.head, fresh_args(gs, 0)));
    PTConstraint r = reduced(image);
    std::vector<PTConstraint> parts = shape_of(r) == Shape::SameRigid ? decompose(r) : std::vector<PTConstraint>{r};
    res.children.push_back(child_with(st, i, std::move(parts), F, image));
    res.child_rules.push_back(PTRule::Imitation);
    res.rule = PTRule::Imitation;
  }
  for (std::size_t k = 0; k < m; ++k) {
    if (xs[k].result() != beta) continue;
    std::vector<Type> gs = xs[k].arg_types();
    Term xk = Term::bound_var(static_cast<std::uint32_t>(m - 1 - k), xs[k]);
    Term image = Term::lams(xs, Term::apply(xk, fresh_args(gs, 0)));
    PTConstraint r = reduced(image);
    if (gs.empty()) r.base_projection_descendant = true;
    res.children.push_back(child_with(st, i, {std::move(r)}, F, image));
    res.child_rules.push_back(PTRule::Projection);
  }
  return res;
}

PTResult run_pt(PTState initial, FreshSupply& supply, std::uint64_t max_transitions) {
  PTResult out;
  std::vector<PTState> stack;
  stack.push_back(std::move(initial));
  while (!stack.empty()) {
    PTState st = std::move(stack.back());
    stack.pop_back();
    if (!admissible_select(st)) {
      out.leaves.push_back(std::move(st));
      continue;
    }
    if (out.transitions >= max_transitions) {
      out.exceeded = true;
      return out;
    }
    ++out.transitions;
    PTStepResult r = pt_step(st, supply);
    for (auto it = r.children.rbegin(); it != r.children.rend(); ++it) stack.push_back(std::move(*it));
  }
  return out;
}

// ------------------------------------------------------------------ MGUs

namespace {

Substitution restricted_normalized(const Substitution& theta, std::span<const Term> vars) {
  return theta.restrict(vars).normalized();
}

std::vector<Term> bvars_for(std::span<const Type> types, std::size_t inner = 0) {
  std::vector<Term> out;
  std::size_t n = types.size();
  for (std::size_t j = 0; j < n; ++j) out.push_back(Term::bound_var(static_cast<std::uint32_t>(inner + n - 1 - j), types[j]));
  return out;
}

// Bodies, under fresh binders of types `ys`, of the images of H over a CSU
// of lambda ctx. H args =? lambda ctx. target.
std::vector<Term> matcher_bodies(std::span<const Type> ctx, const Term& target, std::span<const Term> args,
                                 std::span<const Type> ys, FreshSupply& supply) {
  Term H = supply.fresh(Type::arrows(ys, target.type()));
  PTState st;
  st.constraints.push_back(
      make_pt_constraint(std::vector<Type>(ctx.begin(), ctx.end()), Term::apply(H, args), target));
  PTResult r = run_pt(std::move(st), supply);
  if (r.exceeded) throw InvalidState("matching subproblem did not terminate");
  std::vector<Term> out;
  for (const PTState& leaf : r.leaves) {
    if (!leaf.constraints.empty()) throw InvalidState("matching subproblem left flex-flex constraints");
    const Term* img = leaf.theta.lookup(H.var_id());
    if (!img) throw InvalidState("matching subproblem left its variable unbound");
    out.push_back(eta_long_beta_normal(Term::apply(*img, bvars_for(ys))));
  }
  return out;
}

}  // namespace

std::vector<Substitution> solid_match(const Term& s, const Term& t, FreshSupply& supply) {
  PTState st;
  st.constraints.push_back(make_pt_constraint({}, s, t));
  PTResult r = run_pt(std::move(st), supply);
  if (r.exceeded) throw InvalidState("solid matching did not terminate");
  std::vector<Term> vars = free_vars(s);
  collect_free_vars(t, vars);
  std::vector<Substitution> out;
  for (const PTState& leaf : r.leaves) out.push_back(restricted_normalized(leaf.theta, vars));
  return out;
}

Substitution solid_flexflex_same(std::span<const Type> ctx, const Term& F, std::span<const Term> ss,
                                 std::span<const Term> ss2, FreshSupply& supply) {
  (void)ctx;
  std::vector<Type> xs = F.type().arg_types();
  std::vector<Type> dom;
  std::vector<Term> args;
  std::vector<Term> bv = bvars_for(xs);
  for (std::size_t j = 0; j < xs.size(); ++j) {
    if (eta_long_beta_normal(ss[j]) != eta_long_beta_normal(ss2[j])) continue;
    dom.push_back(xs[j]);
    args.push_back(bv[j]);
  }
  Term G = supply.fresh(Type::arrows(dom, F.type().result()));
  return Substitution::single(F, eta_long_beta_normal(Term::lams(xs, Term::apply(G, args))));
}

Substitution solid_flexflex_diff(std::span<const Type> ctx, const Term& F, std::span<const Term> ss, const Term& F2,
                                 std::span<const Term> ss2, FreshSupply& supply) {
  std::vector<Type> xs = F.type().arg_types();
  std::vector<Type> ys = F2.type().arg_types();
  // blocks[i]: bodies under ys solving ss[i] =? H ss2; blocks2 symmetric.
  std::vector<std::vector<Term>> blocks, blocks2;
  for (std::size_t i = 0; i < xs.size(); ++i) blocks.push_back(matcher_bodies(ctx, ss[i], ss2, ys, supply));
  for (std::size_t i = 0; i < ys.size(); ++i) blocks2.push_back(matcher_bodies(ctx, ss2[i], ss, xs, supply));

  std::vector<Type> zdom;
  std::vector<Term> fargs, gargs;
  std::vector<Term> xb = bvars_for(xs);
  std::vector<Term> yb = bvars_for(ys);
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (const Term& body : blocks[i]) {
      zdom.push_back(xs[i]);
      fargs.push_back(xb[i]);
      gargs.push_back(body);
    }
  for (std::size_t i = 0; i < ys.size(); ++i)
    for (const Term& body : blocks2[i]) {
      zdom.push_back(ys[i]);
      fargs.push_back(body);
      gargs.push_back(yb[i]);
    }
  Term Z = supply.fresh(Type::arrows(zdom, F.type().result()));
  Substitution mgu;
  mgu.set(F, eta_long_beta_normal(Term::lams(xs, Term::apply(Z, fargs))));
  mgu.set(F2, eta_long_beta_normal(Term::lams(ys, Term::apply(Z, gargs))));
  return mgu;
}

// ----------------------------------------------------------------- oracle

namespace {

struct Residue {
  std::vector<PTConstraint> parts;
  bool clash = false;
};

// Rigid-rigid decomposition under sigma; everything else becomes a residue
// part with sigma applied.
Residue decompose_lazily(const Goal& goal, const Substitution& sigma) {
  Residue out;
  detail::Lookup lk = detail::lookup_in(sigma);
  struct Item {
    std::vector<Type> ctx;
    Term s, t;
  };
  std::vector<Item> work{{goal.ctx, goal.lhs, goal.rhs}};
  while (!work.empty()) {
    Item it = std::move(work.back());
    work.pop_back();
    detail::Exposed a = detail::expose(it.s, lk);
    detail::Exposed b = detail::expose(it.t, lk);
    std::vector<Type> ctx = it.ctx;
    ctx.insert(ctx.end(), a.binders.begin(), a.binders.end());
    if (!a.head.is_free_var() && !b.head.is_free_var()) {
      if (a.head != b.head) {
        out.clash = true;
        return out;
      }
      for (std::size_t i = a.args.size(); i-- > 0;) work.push_back({ctx, a.args[i], b.args[i]});
      continue;
    }
    Term l = eta_long_beta_normal(sigma.apply(Term::apply(a.head, a.args)));
    Term r = eta_long_beta_normal(sigma.apply(Term::apply(b.head, b.args)));
    out.parts.push_back(PTConstraint{std::move(ctx), std::move(l), std::move(r), false});
  }
  return out;
}

bool vars_disjoint(const std::vector<PTConstraint>& parts) {
  std::unordered_set<VarId> left;
  for (const PTConstraint& c : parts)
    for (const Term& v : free_vars(c.lhs)) left.insert(v.var_id());
  for (const PTConstraint& c : parts)
    for (const Term& v : free_vars(c.rhs))
      if (left.count(v.var_id())) return false;
  return true;
}

bool side_linear(const std::vector<PTConstraint>& parts, bool lhs) {
  std::unordered_set<VarId> seen;
  std::vector<Term> all;
  for (const PTConstraint& c : parts) {
    const Term& t = lhs ? c.lhs : c.rhs;
    if (!is_linear(t)) return false;
    for (const Term& v : free_vars(t))
      if (!seen.insert(v.var_id()).second) return false;
  }
  return true;
}

// Solves the flex-flex residue of a PT leaf one pair at a time.
Substitution discharge(PTState leaf, FreshSupply& supply) {
  Substitution theta = std::move(leaf.theta);
  std::vector<PTConstraint>& cs = leaf.constraints;
  while (!cs.empty()) {
    PTConstraint c = std::move(cs.front());
    cs.erase(cs.begin());
    if (c.lhs == c.rhs) continue;
    Spine a = spine(c.lhs);
    Spine b = spine(c.rhs);
    Substitution mgu = a.head.var_id() == b.head.var_id()
                           ? solid_flexflex_same(c.ctx, a.head, a.args, b.args, supply)
                           : solid_flexflex_diff(c.ctx, a.head, a.args, b.head, b.args, supply);
    for (const auto& [id, e] : mgu.entries()) theta.extend(e.var, e.image);
    apply_all(mgu, cs);
  }
  return theta;
}

}  // namespace

OracleVerdict solid_oracle(const Goal& goal, const Substitution& sigma, FreshSupply& supply) {
  NormalizationExempt exempt;
  VarId first_fresh = supply.peek();
  Residue res = decompose_lazily(goal, sigma);
  if (res.clash) return OracleVerdict::not_unifiable();
  for (const PTConstraint& c : res.parts)
    if (!is_solid(c.lhs) || !is_solid(c.rhs)) return OracleVerdict::not_applicable();
  if (!vars_disjoint(res.parts)) return OracleVerdict::not_applicable();
  if (!side_linear(res.parts, true)) {
    if (!side_linear(res.parts, false)) return OracleVerdict::not_applicable();
    for (PTConstraint& c : res.parts) std::swap(c.lhs, c.rhs);
  }
  PTState st;
  st.constraints = std::move(res.parts);
  PTResult r = run_pt(std::move(st), supply, 100000);
  if (r.exceeded) return OracleVerdict::not_applicable();
  if (r.leaves.empty()) return OracleVerdict::not_unifiable();
  std::vector<Substitution> csu;
  for (PTState& leaf : r.leaves) {
    Substitution theta = discharge(std::move(leaf), supply);
    Substitution out;
    for (const auto& [id, e] : theta.entries())
      if (id < first_fresh) out.set(e.var, eta_long_beta_normal(e.image));
    csu.push_back(std::move(out));
  }
  return OracleVerdict::success(std::move(csu));
}

}  // namespace hou
