#include "hou/engine.hpp"

#include <algorithm>
#include <unordered_set>

#include "hou/bindings.hpp"
#include "hou/errors.hpp"
#include "hou/normalize.hpp"

namespace hou {

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::Succeed: return "Succeed";
    case Rule::NormalizeAlphaEta: return "Normalize_ae";
    case Rule::NormalizeBeta: return "Normalize_b";
    case Rule::Dereference: return "Dereference";
    case Rule::Fail: return "Fail";
    case Rule::Delete: return "Delete";
    case Rule::OracleSucc: return "OracleSucc";
    case Rule::OracleFail: return "OracleFail";
    case Rule::Decompose: return "Decompose";
    case Rule::Bind: return "Bind";
  }
  return "?";
}

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Running: return "running";
    case SolveStatus::Exhausted: return "exhausted";
    case SolveStatus::NonUnifiable: return "non-unifiable";
    case SolveStatus::Budget: return "budget";
  }
  return "?";
}

UnifState initial_state(std::span<const Constraint> problem) {
  UnifState st;
  for (const Constraint& c : problem) {
    if (c.lhs.type() != c.rhs.type()) throw TypeMismatch("constraint sides have different types");
    Goal g;
    g.lhs = c.lhs;
    g.rhs = c.rhs;
    g.seq = st.next_seq++;
    st.goals.push_back(std::move(g));
  }
  return st;
}

std::optional<std::size_t> select_goal(const UnifState& st, bool preunify) {
  std::optional<std::size_t> best;
  int best_cls = 3;
  for (std::size_t i = 0; i < st.goals.size(); ++i) {
    const Goal& g = st.goals[i];
    int cls = static_cast<int>(classify(g, st.subst));
    if (preunify && cls == static_cast<int>(PairClass::FlexFlex)) continue;
    if (cls < best_cls || (cls == best_cls && g.seq < st.goals[*best].seq)) {
      best = i;
      best_cls = cls;
    }
  }
  return best;
}

bool verify_unifier(std::span<const Constraint> problem, const Substitution& sigma) {
  NormalizationExempt exempt;
  for (const Constraint& c : problem)
    if (eta_long_beta_normal(sigma.apply(c.lhs)) != eta_long_beta_normal(sigma.apply(c.rhs))) return false;
  return true;
}

namespace {

enum class AdvanceKind { Continue, Solved, Failed, Branch };

struct Advance {
  AdvanceKind kind;
  Rule rule;
  std::unique_ptr<ChildSource> children;
};

class VectorChildren final : public ChildSource {
 public:
  explicit VectorChildren(std::vector<UnifState> v) : items_(std::move(v)) {}
  std::optional<UnifState> next() override {
    if (pos_ >= items_.size()) return std::nullopt;
    return std::move(items_[pos_++]);
  }

 private:
  std::vector<UnifState> items_;
  std::size_t pos_ = 0;
};

class VectorSequence final : public BindingSequence {
 public:
  explicit VectorSequence(std::vector<BindingSpec> v) : items_(std::move(v)) {}
  std::optional<BindingSpec> next() override {
    if (pos_ >= items_.size()) return std::nullopt;
    return items_[pos_++];
  }

 private:
  std::vector<BindingSpec> items_;
  std::size_t pos_ = 0;
};

// Replaces goal i by the pairwise argument goals of two equal-headed sides.
void decompose_goal(UnifState& st, std::size_t i) {
  Goal g = std::move(st.goals[i]);
  st.goals.erase(st.goals.begin() + static_cast<std::ptrdiff_t>(i));
  Spine a = spine(g.lhs);
  Spine b = spine(g.rhs);
  for (std::size_t k = 0; k < a.args.size(); ++k) {
    Goal d;
    d.ctx = g.ctx;
    d.lhs = a.args[k];
    d.rhs = b.args[k];
    d.counters = g.counters;
    d.seq = st.next_seq++;
    st.goals.push_back(std::move(d));
  }
}

// Strips abstractions and eta-expands both sides down to base type.
void expand_goal(Goal& g) {
  std::vector<Type> extra = g.lhs.type().arg_types();
  std::size_t k = extra.size();
  for (Term* side : {&g.lhs, &g.rhs}) {
    Abstraction ab = strip_lams(*side);
    std::size_t b = ab.binders.size();
    std::size_t r = k - b;
    Term body = shift(ab.body, static_cast<std::int32_t>(r));
    std::vector<Term> vars;
    for (std::size_t j = 0; j < r; ++j) vars.push_back(Term::bound_var(static_cast<std::uint32_t>(r - 1 - j), extra[b + j]));
    *side = Term::apply(body, vars);
  }
  g.ctx.insert(g.ctx.end(), extra.begin(), extra.end());
}

// Entries of auxiliary variables that no goal mentions are unreachable: images
// never mention mapped variables and new goals only mention goal or fresh
// variables.
void drop_dead_entries(UnifState& st, std::span<const Term> problem_vars) {
  std::unordered_set<VarId> live;
  for (const Term& v : problem_vars) live.insert(v.var_id());
  for (const Goal& g : st.goals) {
    for (const Term* side : {&g.lhs, &g.rhs})
      for (const Term& v : free_vars(*side)) live.insert(v.var_id());
  }
  std::vector<Term> kept;
  bool dropped = false;
  for (const auto& [id, e] : st.subst.entries()) {
    if (live.count(id))
      kept.push_back(e.var);
    else
      dropped = true;
  }
  if (dropped) st.subst = st.subst.restrict(kept);
}

void bind_live(UnifState& st, const Substitution& rho, std::span<const Term> problem_vars) {
  drop_dead_entries(st, problem_vars);
  for (const auto& [id, e] : rho.entries()) st.subst.extend(e.var, e.image);
}

void remove_goal_and_bind(UnifState& st, std::size_t i, const Substitution& rho, std::span<const Term> problem_vars) {
  st.goals.erase(st.goals.begin() + static_cast<std::ptrdiff_t>(i));
  bind_live(st, rho, problem_vars);
}

}  // namespace

class Engine::Impl {
 public:
  static Advance advance(Engine& e, UnifState& st) {
    Advance a = advance_raw(e, st);
    ++e.stats_.steps;
    ++e.stats_.rules[static_cast<std::size_t>(a.rule)];
    if (e.cfg_.on_step) e.cfg_.on_step(a.rule, st);
    return a;
  }

  static void count_unifier(Engine& e) { ++e.stats_.unifiers; }

 private:
  static Advance cont(Rule r) { return {AdvanceKind::Continue, r, nullptr}; }
  static Advance failed(Rule r) { return {AdvanceKind::Failed, r, nullptr}; }

  static Advance advance_raw(Engine& e, UnifState& st) {
    NormalizationAudit audit;
    if (st.goals.empty()) return {AdvanceKind::Solved, Rule::Succeed, nullptr};
    auto sel = select_goal(st, e.cfg_.preunify);
    if (!sel) return {AdvanceKind::Solved, Rule::Succeed, nullptr};
    std::size_t i = *sel;
    Goal& g = st.goals[i];

    if (g.lhs.type().is_arrow()) {
      expand_goal(g);
      return cont(Rule::NormalizeAlphaEta);
    }
    if (head_of(g.lhs).is_lam() || head_of(g.rhs).is_lam()) {
      g.lhs = hnf(g.lhs);
      g.rhs = hnf(g.rhs);
      return cont(Rule::NormalizeBeta);
    }
    for (Term* side : {&g.lhs, &g.rhs}) {
      const Term& h = head_of(*side);
      if (!h.is_free_var()) continue;
      const Term* img = st.subst.lookup(h.var_id());
      if (!img) continue;
      *side = Term::apply(*img, spine(*side).args);
      return cont(Rule::Dereference);
    }

    const Term ha = head_of(g.lhs);
    const Term hb = head_of(g.rhs);
    bool fa = ha.is_free_var();
    bool fb = hb.is_free_var();
    if (!fa && !fb && ha != hb) return failed(Rule::Fail);
    if (g.lhs == g.rhs) {
      st.goals.erase(st.goals.begin() + static_cast<std::ptrdiff_t>(i));
      return cont(Rule::Delete);
    }

    if (fa || fb) {
      std::optional<Advance> o = consult(e, st, i);
      if (o) return std::move(*o);
    }

    if (!fa && !fb) {
      decompose_goal(st, i);
      return cont(Rule::Decompose);
    }

    std::optional<UnifState> decomposed;
    if (fa && fb && ha.var_id() == hb.var_id()) {
      decomposed = st;
      decompose_goal(*decomposed, i);
    }
    std::unique_ptr<BindingSequence> seq;
    if (e.cfg_.variant == Variant::Complete)
      seq = p_complete(ha, hb, e.universe_);
    else
      seq = std::make_unique<VectorSequence>(p_pragmatic(ha, hb, g.counters, e.cfg_.limits));
    Rule r = decomposed ? Rule::Decompose : Rule::Bind;
    return {AdvanceKind::Branch, r,
            std::make_unique<BindChildren>(e, st, i, std::move(decomposed), std::move(seq))};
  }

  static std::optional<Advance> apply_verdict(const Engine& e, OracleVerdict v, UnifState& st, std::size_t i) {
    if (v.kind == OracleVerdict::Kind::NotApplicable) return std::nullopt;
    if (v.kind == OracleVerdict::Kind::NotUnifiable || v.csu.empty()) return failed(Rule::OracleFail);
    if (v.csu.size() == 1) {
      remove_goal_and_bind(st, i, v.csu.front(), e.vars_);
      return cont(Rule::OracleSucc);
    }
    std::vector<UnifState> kids;
    for (const Substitution& rho : v.csu) {
      UnifState c = st;
      remove_goal_and_bind(c, i, rho, e.vars_);
      kids.push_back(std::move(c));
    }
    return Advance{AdvanceKind::Branch, Rule::OracleSucc, std::make_unique<VectorChildren>(std::move(kids))};
  }

  static std::optional<Advance> consult(Engine& e, UnifState& st, std::size_t i) {
    NormalizationExempt exempt;
    for (const auto& o : e.oracles_) {
      ++e.stats_.oracle_calls;
      if (auto a = apply_verdict(e, o->decide(st.goals[i], st.subst, e.supply_), st, i)) return a;
    }
    if (e.limit_) {
      ++e.stats_.oracle_calls;
      if (auto a = apply_verdict(e, e.limit_->decide(st.goals[i], st.subst, e.supply_), st, i)) return a;
    }
    return std::nullopt;
  }

  class BindChildren final : public ChildSource {
   public:
    BindChildren(Engine& e, const UnifState& parent, std::size_t goal, std::optional<UnifState> decomposed,
                 std::unique_ptr<BindingSequence> seq)
        : engine_(e), parent_(parent), goal_(goal), decomposed_(std::move(decomposed)), seq_(std::move(seq)) {}

    std::optional<UnifState> next() override {
      if (decomposed_) {
        std::optional<UnifState> d = std::move(decomposed_);
        decomposed_.reset();
        return d;
      }
      auto spec = seq_->next();
      if (!spec) return std::nullopt;
      Binding b = spec->materialize(engine_.supply_);
      UnifState c = parent_;
      bind_live(c, b.subst, engine_.vars_);
      if (engine_.cfg_.variant == Variant::Pragmatic)
        c.goals[goal_].counters = add_counters(c.goals[goal_].counters, binding_cost(*spec));
      return c;
    }

   private:
    Engine& engine_;
    UnifState parent_;
    std::size_t goal_;
    std::optional<UnifState> decomposed_;
    std::unique_ptr<BindingSequence> seq_;
  };
};

// ------------------------------------------------------------------ engine

namespace {

void collect_signature(const Term& t, std::vector<Type>& out) {
  switch (t.kind()) {
    case TermKind::FreeVar:
    case TermKind::Const: out.push_back(t.type()); return;
    case TermKind::App:
      collect_signature(t.fn(), out);
      collect_signature(t.arg(), out);
      return;
    case TermKind::Lam:
      out.push_back(t.binder_type());
      collect_signature(t.body(), out);
      return;
    default: return;
  }
}

}  // namespace

Engine::Engine(std::span<const Constraint> problem, EngineConfig cfg)
    : cfg_(std::move(cfg)), problem_(problem.begin(), problem.end()) {
  VarId limit = 0;
  std::vector<Type> sig;
  for (const Constraint& c : problem_) {
    collect_free_vars(c.lhs, vars_);
    collect_free_vars(c.rhs, vars_);
    collect_signature(c.lhs, sig);
    collect_signature(c.rhs, sig);
  }
  for (const Term& v : vars_) limit = std::max(limit, v.var_id() + 1);
  supply_.reserve_below(limit);
  supply_.reserve_below(cfg_.first_fresh);
  universe_ = std::make_shared<const std::vector<Type>>(type_universe(sig));
  for (const std::string& name : cfg_.oracles) {
    if (name == "limit") continue;
    oracles_.push_back(make_oracle(name, cfg_.limits));
  }
  if (cfg_.variant == Variant::Pragmatic) limit_ = make_oracle("limit", cfg_.limits);
  if (cfg_.pacing == 0) cfg_.pacing = 1;
}

Engine::~Engine() = default;

UnifState Engine::initial() const { return initial_state(problem_); }

StepOutcome Engine::step(const UnifState& st, std::size_t max_children) {
  UnifState copy = st;
  Advance a = Impl::advance(*this, copy);
  StepOutcome out{a.rule, StepOutcome::Kind::Children, {}, false};
  switch (a.kind) {
    case AdvanceKind::Solved:
      out.kind = StepOutcome::Kind::Solved;
      out.children.push_back(std::move(copy));
      break;
    case AdvanceKind::Failed: out.kind = StepOutcome::Kind::Failed; break;
    case AdvanceKind::Continue: out.children.push_back(std::move(copy)); break;
    case AdvanceKind::Branch:
      while (auto c = a.children->next()) {
        if (out.children.size() >= max_children) {
          out.truncated = true;
          break;
        }
        out.children.push_back(std::move(*c));
      }
      break;
  }
  return out;
}

// ----------------------------------------------------------------- streams

namespace {

class Dovetail final : public SubstStream {
 public:
  explicit Dovetail(std::unique_ptr<StreamSource> src) : src_(std::move(src)) {}

  StreamItem pull() override {
    if (cursor_ >= active_.size()) {
      cursor_ = 0;
      if (src_) {
        if (auto s = src_->next())
          active_.push_back(std::move(s));
        else
          src_.reset();
      }
      if (active_.empty()) return {};
    }
    StreamItem it = active_[cursor_]->pull();
    if (it.kind == StreamItem::Kind::End) {
      active_.erase(active_.begin() + static_cast<std::ptrdiff_t>(cursor_));
      return {StreamItem::Kind::Empty, {}};
    }
    ++cursor_;
    return it;
  }

 private:
  std::unique_ptr<StreamSource> src_;
  std::vector<std::unique_ptr<SubstStream>> active_;
  std::size_t cursor_ = 0;
};

class ListSource final : public StreamSource {
 public:
  explicit ListSource(std::vector<std::unique_ptr<SubstStream>> v) : items_(std::move(v)) {}
  std::unique_ptr<SubstStream> next() override {
    if (pos_ >= items_.size()) return nullptr;
    return std::move(items_[pos_++]);
  }

 private:
  std::vector<std::unique_ptr<SubstStream>> items_;
  std::size_t pos_ = 0;
};

class FiniteStream final : public SubstStream {
 public:
  explicit FiniteStream(std::vector<Substitution> v) : items_(std::move(v)) {}
  StreamItem pull() override {
    if (pos_ >= items_.size()) return {};
    return {StreamItem::Kind::Unifier, std::move(items_[pos_++])};
  }

 private:
  std::vector<Substitution> items_;
  std::size_t pos_ = 0;
};

class NodeStream final : public SubstStream {
 public:
  NodeStream(Engine& e, UnifState st) : engine_(e), state_(std::move(st)) {}

  StreamItem pull() override;

 private:
  Engine& engine_;
  UnifState state_;
  std::unique_ptr<SubstStream> delegate_;
  bool done_ = false;
};

class BranchSource final : public StreamSource {
 public:
  BranchSource(Engine& e, UnifState first, UnifState second, std::unique_ptr<ChildSource> rest)
      : engine_(e), rest_(std::move(rest)) {
    pending_.push_back(std::move(second));
    pending_.push_back(std::move(first));
  }
  std::unique_ptr<SubstStream> next() override {
    if (engine_.budget_exhausted()) return nullptr;
    if (!pending_.empty()) {
      UnifState s = std::move(pending_.back());
      pending_.pop_back();
      return node_stream(engine_, std::move(s));
    }
    if (!rest_) return nullptr;
    auto c = rest_->next();
    if (!c) {
      rest_.reset();
      return nullptr;
    }
    return node_stream(engine_, std::move(*c));
  }

 private:
  Engine& engine_;
  std::vector<UnifState> pending_;
  std::unique_ptr<ChildSource> rest_;
};

StreamItem NodeStream::pull() {
  if (delegate_) return delegate_->pull();
  if (done_) return {};
  for (std::uint32_t n = 0; n < engine_.config().pacing; ++n) {
    if (engine_.budget_exhausted()) {
      done_ = true;
      return {};
    }
    Advance a = Engine::Impl::advance(engine_, state_);
    switch (a.kind) {
      case AdvanceKind::Continue: continue;
      case AdvanceKind::Solved:
        done_ = true;
        return {StreamItem::Kind::Unifier, std::move(state_.subst)};
      case AdvanceKind::Failed:
        done_ = true;
        return {};
      case AdvanceKind::Branch: {
        auto c1 = a.children->next();
        if (!c1) {
          done_ = true;
          return {};
        }
        auto c2 = a.children->next();
        if (!c2) {
          state_ = std::move(*c1);
          continue;
        }
        delegate_ = dovetail(std::make_unique<BranchSource>(engine_, std::move(*c1), std::move(*c2),
                                                            std::move(a.children)));
        state_ = UnifState{};
        return {StreamItem::Kind::Empty, {}};
      }
    }
  }
  return {StreamItem::Kind::Empty, {}};
}

}  // namespace

std::unique_ptr<SubstStream> dovetail(std::unique_ptr<StreamSource> source) {
  return std::make_unique<Dovetail>(std::move(source));
}

std::unique_ptr<StreamSource> stream_list(std::vector<std::unique_ptr<SubstStream>> streams) {
  return std::make_unique<ListSource>(std::move(streams));
}

std::unique_ptr<SubstStream> finite_stream(std::vector<Substitution> items) {
  return std::make_unique<FiniteStream>(std::move(items));
}

std::unique_ptr<SubstStream> node_stream(Engine& engine, UnifState st) {
  return std::make_unique<NodeStream>(engine, std::move(st));
}

UnifierStream::UnifierStream(std::shared_ptr<Engine> engine, std::unique_ptr<SubstStream> root, std::vector<Term> vars)
    : engine_(std::move(engine)), root_(std::move(root)), vars_(std::move(vars)) {}
UnifierStream::UnifierStream(UnifierStream&&) noexcept = default;
UnifierStream& UnifierStream::operator=(UnifierStream&&) noexcept = default;
UnifierStream::~UnifierStream() {
  root_.reset();  // nodes reference the engine
}

StreamItem UnifierStream::pull() {
  if (ended_) return {};
  ++pulls_;
  StreamItem it = root_->pull();
  if (it.kind == StreamItem::Kind::End) {
    ended_ = true;
  } else if (it.kind == StreamItem::Kind::Unifier) {
    NormalizationExempt exempt;
    it.unifier = it.unifier.restrict(vars_).normalized();
    Engine::Impl::count_unifier(*engine_);
  }
  return it;
}

std::optional<Substitution> UnifierStream::next_unifier(std::uint64_t max_pulls) {
  for (std::uint64_t n = 0; n < max_pulls; ++n) {
    StreamItem it = pull();
    if (it.kind == StreamItem::Kind::Unifier) return std::move(it.unifier);
    if (it.kind == StreamItem::Kind::End) return std::nullopt;
  }
  return std::nullopt;
}

SolveStatus UnifierStream::status() const {
  if (!ended_) return SolveStatus::Running;
  if (engine_->budget_exhausted()) return SolveStatus::Budget;
  return engine_->stats().unifiers > 0 ? SolveStatus::Exhausted : SolveStatus::NonUnifiable;
}

const EngineStats& UnifierStream::stats() const { return engine_->stats(); }

UnifierStream solve(std::span<const Constraint> problem, EngineConfig cfg) {
  auto engine = std::make_shared<Engine>(problem, std::move(cfg));
  auto root = node_stream(*engine, engine->initial());
  std::vector<Term> vars = engine->problem_vars();
  return UnifierStream(std::move(engine), std::move(root), std::move(vars));
}

}  // namespace hou
