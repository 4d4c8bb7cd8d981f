#include <gtest/gtest.h>

#include <algorithm>
#include <string>

#include "hou/engine.hpp"
#include "hou/normalize.hpp"
#include "hou/oracles.hpp"
#include "hou/problem_io.hpp"
#include "test_support.hpp"

namespace hou {
namespace {

using testing::test_sig;
using Kind = OracleVerdict::Kind;

class OracleTest : public ::testing::Test {
 protected:
  const testing::TestSig& s = test_sig();
  FreshSupply supply{1000};
  Term p(const char* text) const { return s.parse(text); }
  std::string show(const Substitution& sigma, const Term& l, const Term& r) const {
    return print_unifier(sigma, testing::problem_over(s, {{l, r}}));
  }
  static VarId vid(const Term& v) { return v.var_id(); }
};

// ---------------------------------------------------------------- fixpoint

TEST_F(OracleTest, FixpointRefutesRigidOccurrence) {
  EXPECT_EQ(fixpoint_oracle(p("X"), p("f X"), supply).kind, Kind::NotUnifiable);
  EXPECT_EQ(fixpoint_oracle(p("g X a"), p("X"), supply).kind, Kind::NotUnifiable);
}

TEST_F(OracleTest, FixpointSolvesWhenVariableIsAbsent) {
  OracleVerdict v = fixpoint_oracle(p("X"), p("g a b"), supply);
  ASSERT_EQ(v.kind, Kind::Success);
  ASSERT_EQ(v.csu.size(), 1u);
  EXPECT_EQ(*v.csu[0].lookup(vid(p("X"))), p("g a b"));
  OracleVerdict under = fixpoint_oracle(p(R"(\x:i. F x)"), p(R"(\x:i. g x a)"), supply);
  ASSERT_EQ(under.kind, Kind::Success);
  EXPECT_EQ(*under.csu[0].lookup(vid(p("F"))), p(R"(\x:i. g x a)"));
}

TEST_F(OracleTest, FixpointIsInapplicableBelowFlexHeads) {
  EXPECT_EQ(fixpoint_oracle(p("X"), p("f (K X)"), supply).kind, Kind::NotApplicable);
  EXPECT_EQ(fixpoint_oracle(p("F a"), p("b"), supply).kind, Kind::NotApplicable);
}

// ----------------------------------------------------------------- pattern

TEST_F(OracleTest, PatternFlexFlexDifferentHeads) {
  Term l = p(R"(\x:i. \y:i. F x)");
  Term r = p(R"(\x:i. \y:i. K y)");
  OracleVerdict v = pattern_oracle(l, r, supply);
  ASSERT_EQ(v.kind, Kind::Success);
  ASSERT_EQ(v.csu.size(), 1u);
  EXPECT_EQ(show(v.csu[0], l, r), "F -> \\x1:i. H_1\nK -> \\x1:i. H_1\n");
  EXPECT_TRUE(verify_unifier(std::vector<Constraint>{{l, r}}, v.csu[0]));
}

TEST_F(OracleTest, PatternOccursCheckFails) {
  EXPECT_EQ(pattern_oracle(p(R"(\x:i. F x)"), p(R"(\x:i. f (F x))"), supply).kind, Kind::NotUnifiable);
}

TEST_F(OracleTest, PatternRejectsNonBoundArguments) {
  EXPECT_EQ(pattern_oracle(p("F (f a)"), p("a"), supply).kind, Kind::NotApplicable);
  EXPECT_EQ(pattern_oracle(p(R"(\x:i. G x x)"), p(R"(\x:i. a)"), supply).kind, Kind::NotApplicable);
}

TEST_F(OracleTest, PatternFlexFlexSameHeadKeepsAgreeingArguments) {
  Term l = p(R"(\x:i. \y:i. G x y)");
  Term r = p(R"(\x:i. \y:i. G x x)");
  EXPECT_EQ(pattern_oracle(l, r, supply).kind, Kind::NotApplicable);
  Term swapped = p(R"(\x:i. \y:i. G y x)");
  OracleVerdict v = pattern_oracle(l, swapped, supply);
  ASSERT_EQ(v.kind, Kind::Success);
  EXPECT_EQ(show(v.csu[0], l, swapped), "G -> \\x1:i. \\x2:i. H_1\n");
  Term z = p(R"(\x:i. \y:i. G x (K y))");
  EXPECT_EQ(pattern_oracle(l, z, supply).kind, Kind::NotApplicable);
}

TEST_F(OracleTest, PatternFlexRigidPrunes) {
  Term l = p(R"(\x:i. \y:i. F x)");
  Term r = p(R"(\x:i. \y:i. g x (K y))");
  OracleVerdict v = pattern_oracle(l, r, supply);
  ASSERT_EQ(v.kind, Kind::Success);
  ASSERT_TRUE(verify_unifier(std::vector<Constraint>{{l, r}}, v.csu[0]));
  EXPECT_EQ(show(v.csu[0], l, r), "F -> \\x1:i. g x1 H_1\nK -> \\x1:i. H_1\n");
  // The bound variable y cannot escape into F.
  EXPECT_EQ(pattern_oracle(l, p(R"(\x:i. \y:i. g x y)"), supply).kind, Kind::NotUnifiable);
}

// --------------------------------------------------------------- fragments

TEST_F(OracleTest, SolidAndLinearPredicates) {
  EXPECT_TRUE(is_solid(p(R"(\x:i. G x x)")));
  EXPECT_FALSE(is_pattern(p(R"(\x:i. G x x)")));
  EXPECT_TRUE(is_linear(p(R"(\x:i. G x x)")));
  EXPECT_FALSE(is_solid(p("P F")));
  EXPECT_TRUE(is_solid(p("G a (g b (f a))")));
  EXPECT_FALSE(is_pattern(p("G a (g b (f a))")));
  EXPECT_FALSE(is_solid(p("F X")));
  EXPECT_TRUE(is_solid(eta_long_beta_normal(p(R"(\x:i > i. P x)"))));
  EXPECT_TRUE(is_pattern(eta_long_beta_normal(p(R"(\x:i > i. P x)"))));
  EXPECT_TRUE(is_linear(p("g (F a) (K b)")));
  EXPECT_FALSE(is_linear(p("g (F a) (F b)")));
}

TEST_F(OracleTest, EtaBoundArguments) {
  Term eta = eta_long_beta_normal(p(R"(\x:i > i. P x)"));
  // P (\y. x y): the argument eta-reduces to x.
  Term arg = spine(strip_lams(eta).body).args[0];
  EXPECT_EQ(as_bound_var_eta(arg), 0u);
  EXPECT_FALSE(as_bound_var_eta(p("a")));
}

// ---------------------------------------------------------------------- PT

PTState pt_state(std::vector<std::pair<Term, Term>> cs) {
  PTState st;
  for (auto& [l, r] : cs) st.constraints.push_back(make_pt_constraint({}, l, r));
  return st;
}

TEST_F(OracleTest, PtFailureOnRigidClash) {
  PTStepResult r = pt_step(pt_state({{p(R"(\x:i. f x)"), p(R"(\x:i. h x)")}}), supply);
  EXPECT_EQ(r.rule, PTRule::Failure);
  EXPECT_TRUE(r.children.empty());
}

TEST_F(OracleTest, PtSolutionBindsTheWholeSide) {
  PTStepResult r = pt_step(pt_state({{p(R"(\x:i. F x)"), p(R"(\x:i. f (g x a))")}}), supply);
  EXPECT_EQ(r.rule, PTRule::Solution);
  ASSERT_EQ(r.children.size(), 1u);
  EXPECT_EQ(*r.children[0].theta.lookup(vid(p("F"))), p(R"(\x:i. f (g x a))"));
  EXPECT_TRUE(r.children[0].constraints.empty());
}

TEST_F(OracleTest, PtImitationAndProjection) {
  PTStepResult r = pt_step(pt_state({{p("F a"), p("f b")}}), supply);
  ASSERT_EQ(r.children.size(), 2u);
  ASSERT_EQ(r.child_rules.size(), 2u);
  EXPECT_EQ(r.child_rules[0], PTRule::Imitation);
  EXPECT_EQ(r.child_rules[1], PTRule::Projection);
  Term img = *r.children[0].theta.lookup(vid(p("F")));
  Abstraction ab = strip_lams(img);
  ASSERT_EQ(ab.binders.size(), 1u);
  Spine sp = spine(ab.body);
  EXPECT_EQ(sp.head, p("f"));
  ASSERT_EQ(sp.args.size(), 1u);
  EXPECT_TRUE(head_of(sp.args[0]).is_free_var());
  EXPECT_EQ(*r.children[1].theta.lookup(vid(p("F"))), p(R"(\x:i. x)"));
  // Projection of a base-type argument tags the residue.
  ASSERT_EQ(r.children[1].constraints.size(), 1u);
  EXPECT_TRUE(r.children[1].constraints[0].base_projection_descendant);
}

TEST_F(OracleTest, PtDeletionAndDecomposition) {
  EXPECT_EQ(pt_step(pt_state({{p("f a"), p("f a")}}), supply).rule, PTRule::Deletion);
  PTStepResult d = pt_step(pt_state({{p("g a (F b)"), p("g a c")}}), supply);
  EXPECT_EQ(d.rule, PTRule::Decomposition);
  ASSERT_EQ(d.children.size(), 1u);
  EXPECT_EQ(d.children[0].constraints.size(), 2u);
}

TEST_F(OracleTest, AdmissibleSelectionPriorities) {
  PTState clash = pt_state({{p("F a"), p("K b")}, {p("f a"), p("h b")}});
  EXPECT_EQ(admissible_select(clash), 1u);
  PTState dec = pt_state({{p("F a"), p("K b")}, {p("f a"), p("f b")}});
  EXPECT_EQ(admissible_select(dec), 1u);
  PTState tagged = pt_state({{p("F a"), p("h b")}, {p("K a"), p("f b")}});
  tagged.constraints[1].base_projection_descendant = true;
  EXPECT_EQ(admissible_select(tagged), 1u);
  PTState ff = pt_state({{p("F a"), p("K b")}});
  EXPECT_FALSE(admissible_select(ff));
  EXPECT_EQ(pt_step(ff, supply).rule, PTRule::Preunified);
}

// ------------------------------------------------------------ solid match

std::vector<std::string> images(const std::vector<Substitution>& csu, const Term& v, const testing::TestSig& s) {
  std::vector<std::string> out;
  for (const Substitution& u : csu) {
    const Term* img = u.lookup(v.var_id());
    out.push_back(img ? s.show(eta_long_beta_normal(*img)) : "-");
  }
  return out;
}

TEST_F(OracleTest, SolidMatchingCsus) {
  auto single = solid_match(p("F (f a)"), p("a"), supply);
  EXPECT_EQ(images(single, p("F"), s), std::vector<std::string>{"\\x1:i. a"});
  auto two = images(solid_match(p("K a"), p("f a"), supply), p("K"), s);
  std::sort(two.begin(), two.end());
  EXPECT_EQ(two, (std::vector<std::string>{"\\x1:i. f a", "\\x1:i. f x1"}));
  auto trivial = solid_match(p("a"), p("a"), supply);
  ASSERT_EQ(trivial.size(), 1u);
  EXPECT_TRUE(trivial[0].empty());
  EXPECT_TRUE(solid_match(p("a"), p("b"), supply).empty());
}

// --------------------------------------------------------- flex-flex MGUs

TEST_F(OracleTest, SolidFlexFlexSameHead) {
  std::vector<Term> ab{p("a"), p("b")};
  std::vector<Term> ac{p("a"), p("c")};
  Substitution s1 = solid_flexflex_same({}, p("G"), ab, ac, supply);
  Term img = *s1.lookup(vid(p("G")));
  Abstraction a1 = strip_lams(img);
  ASSERT_EQ(a1.binders.size(), 2u);
  Spine sp = spine(a1.body);
  ASSERT_EQ(sp.args.size(), 1u);
  EXPECT_EQ(sp.args[0], Term::bound_var(1, s.i));
  std::vector<Term> a{p("a")};
  std::vector<Term> b{p("b")};
  Term keep_all = strip_lams(*solid_flexflex_same({}, p("F"), a, a, supply).lookup(vid(p("F")))).body;
  EXPECT_EQ(spine(keep_all).args.size(), 1u);
  Term keep_none = strip_lams(*solid_flexflex_same({}, p("F"), a, b, supply).lookup(vid(p("F")))).body;
  EXPECT_TRUE(keep_none.is_free_var());
}

TEST_F(OracleTest, SolidFlexFlexDifferentHeads) {
  std::vector<Term> fa{p("f a")};
  std::vector<Term> a{p("a")};
  Substitution mgu = solid_flexflex_diff({}, p("F"), fa, p("K"), a, supply);
  EXPECT_EQ(show(mgu, p("F (f a)"), p("K a")), "F -> \\x1:i. H_1 x1 x1 a\nK -> \\x1:i. H_1 (f a) (f x1) x1\n");
  EXPECT_TRUE(verify_unifier(std::vector<Constraint>{{p("F (f a)"), p("K a")}}, mgu));
  Substitution z = solid_flexflex_diff({}, p("X"), {}, p("Y"), {}, supply);
  EXPECT_EQ(*z.lookup(vid(p("X"))), *z.lookup(vid(p("Y"))));
  EXPECT_TRUE(z.lookup(vid(p("X")))->is_free_var());
}

// ------------------------------------------------------------ solid oracle

TEST_F(OracleTest, SolidOracleCombinesPartialSolutions) {
  Term l = p("F (f a)");
  Term r = p("g a (K a)");
  OracleVerdict v = solid_oracle(l, r, supply);
  ASSERT_EQ(v.kind, Kind::Success);
  ASSERT_EQ(v.csu.size(), 1u);
  EXPECT_EQ(show(v.csu[0], l, r), "F -> \\x1:i. g a (H_1 x1 x1 a)\nK -> \\x1:i. H_1 (f a) (f x1) x1\n");
  EXPECT_TRUE(verify_unifier(std::vector<Constraint>{{l, r}}, v.csu[0]));
}

TEST_F(OracleTest, SolidOracleRespectsItsPreconditions) {
  EXPECT_EQ(solid_oracle(p(R"(\x:i. F (f x))"), p(R"(\x:i. f (F x))"), supply).kind, Kind::NotApplicable);
  EXPECT_EQ(solid_oracle(p("F X"), p("K a"), supply).kind, Kind::NotApplicable);
  EXPECT_EQ(solid_oracle(p("g (F a) (F b)"), p("g (K a) (K b)"), supply).kind, Kind::NotApplicable);
  // Only the right side is linear: either orientation is accepted.
  OracleVerdict swapped = solid_oracle(p("g (K a) (K b)"), p("g (F a) c"), supply);
  EXPECT_EQ(swapped.kind, Kind::Success);
  EXPECT_EQ(solid_oracle(p("f (F a)"), p("h (K b)"), supply).kind, Kind::NotUnifiable);
}

TEST_F(OracleTest, RegistryNames) {
  EXPECT_EQ(oracle_names(), (std::vector<std::string>{"pattern", "fixpoint", "solid", "limit"}));
  for (const std::string& n : oracle_names()) EXPECT_EQ(make_oracle(n)->name(), n);
  EXPECT_THROW(make_oracle("nope"), std::invalid_argument);
}

TEST_F(OracleTest, RegistryOraclesDeclineOversizedWork) {
  // Shared as a graph, but 2^25 nodes once normalized.
  std::string text = "a";
  for (int k = 0; k < 24; ++k) text = R"((\x:i. g x x) ()" + text + ")";
  Goal g = make_goal(p("X"), p(text.c_str()));
  EXPECT_EQ(make_oracle("pattern")->decide(g, {}, supply).kind, Kind::NotApplicable);
  EXPECT_EQ(make_oracle("solid")->decide(g, {}, supply).kind, Kind::NotApplicable);
  Goal small = make_goal(p("X"), p(R"((\x:i. g x x) a)"));
  EXPECT_EQ(make_oracle("pattern")->decide(small, {}, supply).kind, Kind::Success);
}

// -------------------------------------------------------------- properties

using ClosedOracle = OracleVerdict (*)(const Term&, const Term&, FreshSupply&);
const ClosedOracle kClosedOracles[] = {&pattern_oracle, &solid_oracle, &fixpoint_oracle};

struct EngineVerdict {
  bool concluded = false;
  bool unifiable = false;
};

EngineVerdict engine_verdict(const std::vector<Constraint>& goals, std::uint64_t max_steps) {
  EngineConfig cfg;
  cfg.oracles = {};
  cfg.max_steps = max_steps;
  UnifierStream st = solve(goals, cfg);
  if (st.next_unifier()) return {true, true};
  if (st.status() == SolveStatus::NonUnifiable) return {true, false};
  return {};
}

TEST(OracleProperties, SuccessfulCsusVerify) {
  testing::TermGen gen(31);
  FreshSupply supply(1000);
  for (int n = 0; n < 300; ++n) {
    Constraint pc = testing::random_pattern_problem(gen);
    Constraint sc = testing::random_solid_problem(gen);
    for (const Constraint& c : {pc, sc}) {
      std::vector<Constraint> goals{c};
      for (ClosedOracle oracle : kClosedOracles) {
        OracleVerdict v = oracle(c.lhs, c.rhs, supply);
        for (const Substitution& u : v.csu) {
          ASSERT_TRUE(verify_unifier(goals, u));
          ASSERT_TRUE(testing::nbe_verify(goals, u));
          ASSERT_TRUE(u.is_idempotent());
        }
      }
    }
  }
}

TEST(OracleProperties, FragmentProblemsAreDecided) {
  testing::TermGen gen(32);
  FreshSupply supply(1000);
  for (int n = 0; n < 300; ++n) {
    Constraint pc = testing::random_pattern_problem(gen);
    ASSERT_TRUE(pattern_oracle(pc.lhs, pc.rhs, supply).applicable());
    Constraint sc = testing::random_solid_problem(gen);
    ASSERT_TRUE(solid_oracle(sc.lhs, sc.rhs, supply).applicable());
  }
}

TEST(OracleProperties, SolidMatchingIsGrounding) {
  testing::TermGen gen(33);
  const auto& s = test_sig();
  testing::GenOptions lo;
  lo.mode = testing::GenMode::Solid;
  lo.vars = s.left_vars;
  lo.max_size = 7;
  testing::GenOptions go;
  go.mode = testing::GenMode::Ground;
  go.max_size = 7;
  FreshSupply supply(1000);
  int nonempty = 0;
  for (int n = 0; n < 500; ++n) {
    Term l = eta_long_beta_normal(gen.term_retry(s.i, lo));
    if (!is_solid(l)) continue;
    Term r = eta_long_beta_normal(gen.term_retry(s.i, go));
    auto csu = solid_match(l, r, supply);
    nonempty += !csu.empty();
    std::vector<Constraint> goals{{l, r}};
    for (const Substitution& u : csu) {
      ASSERT_TRUE(verify_unifier(goals, u));
      for (const Term& v : free_vars(l)) {
        const Term* img = u.lookup(v.var_id());
        ASSERT_TRUE(img);
        ASSERT_TRUE(img->ground());
      }
    }
  }
  EXPECT_GT(nonempty, 0);
}

TEST(OracleProperties, PtTerminatesWellWithinTheInstrumentationBound) {
  testing::TermGen gen(34);
  FreshSupply supply(1000);
  std::uint64_t worst = 0;
  for (int n = 0; n < 500; ++n) {
    Constraint c = testing::random_solid_problem(gen);
    PTState st;
    st.constraints.push_back(make_pt_constraint({}, c.lhs, c.rhs));
    PTResult r = run_pt(st, supply, 1000000);
    ASSERT_FALSE(r.exceeded);
    worst = std::max(worst, r.transitions);
  }
  EXPECT_LT(worst, 1000000u);
}

// Replaces free variables by fresh constants of the same type.
Substitution freezer(const Substitution& theta) {
  Substitution out;
  for (const auto& [id, e] : theta.entries())
    for (const Term& v : free_vars(e.image))
      if (!out.maps(v.var_id())) out.set(v, Term::constant(5000 + v.var_id(), v.type()));
  return out;
}

// Solves the matching problems sigma(F) =? theta(F) with theta frozen.
EngineVerdict is_instance(const Substitution& theta, const Substitution& sigma, const std::vector<Term>& vars) {
  Substitution frozen = freezer(theta);
  std::vector<Constraint> goals;
  for (const Term& v : vars) {
    Term lhs = sigma.lookup(v.var_id()) ? *sigma.lookup(v.var_id()) : v;
    Term rhs = theta.lookup(v.var_id()) ? frozen.apply(*theta.lookup(v.var_id())) : frozen.apply(v);
    goals.push_back({lhs, rhs});
  }
  EngineConfig cfg;
  cfg.max_steps = 20000;
  UnifierStream st = solve(goals, cfg);
  if (st.next_unifier()) return {true, true};
  if (st.status() == SolveStatus::NonUnifiable) return {true, false};
  return {};
}

TEST(OracleProperties, SolidFlexFlexMguSubsumesEngineUnifiers) {
  testing::TermGen gen(35);
  int checked = 0;
  for (int n = 0; n < 400 && checked < 60; ++n) {
    Constraint c = testing::random_solid_problem(gen, 6);
    if (!head_of(strip_lams(c.lhs).body).is_free_var() || !head_of(strip_lams(c.rhs).body).is_free_var()) continue;
    FreshSupply supply(1000);
    OracleVerdict v = solid_oracle(c.lhs, c.rhs, supply);
    ASSERT_EQ(v.kind, Kind::Success);
    ASSERT_EQ(v.csu.size(), 1u);
    std::vector<Constraint> goals{c};
    std::vector<Term> vars = free_vars(c.lhs);
    collect_free_vars(c.rhs, vars);
    EngineConfig cfg;
    cfg.oracles = {};
    cfg.max_steps = 3000;
    UnifierStream st = solve(goals, cfg);
    for (int k = 0; k < 20; ++k) {
      auto theta = st.next_unifier();
      if (!theta) break;
      EngineVerdict inst = is_instance(*theta, v.csu[0], vars);
      ASSERT_FALSE(inst.concluded && !inst.unifiable) << test_sig().show(c.lhs) << " =?= " << test_sig().show(c.rhs);
      checked += inst.concluded;
    }
  }
  EXPECT_GT(checked, 20);
}

TEST(OracleProperties, VerdictsAgreeWithTheGenericEngine) {
  testing::TermGen gen(36);
  FreshSupply supply(1000);
  int concluded = 0;
  for (int n = 0; n < 100; ++n) {
    for (int kind = 0; kind < 2; ++kind) {
      Constraint c = kind ? testing::random_solid_problem(gen) : testing::random_pattern_problem(gen);
      OracleVerdict v = kind ? solid_oracle(c.lhs, c.rhs, supply) : pattern_oracle(c.lhs, c.rhs, supply);
      ASSERT_TRUE(v.applicable());
      EngineVerdict e = engine_verdict({c}, 3000);
      if (!e.concluded) continue;
      ++concluded;
      ASSERT_EQ(v.kind == Kind::Success, e.unifiable)
          << test_sig().show(c.lhs) << " =?= " << test_sig().show(c.rhs);
    }
  }
  EXPECT_GT(concluded, 100) << concluded;
}

TEST(OracleProperties, NotUnifiableIsNeverContradicted) {
  testing::TermGen gen(37);
  FreshSupply supply(1000);
  for (int n = 0; n < 400; ++n) {
    Constraint c = testing::random_problem(gen);
    for (ClosedOracle oracle : kClosedOracles) {
      OracleVerdict v = oracle(c.lhs, c.rhs, supply);
      if (v.kind != Kind::NotUnifiable) continue;
      EngineVerdict e = engine_verdict({c}, 2000);
      ASSERT_FALSE(e.concluded && e.unifiable) << test_sig().show(c.lhs) << " =?= " << test_sig().show(c.rhs);
    }
  }
}

}  // namespace
}  // namespace hou
