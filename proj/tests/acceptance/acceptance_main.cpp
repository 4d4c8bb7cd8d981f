// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "hou/engine.hpp"
#include "hou/fingerprint.hpp"
#include "hou/index_check.hpp"
#include "hou/normalize.hpp"
#include "hou/oracles.hpp"
#include "hou/problem_io.hpp"
#include "test_support.hpp"

namespace {

using namespace hou;
using Clock = std::chrono::steady_clock;

// Pinned tolerances.
constexpr double kExampleSeconds = 1.0;
constexpr double kScalingResidual = 0.05;
constexpr double kSoundnessSeconds = 300.0;
constexpr double kMinFilterRatio = 0.20;
constexpr std::size_t kDivergentUnifiers = 4;
constexpr std::uint64_t kDivergentPulls = 10000;
constexpr std::uint64_t kFairnessPulls = 500;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

ProblemFile load(const char* name) { return read_problem_file(std::string(HOU_TEST_DATA) + "/" + name); }

EngineConfig config_for(const ProblemFile& pf, Variant v, std::vector<std::string> oracles) {
  EngineConfig cfg;
  cfg.variant = v;
  cfg.oracles = std::move(oracles);
  cfg.first_fresh = static_cast<VarId>(pf.sig.vars.size());
  return cfg;
}

struct Result {
  bool pass;
  std::string detail;
};

Result c1_fixpoint() {
  ProblemFile pf = load("occurs.hou");
  auto t0 = Clock::now();
  UnifierStream st = solve(pf.goals, config_for(pf, Variant::Pragmatic, {"fixpoint"}));
  bool none = !st.next_unifier();
  SolveStatus status = st.status();
  double secs = seconds_since(t0);

  UnifierStream bare = solve(pf.goals, config_for(pf, Variant::Pragmatic, {}));
  while (bare.next_unifier()) {
  }
  SolveStatus bare_status = bare.status();
  bool pass = none && status == SolveStatus::NonUnifiable && secs < kExampleSeconds &&
              (bare_status == SolveStatus::Exhausted || bare_status == SolveStatus::NonUnifiable);
  char buf[160];
  std::snprintf(buf, sizeof buf, "fixpoint: %s in %.4fs; pragmatic without oracles: %s", status_name(status), secs,
                status_name(bare_status));
  return {pass, buf};
}

Result c2_two_unifiers() {
  ProblemFile pf = load("two_unifiers.hou");
  auto t0 = Clock::now();
  UnifierStream st = solve(pf.goals, config_for(pf, Variant::Complete, {"pattern", "fixpoint", "solid"}));
  std::vector<std::string> printed;
  bool verified = true;
  while (printed.size() < 10) {
    auto u = st.next_unifier();
    if (!u) break;
    verified = verified && verify_unifier(pf.goals, *u);
    printed.push_back(print_unifier(*u, pf));
  }
  double secs = seconds_since(t0);
  std::vector<std::string> expected{"F -> \\x1:i. H_1\n", "G -> \\x1:i. b\n"};
  std::vector<std::string> sorted = printed;
  std::sort(sorted.begin(), sorted.end());
  bool pass = verified && sorted == expected && st.status() == SolveStatus::Exhausted && secs < kExampleSeconds;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu unifiers, status %s, %.4fs", printed.size(), status_name(st.status()), secs);
  return {pass, buf};
}

struct ScalingRun {
  int decomposes_to_flex = -1;
  std::uint64_t steps = 0;
  bool solved = false;
};

ScalingRun hk_run(int k) {
  std::string text = "tp i. const a : i. const b : i. const h : i > i. var F : i > i. var G : i > i.\nunify: ";
  std::string l = "F a", r = "G b";
  for (int n = 0; n < k; ++n) {
    l = "h (" + l + ")";
    r = "h (" + r + ")";
  }
  ProblemFile pf = parse_problem(text + l + " =?= " + r + ".");
  Term flex_l = parse_term("F a", pf.sig);
  Term flex_r = parse_term("G b", pf.sig);
  ScalingRun out;
  int decomposes = 0;
  EngineConfig cfg = config_for(pf, Variant::Pragmatic, {"pattern", "fixpoint", "solid"});
  cfg.on_step = [&](Rule rule, const UnifState& s) {
    if (rule == Rule::Decompose) ++decomposes;
    if (out.decomposes_to_flex >= 0) return;
    for (const Goal& g : s.goals) {
      if (g.lhs == flex_l && g.rhs == flex_r) out.decomposes_to_flex = decomposes;
    }
  };
  UnifierStream st = solve(pf.goals, cfg);
  auto u = st.next_unifier();
  out.solved = u && verify_unifier(pf.goals, *u);
  while (st.next_unifier()) {
  }
  out.steps = st.stats().steps;
  return out;
}

Result c3_scaling() {
  const int ks[] = {25, 50, 100};
  std::vector<double> xs, ys;
  ScalingRun r100;
  bool solved = true;
  for (int k : ks) {
    ScalingRun r = hk_run(k);
    solved = solved && r.solved;
    xs.push_back(k);
    ys.push_back(static_cast<double>(r.steps));
    if (k == 100) r100 = r;
  }
  // Least-squares line through (k, steps).
  double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  double icept = (sy - slope * sx) / n;
  double residual = 0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    residual = std::max(residual, std::abs(slope * xs[i] + icept - ys[i]) / ys[i]);
  bool pass = solved && r100.decomposes_to_flex == 100 && residual < kScalingResidual;
  char buf[200];
  std::snprintf(buf, sizeof buf, "decomposes to F a =?= G b: %d; steps %.0f/%.0f/%.0f; max relative residual %.4f",
                r100.decomposes_to_flex, ys[0], ys[1], ys[2], residual);
  return {pass, buf};
}

Result c4_solid_mgu() {
  ProblemFile pf = load("solid_mgu.hou");
  FreshSupply supply(static_cast<VarId>(pf.sig.vars.size()));
  OracleVerdict v = solid_oracle(pf.goals[0].lhs, pf.goals[0].rhs, supply);
  std::string expected = "F -> \\x1:i. g a (H_1 x1 x1 a)\nG -> \\x1:i. H_1 (f a) (f x1) x1\n";
  bool pass = v.kind == OracleVerdict::Kind::Success && v.csu.size() == 1 &&
              print_unifier(v.csu[0], pf) == expected && verify_unifier(pf.goals, v.csu[0]) &&
              testing::nbe_verify(pf.goals, v.csu[0]);
  std::string shown = v.csu.size() == 1 ? print_unifier(v.csu[0], pf) : "no single MGU";
  std::replace(shown.begin(), shown.end(), '\n', ';');
  return {pass, shown};
}

Result c5_fingerprints() {
  ProblemFile pf = load("index_fp.hou");
  auto positions = parse_positions("1,1.1.1,2");
  auto names = [&](SymbolId c) { return pf.sig.const_names[c]; };
  Fingerprint fg = fp_ho(parse_term(R"((\x:i > j. \y:i. x y) g)", pf.sig), positions);
  Fingerprint ff = fp_ho(parse_term("f", pf.sig), positions);
  std::string sg = format_fingerprint(fg, names);
  std::string sf = format_fingerprint(ff, names);
  bool pass = sg == "(db0, N, N)" && sf == "(db1, N, db0)" && !compatible_unif(fg, ff);
  return {pass, "fp_ho((\\x y. x y) g) = " + sg + ", fp_ho(f) = " + sf};
}

Result c6_soundness() {
  const auto& s = testing::test_sig();
  testing::TermGen gen(606);
  auto t0 = Clock::now();
  std::size_t unifiers = 0, failures = 0;
  for (int n = 0; n < 1000; ++n) {
    Constraint c = testing::random_problem(gen, 8, n % 4 == 0 ? 0.2 : 0.0);
    ProblemFile pf = testing::problem_over(s, {c});
    for (Variant v : {Variant::Complete, Variant::Pragmatic}) {
      EngineConfig cfg = config_for(pf, v, n % 2 ? std::vector<std::string>{} : oracle_names());
      cfg.max_steps = 2000;
      UnifierStream st = solve(pf.goals, cfg);
      for (int k = 0; k < 5; ++k) {
        auto u = st.next_unifier();
        if (!u) break;
        ++unifiers;
        if (!verify_unifier(pf.goals, *u) || !testing::nbe_verify(pf.goals, *u)) ++failures;
      }
    }
  }
  double secs = seconds_since(t0);
  char buf[160];
  std::snprintf(buf, sizeof buf, "1000 problems, %zu unifiers checked, %zu failures, %.2fs", unifiers, failures, secs);
  return {failures == 0 && unifiers > 0 && secs < kSoundnessSeconds, buf};
}

Result c7_index() {
  const auto& s = testing::test_sig();
  testing::TermGen gen(707);
  testing::GenOptions so, qo;
  so.vars = s.right_vars;
  qo.vars = s.left_vars;
  std::vector<Term> stored, queries;
  for (int n = 0; n < 500; ++n) stored.push_back(gen.term_retry(gen.chance(0.8) ? s.i : s.ii, so));
  for (int n = 0; n < 100; ++n) queries.push_back(gen.term_retry(gen.chance(0.8) ? s.i : s.ii, qo));
  FingerprintIndex index;
  for (std::size_t k = 0; k < stored.size(); ++k) index.insert(k, stored[k]);
  EngineConfig cfg;
  cfg.max_steps = 400;
  std::size_t pairs = 0, candidates = 0, confirmed_u = 0, confirmed_m = 0, misses = 0;
  for (const Term& q : queries) {
    std::vector<std::size_t> unif = index.retrieve_unifiable(q);
    std::vector<std::size_t> match = index.retrieve_matching(q);
    candidates += unif.size();
    for (std::size_t k = 0; k < stored.size(); ++k) {
      ++pairs;
      if (confirm_unifiable(q, stored[k], cfg, 200) == Confirmation::Yes) {
        ++confirmed_u;
        misses += !std::binary_search(unif.begin(), unif.end(), k);
      }
      if (confirm_matching(q, stored[k], cfg, 200) == Confirmation::Yes) {
        ++confirmed_m;
        misses += !std::binary_search(match.begin(), match.end(), k);
      }
    }
  }
  double ratio = 1.0 - static_cast<double>(candidates) / static_cast<double>(pairs);
  char buf[200];
  std::snprintf(buf, sizeof buf, "%zu pairs, %zu unifiable and %zu matchable confirmed, %zu misses, filter ratio %.3f",
                pairs, confirmed_u, confirmed_m, misses, ratio);
  return {misses == 0 && confirmed_u > 0 && ratio >= kMinFilterRatio, buf};
}

Result c8_oracle_agreement() {
  testing::TermGen gen(808);
  FreshSupply supply(1u << 20);
  std::size_t concluded = 0, disagreements = 0, inapplicable = 0;
  for (int kind = 0; kind < 2; ++kind) {
    for (int n = 0; n < 200; ++n) {
      Constraint c = kind ? testing::random_solid_problem(gen) : testing::random_pattern_problem(gen);
      OracleVerdict v = kind ? solid_oracle(c.lhs, c.rhs, supply) : pattern_oracle(c.lhs, c.rhs, supply);
      if (!v.applicable()) {
        ++inapplicable;
        continue;
      }
      EngineConfig cfg;
      cfg.oracles = {};
      cfg.max_steps = 1000;
      std::vector<Constraint> goals{c};
      UnifierStream st = solve(goals, cfg);
      bool found = st.next_unifier().has_value();
      if (!found && st.status() != SolveStatus::NonUnifiable) continue;
      ++concluded;
      disagreements += found != (v.kind == OracleVerdict::Kind::Success);
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "400 problems, engine concluded on %zu, %zu disagreements, %zu inapplicable",
                concluded, disagreements, inapplicable);
  return {disagreements == 0 && inapplicable == 0 && concluded > 0, buf};
}

Result c9_divergence() {
  ProblemFile pf = load("divergent.hou");
  UnifierStream st = solve(pf.goals, config_for(pf, Variant::Complete, oracle_names()));
  std::set<std::string> distinct;
  bool verified = true;
  while (distinct.size() < kDivergentUnifiers && st.pulls() < kDivergentPulls) {
    auto u = st.next_unifier(kDivergentPulls - st.pulls());
    if (!u) break;
    verified = verified && verify_unifier(pf.goals, *u);
    distinct.insert(print_unifier(*u, pf));
  }
  std::uint64_t pulls = st.pulls();

  UnifierStream prag = solve(pf.goals, config_for(pf, Variant::Pragmatic, oracle_names()));
  while (prag.next_unifier()) {
  }
  SolveStatus ps = prag.status();
  FreshSupply supply(static_cast<VarId>(pf.sig.vars.size()));
  bool solid_na = solid_oracle(pf.goals[0].lhs, pf.goals[0].rhs, supply).kind == OracleVerdict::Kind::NotApplicable;
  bool pass = verified && distinct.size() >= kDivergentUnifiers && pulls <= kDivergentPulls &&
              (ps == SolveStatus::Exhausted || ps == SolveStatus::NonUnifiable) && solid_na;
  char buf[200];
  std::snprintf(buf, sizeof buf, "%zu distinct unifiers in %llu pulls; pragmatic %s; solid %s", distinct.size(),
                static_cast<unsigned long long>(pulls), status_name(ps), solid_na ? "not applicable" : "applicable");
  return {pass, buf};
}

Result c10_fairness() {
  // Two branches with infinite search trees and no unifiers, then one
  // productive branch.
  const char* sig = "tp i. const a : i. const b : i. const f : i > i. var F : i > i. var G : i > i. var X : i.\n";
  const char* goals[] = {"unify: F (f a) =?= f (F b).", "unify: X =?= f X.", "unify: F (G a) =?= F b."};
  std::vector<ProblemFile> files;
  std::vector<std::unique_ptr<Engine>> engines;
  std::vector<std::unique_ptr<SubstStream>> branches;
  for (const char* g : goals) {
    files.push_back(parse_problem(std::string(sig) + g));
    EngineConfig cfg = config_for(files.back(), Variant::Complete, {});
    cfg.max_steps = 1u << 30;
    engines.push_back(std::make_unique<Engine>(files.back().goals, cfg));
    branches.push_back(node_stream(*engines.back(), engines.back()->initial()));
  }
  // Divergence of the first two branches in isolation.
  bool diverging = true;
  for (int b = 0; b < 2; ++b) {
    EngineConfig cfg = config_for(files[b], Variant::Complete, {});
    cfg.max_steps = 1u << 30;
    UnifierStream st = solve(files[b].goals, cfg);
    diverging = diverging && !st.next_unifier(500) && st.status() == SolveStatus::Running;
  }
  auto d = dovetail(stream_list(std::move(branches)));
  std::uint64_t pulls = 0;
  bool found = false;
  while (pulls < kFairnessPulls) {
    StreamItem it = d->pull();
    ++pulls;
    if (it.kind == StreamItem::Kind::End) break;
    if (it.kind == StreamItem::Kind::Unifier) {
      found = verify_unifier(files[2].goals, it.unifier);
      break;
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "branches 1-2 diverge: %s; productive unifier after %llu pulls",
                diverging ? "yes" : "no", static_cast<unsigned long long>(pulls));
  return {diverging && found, buf};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Result()> run;
  };
  const Criterion criteria[] = {
      {"C1 fixpoint refutation and pragmatic termination", c1_fixpoint},
      {"C2 complete variant yields exactly two unifiers", c2_two_unifiers},
      {"C3 linear decomposition of nested rigid heads", c3_scaling},
      {"C4 solid oracle MGU", c4_solid_mgu},
      {"C5 fingerprints at sampled positions", c5_fingerprints},
      {"C6 soundness on random problems", c6_soundness},
      {"C7 index has no false negatives", c7_index},
      {"C8 oracle verdicts agree with the complete engine", c8_oracle_agreement},
      {"C9 divergence control", c9_divergence},
      {"C10 fair enumeration across branches", c10_fairness},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    auto t0 = Clock::now();
    Result r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    failed += !r.pass;
    std::printf("%s %s (%.2fs): %s\n", r.pass ? "PASS" : "FAIL", c.name, seconds_since(t0), r.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
