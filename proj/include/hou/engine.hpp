#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hou/goal.hpp"
#include "hou/oracles.hpp"
#include "hou/substitution.hpp"

namespace hou {

enum class Variant : std::uint8_t { Complete, Pragmatic };

enum class Rule : std::uint8_t {
  Succeed,
  NormalizeAlphaEta,
  NormalizeBeta,
  Dereference,
  Fail,
  Delete,
  OracleSucc,
  OracleFail,
  Decompose,
  Bind,
};
inline constexpr std::size_t kRuleCount = 10;
const char* rule_name(Rule r);

struct UnifState {
  std::vector<Goal> goals;
  // Idempotent; applied to the goals lazily, one head at a time.
  Substitution subst;
  std::uint64_t next_seq = 0;
};

struct EngineConfig {
  Variant variant = Variant::Complete;
  // Consulted in this order; the first conclusive verdict is used.
  std::vector<std::string> oracles = {"pattern", "fixpoint", "solid"};
  Limits limits;
  std::uint64_t max_steps = 100000;
  // Engine steps between empty markers.
  std::uint32_t pacing = 8;
  // Never select flex-flex goals; stop once only those remain.
  bool preunify = false;
  // Fresh variable ids start at or above this; ids of declared but unused
  // problem variables stay free for the caller.
  VarId first_fresh = 0;
  // Called after every transition with the rule and the resulting state.
  std::function<void(Rule, const UnifState&)> on_step;
};

struct EngineStats {
  std::uint64_t steps = 0;
  std::array<std::uint64_t, kRuleCount> rules{};
  std::uint64_t oracle_calls = 0;
  std::uint64_t unifiers = 0;

  std::uint64_t count(Rule r) const { return rules[static_cast<std::size_t>(r)]; }
};

UnifState initial_state(std::span<const Constraint> problem);

// Goal chosen by the priority rigid-rigid < flex-rigid < flex-flex, ties by
// lowest sequence number; nullopt when nothing is selectable.
std::optional<std::size_t> select_goal(const UnifState& st, bool preunify = false);

struct StepOutcome {
  enum class Kind : std::uint8_t { Solved, Failed, Children };
  Rule rule;
  Kind kind;
  std::vector<UnifState> children;
  // Children beyond the cap of an infinitely branching Bind were dropped.
  bool truncated = false;
};

class Engine;

// Stream of subsingletons: each pull yields a unifier, an empty pacing marker
// or the end of the stream.
struct StreamItem {
  enum class Kind : std::uint8_t { Unifier, Empty, End };
  Kind kind = Kind::End;
  Substitution unifier;
};

class SubstStream {
 public:
  virtual ~SubstStream() = default;
  virtual StreamItem pull() = 0;
};

// Lazy sequence of streams; nullptr marks its end.
class StreamSource {
 public:
  virtual ~StreamSource() = default;
  virtual std::unique_ptr<SubstStream> next() = 0;
};

// Triangular interleaving: round r pulls a new stream from the source, then
// pulls every active stream once. Exhausted streams are dropped.
std::unique_ptr<SubstStream> dovetail(std::unique_ptr<StreamSource> source);
std::unique_ptr<StreamSource> stream_list(std::vector<std::unique_ptr<SubstStream>> streams);
std::unique_ptr<SubstStream> finite_stream(std::vector<Substitution> items);

enum class SolveStatus : std::uint8_t { Running, Exhausted, NonUnifiable, Budget };
const char* status_name(SolveStatus s);

class UnifierStream {
 public:
  UnifierStream(UnifierStream&&) noexcept;
  UnifierStream& operator=(UnifierStream&&) noexcept;
  ~UnifierStream();

  StreamItem pull();
  // Pulls until a unifier appears, the stream ends, or max_pulls is reached.
  std::optional<Substitution> next_unifier(std::uint64_t max_pulls = std::numeric_limits<std::uint64_t>::max());
  SolveStatus status() const;
  const EngineStats& stats() const;
  std::uint64_t pulls() const { return pulls_; }

 private:
  friend UnifierStream solve(std::span<const Constraint>, EngineConfig);
  UnifierStream(std::shared_ptr<Engine> engine, std::unique_ptr<SubstStream> root, std::vector<Term> vars);

  std::shared_ptr<Engine> engine_;
  std::unique_ptr<SubstStream> root_;
  std::vector<Term> vars_;
  std::uint64_t pulls_ = 0;
  bool ended_ = false;
};

// Emitted unifiers map only the problem's variables; images are eta-long
// beta-normal and may contain auxiliary variables.
UnifierStream solve(std::span<const Constraint> problem, EngineConfig cfg = {});

// Search context of one solve call: configuration, fresh supply, oracles.
class Engine {
 public:
  Engine(std::span<const Constraint> problem, EngineConfig cfg);
  ~Engine();

  const EngineConfig& config() const { return cfg_; }
  FreshSupply& supply() { return supply_; }
  const EngineStats& stats() const { return stats_; }
  bool budget_exhausted() const { return stats_.steps >= cfg_.max_steps; }
  UnifState initial() const;
  const std::vector<Term>& problem_vars() const { return vars_; }

  // One transition on a copy of st. Bind children are capped at max_children.
  StepOutcome step(const UnifState& st, std::size_t max_children = 64);

  class Impl;

 private:
  friend class Impl;
  EngineConfig cfg_;
  std::vector<Constraint> problem_;
  std::vector<Term> vars_;
  FreshSupply supply_;
  EngineStats stats_;
  std::vector<std::unique_ptr<Oracle>> oracles_;
  std::unique_ptr<Oracle> limit_;
  std::shared_ptr<const std::vector<Type>> universe_;
};

// Lazily enumerated children of a branching transition.
class ChildSource {
 public:
  virtual ~ChildSource() = default;
  virtual std::optional<UnifState> next() = 0;
};

// Root stream for a state; uses the engine's budget and pacing.
std::unique_ptr<SubstStream> node_stream(Engine& engine, UnifState st);

// True iff sigma(s) and sigma(t) have identical canonical forms for every
// constraint.
bool verify_unifier(std::span<const Constraint> problem, const Substitution& sigma);

}  // namespace hou
