#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hou/goal.hpp"
#include "hou/substitution.hpp"
#include "hou/term.hpp"

namespace hou {

struct OracleVerdict {
  enum class Kind : std::uint8_t { Success, NotUnifiable, NotApplicable };
  Kind kind = Kind::NotApplicable;
  // Success only: a finite CSU of sigma(lhs) =? sigma(rhs). Elements map only
  // variables of that problem; fresh variables in images are auxiliary.
  std::vector<Substitution> csu;

  static OracleVerdict success(std::vector<Substitution> csu) { return {Kind::Success, std::move(csu)}; }
  static OracleVerdict not_unifiable() { return {Kind::NotUnifiable, {}}; }
  static OracleVerdict not_applicable() { return {Kind::NotApplicable, {}}; }
  bool applicable() const { return kind != Kind::NotApplicable; }
};

const char* verdict_name(OracleVerdict::Kind k);

// Oracles decide lambda ctx. lhs =? lambda ctx. rhs under the lazily applied
// substitution sigma. sigma itself is never modified.
class Oracle {
 public:
  virtual ~Oracle() = default;
  virtual std::string_view name() const = 0;
  virtual OracleVerdict decide(const Goal& goal, const Substitution& sigma, FreshSupply& supply) const = 0;
};

OracleVerdict fixpoint_oracle(const Goal& goal, const Substitution& sigma, FreshSupply& supply);
OracleVerdict pattern_oracle(const Goal& goal, const Substitution& sigma, FreshSupply& supply);
OracleVerdict solid_oracle(const Goal& goal, const Substitution& sigma, FreshSupply& supply);
// Pragmatic variant only: fires once every limited binding is blocked.
OracleVerdict limit_oracle(const Goal& goal, const Substitution& sigma, const Limits& limits, FreshSupply& supply);

// Closed-term conveniences with an empty substitution.
Goal make_goal(const Term& lhs, const Term& rhs);
OracleVerdict fixpoint_oracle(const Term& s, const Term& t, FreshSupply& supply);
OracleVerdict pattern_oracle(const Term& s, const Term& t, FreshSupply& supply);
OracleVerdict solid_oracle(const Term& s, const Term& t, FreshSupply& supply);

// Names: "pattern", "fixpoint", "solid", "limit". Throws std::invalid_argument
// for unknown names.
std::unique_ptr<Oracle> make_oracle(std::string_view name, const Limits& limits = {});
std::vector<std::string> oracle_names();

// Fragment predicates on eta-long beta-normal terms.
bool is_pattern(const Term& t);
bool is_solid(const Term& t);
bool is_linear(const Term& t);

// Index of the bound variable an argument eta-reduces to, if any.
std::optional<std::uint32_t> as_bound_var_eta(const Term& arg);

// Solid fragment: the PT transformation system.
struct PTConstraint {
  std::vector<Type> ctx;
  Term lhs;  // bodies in eta-long beta-normal form under ctx
  Term rhs;
  bool base_projection_descendant = false;
};

struct PTState {
  std::vector<PTConstraint> constraints;
  Substitution theta;
};

enum class PTRule : std::uint8_t { Deletion, Decomposition, Failure, Solution, Imitation, Projection, Preunified };

const char* pt_rule_name(PTRule r);

struct PTStepResult {
  PTRule rule;
  std::size_t selected = 0;
  // Empty for Failure; the unchanged state for Preunified.
  std::vector<PTState> children;
  // Rule producing each child; differs from `rule` only for flex-rigid steps.
  std::vector<PTRule> child_rules;
};

// Index of the constraint chosen by the admissible selection, or nullopt when
// only flex-flex constraints remain.
std::optional<std::size_t> admissible_select(const PTState& st);
PTStepResult pt_step(const PTState& st, FreshSupply& supply);

struct PTResult {
  // Preunifiers with their flex-flex residues, in branch order.
  std::vector<PTState> leaves;
  std::uint64_t transitions = 0;
  bool exceeded = false;
};

PTResult run_pt(PTState initial, FreshSupply& supply, std::uint64_t max_transitions = 1000000);

// Canonical constraint lambda ctx. lhs =? lambda ctx. rhs: both bodies in
// eta-long beta-normal form with the shared binder prefix moved into ctx.
PTConstraint make_pt_constraint(std::vector<Type> ctx, const Term& lhs, const Term& rhs);

// CSU of s =? t for closed solid terms with t ground.
std::vector<Substitution> solid_match(const Term& s, const Term& t, FreshSupply& supply);
// MGUs of solid flex-flex pairs lambda ctx. F ss =? lambda ctx. F' ss'.
Substitution solid_flexflex_same(std::span<const Type> ctx, const Term& F, std::span<const Term> ss,
                                 std::span<const Term> ss2, FreshSupply& supply);
Substitution solid_flexflex_diff(std::span<const Type> ctx, const Term& F, std::span<const Term> ss, const Term& F2,
                                 std::span<const Term> ss2, FreshSupply& supply);

}  // namespace hou
