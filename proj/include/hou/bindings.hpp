#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "hou/goal.hpp"
#include "hou/substitution.hpp"
#include "hou/term.hpp"

namespace hou {

enum class BindingKind : std::uint8_t { JPProjection, HuetProjection, Imitation, Elimination, Identification, Iteration };

const char* binding_kind_name(BindingKind k);

struct Binding {
  BindingKind kind;
  Substitution subst;
  std::vector<Term> fresh;
  // Projections only: the projected argument has functional type.
  bool functional = false;
  // Eliminations only: number of removed arguments.
  std::uint32_t removed = 0;
};

// Argument indices are 1-based, following the binding schemas.
std::optional<Binding> jp_projection(const Term& F, std::size_t i);
std::vector<Binding> jp_projections(const Term& F);
std::optional<Binding> huet_projection(const Term& F, std::size_t i, FreshSupply& supply);
std::optional<Binding> imitation(const Term& F, const Term& g, FreshSupply& supply);
// Throws InvalidState unless keep is strictly increasing, within 1..n and
// shorter than n.
Binding elimination(const Term& F, std::span<const std::uint32_t> keep, FreshSupply& supply);
// Throws InvalidState when F and G coincide or their result types differ.
Binding identification(const Term& F, const Term& G, FreshSupply& supply);
std::optional<Binding> iteration(const Term& F, std::size_t i, std::span<const Type> ytypes, FreshSupply& supply);

// Unmaterialized binding: fresh variables are drawn only when the binding is
// actually applied.
struct BindingSpec {
  BindingKind kind;
  Term target;
  Term other;  // identification partner or imitated constant
  std::uint32_t index = 0;
  std::vector<std::uint32_t> keep;
  std::vector<Type> ytypes;
  bool functional = false;
  std::uint32_t removed = 0;

  Binding materialize(FreshSupply& supply) const;
};

// The cost a pragmatic binding charges against the limits.
Counters binding_cost(const BindingSpec& spec);
// Simple projections are never limited.
bool is_limited(const BindingSpec& spec);
bool within_limits(const Counters& used, const Counters& cost, const Limits& limits);
Counters add_counters(const Counters& a, const Counters& b);

class BindingSequence {
 public:
  virtual ~BindingSequence() = default;
  virtual std::optional<BindingSpec> next() = 0;
};

// Ordered tuples over a finite type universe by (length, total size); the
// sequence is infinite whenever the universe is nonempty.
class TypeTupleEnumerator {
 public:
  explicit TypeTupleEnumerator(std::vector<Type> universe);
  // Empty once every tuple has been produced (only for an empty universe).
  std::optional<std::vector<Type>> next();

 private:
  void fill_length(std::size_t len);
  std::vector<Type> universe_;
  std::vector<std::vector<Type>> bucket_;
  std::size_t pos_ = 0;
  std::size_t len_ = 0;
};

// All types occurring in the given types, including every subtype, sorted.
std::vector<Type> type_universe(std::span<const Type> roots);

// Heads are the (dereferenced, unmapped) heads of the two bodies.
std::unique_ptr<BindingSequence> p_complete(const Term& lhs_head, const Term& rhs_head,
                                            std::shared_ptr<const std::vector<Type>> universe);
// Unfiltered pragmatic binding set in application order; no limits applied.
std::vector<BindingSpec> p_pragmatic_unfiltered(const Term& lhs_head, const Term& rhs_head);
// The pragmatic set after dropping bindings that would exceed the limits.
std::vector<BindingSpec> p_pragmatic(const Term& lhs_head, const Term& rhs_head, const Counters& used,
                                     const Limits& limits);

}  // namespace hou
