#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "hou/type.hpp"

namespace hou {

using VarId = std::uint32_t;

enum class TermKind : std::uint8_t { FreeVar, BoundVar, Const, App, Lam };

// Tag carried by free variables; restricts which bindings the engine applies.
enum class VarSort : std::uint8_t { Plain, Identification, Elimination };

// Simply typed lambda term with de Bruijn bound variables (index 0 is the
// innermost enclosing binder). Nodes are immutable and shared.
class Term {
 public:
  Term() = default;

  static Term free_var(VarId id, Type type, VarSort sort = VarSort::Plain);
  static Term bound_var(std::uint32_t index, Type type);
  static Term constant(SymbolId id, Type type);
  // Throws IllTyped when fn is not an arrow or the domain differs from arg's type.
  static Term app(Term fn, Term arg);
  static Term apply(Term head, std::span<const Term> args);
  static Term lam(Type binder, Term body);
  // binders[0] is the outermost abstraction.
  static Term lams(std::span<const Type> binders, Term body);

  bool valid() const { return node_ != nullptr; }
  TermKind kind() const;
  const Type& type() const;

  bool is_free_var() const { return kind() == TermKind::FreeVar; }
  bool is_bound_var() const { return kind() == TermKind::BoundVar; }
  bool is_const() const { return kind() == TermKind::Const; }
  bool is_app() const { return kind() == TermKind::App; }
  bool is_lam() const { return kind() == TermKind::Lam; }

  VarId var_id() const;
  VarSort sort() const;
  std::uint32_t bound_index() const;
  SymbolId const_id() const;

  const Term& fn() const;
  const Term& arg() const;
  const Term& body() const;
  const Type& binder_type() const;

  std::size_t hash() const;
  // size(F) = size(x) = size(f) = 1, size(s t) = size(s) + size(t),
  // size(lambda x. s) = size(s) + 1.
  std::size_t size() const;
  // One more than the largest loose de Bruijn index; zero for closed terms.
  std::uint32_t loose_bound() const;
  bool closed() const { return loose_bound() == 0; }
  // Bloom filter over the ids of free variables occurring in the term.
  std::uint64_t var_bloom() const;
  bool ground() const { return var_bloom() == 0; }
  bool may_contain_var(VarId id) const;

  const void* identity() const { return node_.get(); }

  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct TermHash {
  std::size_t operator()(const Term& t) const { return t.hash(); }
};

inline std::uint64_t var_bloom_bit(VarId id) { return std::uint64_t{1} << ((id * 0x9E3779B1u) >> 26); }

// Head and arguments of an application spine; the head is never an App.
struct Spine {
  Term head;
  std::vector<Term> args;
};
Spine spine(const Term& t);
const Term& head_of(const Term& t);
std::size_t spine_length(const Term& t);

// Splits leading abstractions: t = lambdas(binders, body) with body not a Lam.
struct Abstraction {
  std::vector<Type> binders;
  Term body;
};
Abstraction strip_lams(const Term& t);

// Adds delta to every loose index >= cutoff.
Term shift(const Term& t, std::int32_t delta, std::uint32_t cutoff = 0);
// Beta contraction helper: replaces index 0 of body by value and lowers the
// remaining loose indices by one.
Term instantiate(const Term& body, const Term& value);
// Simultaneous contraction of values.size() binders around body; the
// outermost binder receives values[0].
Term instantiate_many(const Term& body, std::span<const Term> values);

bool occurs(VarId id, const Term& t);
void collect_free_vars(const Term& t, std::vector<Term>& out);
std::vector<Term> free_vars(const Term& t);
// One more than the largest free variable id; zero when there are none.
VarId var_id_limit(const Term& t);

// Caps the nodes visited by substitution, shifting and normalization on this
// thread while in scope; overrunning throws WorkBudgetExceeded. Nested scopes
// draw from the enclosing budget.
class WorkBudget {
 public:
  explicit WorkBudget(std::uint64_t nodes);
  ~WorkBudget();
  WorkBudget(const WorkBudget&) = delete;
  WorkBudget& operator=(const WorkBudget&) = delete;

 private:
  std::int64_t saved_;
  std::int64_t granted_;
};

namespace detail {
// Remaining visits; negative when no budget is active.
extern thread_local std::int64_t g_work_fuel;
[[noreturn]] void work_exhausted();
inline void spend_work() {
  if (g_work_fuel >= 0 && --g_work_fuel < 0) work_exhausted();
}
}  // namespace detail

}  // namespace hou
