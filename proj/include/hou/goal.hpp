#pragma once

#include <cstdint>
#include <vector>

#include "hou/substitution.hpp"
#include "hou/term.hpp"

namespace hou {

// A unification constraint between two closed terms of equal type.
struct Constraint {
  Term lhs;
  Term rhs;
};

// Binding applications charged to a constraint by the pragmatic variant.
struct Counters {
  std::uint32_t total = 0;
  std::uint32_t func_proj = 0;
  std::uint32_t elim = 0;
  std::uint32_t imit = 0;
  std::uint32_t ident = 0;
};

struct Limits {
  std::uint32_t total = 4;
  std::uint32_t func_proj = 2;
  std::uint32_t elim = 2;
  std::uint32_t imit = 2;
  std::uint32_t ident = 2;
};

// lambda ctx. lhs =? lambda ctx. rhs, stored with the shared prefix split off.
// The bodies are open terms whose loose indices refer to ctx (index 0 is the
// last entry of ctx).
struct Goal {
  std::vector<Type> ctx;
  Term lhs;
  Term rhs;
  Counters counters;
  std::uint64_t seq = 0;

  Term closed_lhs() const { return Term::lams(ctx, lhs); }
  Term closed_rhs() const { return Term::lams(ctx, rhs); }
};

enum class PairClass : std::uint8_t { RigidRigid = 0, FlexRigid = 1, FlexFlex = 2 };

bool is_rigid_head(const Term& head);
bool is_flex_head(const Term& head);

// Heads are classified after one level of dereferencing, without normalization.
// A head that is still a redex, or an image headed by one of its own binders,
// counts as flex.
bool side_is_flex_after_deref(const Term& body, const Substitution& sigma);
PairClass classify(const Goal& g, const Substitution& sigma);

}  // namespace hou
