#include "hou/index_check.hpp"

#include <algorithm>

namespace hou {

const char* confirmation_name(Confirmation c) {
  switch (c) {
    case Confirmation::Yes: return "yes";
    case Confirmation::No: return "no";
    case Confirmation::Unknown: return "unknown";
  }
  return "?";
}

namespace {

SymbolId const_id_limit(const Term& t) {
  switch (t.kind()) {
    case TermKind::Const: return t.const_id() + 1;
    case TermKind::App: return std::max(const_id_limit(t.fn()), const_id_limit(t.arg()));
    case TermKind::Lam: return const_id_limit(t.body());
    default: return 0;
  }
}

Confirmation run(const Term& q, const Term& t, const EngineConfig& cfg, std::uint64_t max_pulls) {
  if (q.type() != t.type()) return Confirmation::No;
  Constraint c{q, t};
  UnifierStream s = solve(std::span<const Constraint>(&c, 1), cfg);
  if (s.next_unifier(max_pulls)) return Confirmation::Yes;
  return s.status() == SolveStatus::NonUnifiable ? Confirmation::No : Confirmation::Unknown;
}

}  // namespace

Term rename_apart(const Term& t, const Term& avoid) {
  FreshSupply supply(std::max(var_id_limit(t), var_id_limit(avoid)));
  Substitution ren;
  for (const Term& v : free_vars(t)) ren.set(v, supply.fresh(v.type(), v.sort()));
  return ren.apply(t);
}

Term freeze(const Term& t, const Term& avoid) {
  SymbolId next = std::max(const_id_limit(t), const_id_limit(avoid));
  Substitution fr;
  for (const Term& v : free_vars(t)) fr.set(v, Term::constant(next++, v.type()));
  return fr.apply(t);
}

Confirmation confirm_unifiable(const Term& q, const Term& t, const EngineConfig& cfg, std::uint64_t max_pulls) {
  return run(q, rename_apart(t, q), cfg, max_pulls);
}

Confirmation confirm_matching(const Term& q, const Term& t, const EngineConfig& cfg, std::uint64_t max_pulls) {
  return run(q, freeze(t, q), cfg, max_pulls);
}

}  // namespace hou
