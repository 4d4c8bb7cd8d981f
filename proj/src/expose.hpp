#pragma once

#include <functional>
#include <vector>

#include "hou/normalize.hpp"
#include "hou/substitution.hpp"
#include "hou/term.hpp"

namespace hou::detail {

// Head normal form with mapped heads replaced, eta-expanded to base type.
struct Exposed {
  std::vector<Type> binders;
  Term head;
  std::vector<Term> args;
};

using Lookup = std::function<const Term*(VarId)>;

inline Exposed expose(const Term& t, const Lookup& lookup) {
  Term cur = hnf(t);
  while (true) {
    const Term* b = &cur;
    while (b->is_lam()) b = &b->body();
    const Term& h = head_of(*b);
    const Term* img = h.is_free_var() && lookup ? lookup(h.var_id()) : nullptr;
    if (!img) break;
    Abstraction ab = strip_lams(cur);
    Spine sp = spine(ab.body);
    cur = hnf(Term::lams(ab.binders, Term::apply(*img, sp.args)));
  }
  Abstraction ab = strip_lams(cur);
  Spine sp = spine(ab.body);
  Exposed e{std::move(ab.binders), sp.head, std::move(sp.args)};
  std::size_t k = ab.body.type().arity();
  if (k > 0) {
    std::vector<Type> extra = ab.body.type().arg_types();
    auto d = static_cast<std::int32_t>(k);
    e.head = shift(e.head, d);
    for (Term& a : e.args) a = shift(a, d);
    for (std::size_t j = 0; j < k; ++j) {
      e.args.push_back(Term::bound_var(static_cast<std::uint32_t>(k - 1 - j), extra[j]));
      e.binders.push_back(extra[j]);
    }
  }
  return e;
}

inline Lookup lookup_in(const Substitution& s) {
  return [&s](VarId id) { return s.lookup(id); };
}

inline Lookup lookup_in(const Substitution& first, const Substitution& second) {
  return [&first, &second](VarId id) {
    const Term* r = first.lookup(id);
    return r ? r : second.lookup(id);
  };
}

}  // namespace hou::detail
