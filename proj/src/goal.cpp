#include "hou/goal.hpp"

namespace hou {

bool is_rigid_head(const Term& head) { return head.is_const() || head.is_bound_var(); }
bool is_flex_head(const Term& head) { return head.is_free_var(); }

bool side_is_flex_after_deref(const Term& body, const Substitution& sigma) {
  const Term* cur = &body;
  while (cur->is_lam()) cur = &cur->body();
  const Term& h = head_of(*cur);
  if (h.is_lam()) return true;
  if (!h.is_free_var()) return false;
  const Term* img = sigma.lookup(h.var_id());
  if (!img) return true;
  const Term* ib = img;
  while (ib->is_lam()) ib = &ib->body();
  const Term& ih = head_of(*ib);
  return !ih.is_const();
}

PairClass classify(const Goal& g, const Substitution& sigma) {
  bool fl = side_is_flex_after_deref(g.lhs, sigma);
  bool fr = side_is_flex_after_deref(g.rhs, sigma);
  if (fl && fr) return PairClass::FlexFlex;
  if (fl || fr) return PairClass::FlexRigid;
  return PairClass::RigidRigid;
}

}  // namespace hou
