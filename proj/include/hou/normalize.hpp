#pragma once

#include <cstdint>

#include "hou/term.hpp"

namespace hou {

const Type& type_of(const Term& t);

// Leftmost-outermost beta reduction until the head is not a redex.
// Arguments are left untouched.
Term hnf(const Term& t);
bool is_hnf(const Term& t);
bool is_beta_normal(const Term& t);

// Canonical representative of the alpha-beta-eta class.
Term eta_long_beta_normal(const Term& t);
inline Term canonical(const Term& t) { return eta_long_beta_normal(t); }
bool is_eta_long_beta_normal(const Term& t);

// Throws TypeMismatch when the types differ.
bool alpha_beta_eta_equal(const Term& s, const Term& t);

std::size_t size(const Term& t);

// Eta-expands a term of type a1 -> ... -> an -> b to lambda x1..xn. t x1 .. xn
// at the top level only; bound variables of t are shifted accordingly.
Term eta_expand_top(const Term& t);

// Counts full normalizations performed outside an exempt scope on the
// current thread. Used to audit the engine's lazy step path.
std::uint64_t audited_normalizations();
void reset_audited_normalizations();

class NormalizationExempt {
 public:
  NormalizationExempt();
  ~NormalizationExempt();
  NormalizationExempt(const NormalizationExempt&) = delete;
  NormalizationExempt& operator=(const NormalizationExempt&) = delete;
};

// Marks a region whose full normalizations are counted.
class NormalizationAudit {
 public:
  NormalizationAudit();
  ~NormalizationAudit();
  NormalizationAudit(const NormalizationAudit&) = delete;
  NormalizationAudit& operator=(const NormalizationAudit&) = delete;
};

}  // namespace hou
