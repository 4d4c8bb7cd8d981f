#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "hou/term.hpp"

namespace hou {

// Finite map from free variables to closed terms of the same type.
class Substitution {
 public:
  struct Entry {
    Term var;
    Term image;
  };

  Substitution() = default;
  static Substitution single(const Term& var, const Term& image);

  bool empty() const { return map_.empty(); }
  std::size_t size() const { return map_.size(); }
  bool maps(VarId id) const { return map_.count(id) != 0; }
  const Term* lookup(VarId id) const;
  const std::map<VarId, Entry>& entries() const { return map_; }
  std::vector<Term> domain() const;

  // Throws TypeMismatch on an ill-typed image and InvalidState on an image
  // with loose bound variables. An existing entry is replaced.
  void set(const Term& var, const Term& image);
  void erase(VarId id) { map_.erase(id); }

  // Eager, capture-free: images are closed. No normalization is performed.
  Term apply(const Term& t) const;

  // Keeps only the entries for the given variables.
  Substitution restrict(std::span<const Term> vars) const;
  // Images in eta-long beta-normal form.
  Substitution normalized() const;
  // Drops entries whose image is the variable itself up to eta.
  Substitution without_trivial() const;

  bool is_idempotent() const;

  // Engine extension: this := {var -> image} composed after this. Throws
  // IdempotenceViolation when var is already mapped, occurs in image, or
  // image mentions a mapped variable.
  void extend(const Term& var, const Term& image);

  std::uint64_t bloom() const { return bloom_; }

 private:
  std::map<VarId, Entry> map_;
  std::uint64_t bloom_ = 0;  // over the domain
};

// (compose(rho, sigma)) t = rho (sigma t).
Substitution compose(const Substitution& rho, const Substitution& sigma);

// Repeatedly computes the head normal form and replaces a mapped flex head
// by its image. The result's head is not mapped by sigma.
Term whnf_deref(const Term& t, const Substitution& sigma);

// Monotone source of fresh variable ids.
class FreshSupply {
 public:
  explicit FreshSupply(VarId first = 0) : next_(first) {}
  Term fresh(const Type& type, VarSort sort = VarSort::Plain) { return Term::free_var(next_++, type, sort); }
  VarId peek() const { return next_; }
  // Never lowers the counter.
  void reserve_below(VarId limit) {
    if (limit > next_) next_ = limit;
  }

 private:
  VarId next_;
};

}  // namespace hou
