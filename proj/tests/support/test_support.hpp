#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hou/goal.hpp"
#include "hou/position.hpp"
#include "hou/problem_io.hpp"
#include "hou/term.hpp"

namespace hou::testing {

// Base type i; constants a b c d : i, f h : i > i, g : i > i > i.
// Two disjoint variable pools, each X : i, F : i > i, G : i > i > i,
// P : (i > i) > i.
struct TestSig {
  ProblemFile file;
  Type i;
  Type ii;
  Type iii;
  Type ii_i;
  std::vector<Term> consts;
  std::vector<Term> left_vars;
  std::vector<Term> right_vars;

  const Signature& sig() const { return file.sig; }
  Term parse(const std::string& text) const { return parse_term(text, file.sig); }
  Type type(const std::string& text) const { return parse_type(text, file.sig); }
  std::string show(const Term& t) const { return print_term(t, file.sig); }
};

const TestSig& test_sig();

// Builds a ProblemFile over the test signature holding the given goals.
ProblemFile problem_over(const TestSig& s, std::vector<Constraint> goals);

enum class GenMode : std::uint8_t {
  Free,     // any well-typed beta-normal term
  Pattern,  // free variables applied to distinct bound variables only
  Solid,    // free variables applied to bound variables or ground base terms
  Ground,   // no free variables
};

struct GenOptions {
  GenMode mode = GenMode::Free;
  std::size_t max_size = 8;
  // Probability of inserting a beta redex where one fits.
  double redex_prob = 0.0;
  std::vector<Term> vars;
};

class TermGen {
 public:
  explicit TermGen(std::uint64_t seed) : rng_(seed) {}

  // A term of type ty with size at most opts.max_size, or nullopt if the
  // attempt failed. Loose indices refer to ctx (index 0 is its last entry).
  std::optional<Term> term(const Type& ty, const GenOptions& opts, const std::vector<Type>& ctx = {});
  // Retries until a term is found.
  Term term_retry(const Type& ty, const GenOptions& opts, const std::vector<Type>& ctx = {});

  std::mt19937_64& rng() { return rng_; }
  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

 private:
  std::optional<Term> gen(const Type& ty, const std::vector<Type>& ctx, std::size_t budget, const GenOptions& o,
                          int depth);
  std::optional<Term> gen_app(const Term& head, const Type& ty, const std::vector<Type>& ctx, std::size_t budget,
                              const GenOptions& o, int depth);
  std::mt19937_64 rng_;
};

// Random constraint of two terms of a random type drawn from {i, i > i}.
Constraint random_problem(TermGen& gen, std::size_t max_size = 8, double redex_prob = 0.0);
// Both sides patterns sharing the left pool, under a common binder prefix.
Constraint random_pattern_problem(TermGen& gen, std::size_t max_size = 8);
// Solid sides with disjoint variable pools and a linear left side.
Constraint random_solid_problem(TermGen& gen, std::size_t max_size = 8);

// Normalization by evaluation: an independent eta-long beta-normal form.
Term nbe_normalize(const Term& t, std::span<const Type> ctx = {});
bool nbe_equal(const Term& s, const Term& t);
bool nbe_verify(std::span<const Constraint> problem, const Substitution& sigma);

// Every (position, subterm) pair of a beta-normal term. Each level tries all
// integers 1..size(t); the subterm relation is evaluated directly on the
// application tree rather than through spines.
std::vector<std::pair<Position, Term>> brute_force_subterms(const Term& t);

}  // namespace hou::testing
