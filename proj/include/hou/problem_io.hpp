#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hou/goal.hpp"
#include "hou/substitution.hpp"
#include "hou/term.hpp"

namespace hou {

// Names of the declared base types, constants and variables. Ids are dense
// and assigned in declaration order.
struct Signature {
  std::vector<std::string> base_names;
  std::vector<std::string> const_names;
  std::vector<Term> consts;
  std::vector<std::string> var_names;
  std::vector<Term> vars;

  std::map<std::string, SymbolId, std::less<>> base_ids;
  std::map<std::string, std::size_t, std::less<>> const_index;
  std::map<std::string, std::size_t, std::less<>> var_index;

  // Throws DeclError on redeclaration or a reserved name.
  Type declare_base(const std::string& name);
  Term declare_const(const std::string& name, const Type& type);
  Term declare_var(const std::string& name, const Type& type);

  const std::string* var_name(VarId id) const;
};

struct IndexQuery {
  bool matching = false;  // query-match: rather than query-unif:
  Term term;
};

struct ProblemFile {
  Signature sig;
  std::vector<Constraint> goals;
  // Index files: stored terms and queries.
  std::vector<Term> terms;
  std::vector<IndexQuery> queries;
};

// Throws ParseError on malformed text and DeclError on undeclared or
// ill-typed symbols.
ProblemFile parse_problem(std::string_view text);
ProblemFile read_problem_file(const std::string& path);

Type parse_type(std::string_view text, const Signature& sig);
// Closed term with every identifier declared in sig.
Term parse_term(std::string_view text, const Signature& sig);

std::string print_type(const Type& t, const Signature& sig);

// Names for variables outside the signature: H_1, H_2, ... by first use.
class AuxNames {
 public:
  std::string name(VarId id);

 private:
  std::map<VarId, std::string> names_;
};

std::string print_term(const Term& t, const Signature& sig, AuxNames& aux);
std::string print_term(const Term& t, const Signature& sig);

// One line "F -> term" per mapped problem variable, sorted by name, or the
// single line "identity".
std::string print_unifier(const Substitution& sigma, const ProblemFile& problem);
// Inverse of print_unifier. Auxiliary variables receive fresh ids above the
// problem's variables; their types are inferred.
Substitution parse_unifier(std::string_view text, const ProblemFile& problem);

std::string print_problem(const ProblemFile& problem);

}  // namespace hou
