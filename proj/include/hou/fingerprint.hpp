#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hou/position.hpp"
#include "hou/term.hpp"

namespace hou {

// Function symbol of the first-order image: a constant or a de Bruijn
// constant db_i standing for a bound variable applied to arguments.
struct FoSymbol {
  enum class Kind : std::uint8_t { Const, Db };
  Kind kind = Kind::Const;
  std::uint32_t id = 0;
  friend auto operator<=>(const FoSymbol&, const FoSymbol&) = default;
};

struct FoTerm {
  enum class Kind : std::uint8_t { Var, Sym };
  Kind kind = Kind::Sym;
  FoSymbol sym;
  VarId var = 0;
  std::vector<FoTerm> args;
};

// First-order image of the eta-long beta-normal form: abstractions vanish,
// applied free variables collapse to the variable.
FoTerm encode(const Term& t);

struct Feature {
  enum class Kind : std::uint8_t { Sym, A, B, N };
  Kind kind = Kind::N;
  FoSymbol sym;

  static Feature symbol(FoSymbol s) { return {Kind::Sym, s}; }
  static Feature a() { return {Kind::A, {}}; }
  static Feature b() { return {Kind::B, {}}; }
  static Feature n() { return {Kind::N, {}}; }
  friend auto operator<=>(const Feature&, const Feature&) = default;
};

using Fingerprint = std::vector<Feature>;

// Sym: a symbol heads t|p. A: a variable sits at p. B: a variable sits at a
// proper prefix of p. N: otherwise.
Feature gfpf(const FoTerm& t, const Position& p);
Fingerprint fp_ho(const Term& t, std::span<const Position> positions);

bool feature_compatible_unif(const Feature& a, const Feature& b);
// Row: query (pattern) feature; column: target feature.
bool feature_compatible_match(const Feature& query, const Feature& target);
// Throw std::invalid_argument on length mismatch.
bool compatible_unif(const Fingerprint& a, const Fingerprint& b);
bool compatible_match(const Fingerprint& query, const Fingerprint& target);

std::vector<Position> default_positions();
// Comma-separated positions, e.g. "e,1,2,1.1". Throws InvalidPosition.
std::vector<Position> parse_positions(std::string_view text);
std::string format_positions(std::span<const Position> positions);

std::string format_feature(const Feature& f, const std::function<std::string(SymbolId)>& const_name = {});
std::string format_fingerprint(const Fingerprint& fp, const std::function<std::string(SymbolId)>& const_name = {});

// Trie over fingerprints; one level per sampled position.
class FingerprintIndex {
 public:
  explicit FingerprintIndex(std::vector<Position> positions = default_positions());

  const std::vector<Position>& positions() const { return positions_; }
  std::size_t size() const { return count_; }

  Fingerprint fingerprint(const Term& t) const { return fp_ho(t, positions_); }
  void insert(std::size_t id, const Term& t) { insert(id, fingerprint(t)); }
  void insert(std::size_t id, const Fingerprint& fp);

  // Sorted ids of stored terms whose fingerprints are compatible.
  std::vector<std::size_t> retrieve_unifiable(const Fingerprint& query) const;
  std::vector<std::size_t> retrieve_matching(const Fingerprint& query) const;
  std::vector<std::size_t> retrieve_unifiable(const Term& query) const { return retrieve_unifiable(fingerprint(query)); }
  std::vector<std::size_t> retrieve_matching(const Term& query) const { return retrieve_matching(fingerprint(query)); }

 private:
  struct Node {
    std::map<Feature, std::size_t> children;
    std::vector<std::size_t> ids;
  };
  template <class Compat>
  std::vector<std::size_t> retrieve(const Fingerprint& query, Compat&& compat) const;

  std::vector<Position> positions_;
  std::vector<Node> nodes_;
  std::size_t count_ = 0;
};

}  // namespace hou
