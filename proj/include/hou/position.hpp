#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hou/term.hpp"

namespace hou {

// Argument i of an applied head contributes i; a binder contributes 1.
// The empty position is the root.
using Position = std::vector<std::uint32_t>;

// "e" for the root, otherwise dot-separated positive integers.
std::string format_position(const Position& p);
// Throws InvalidPosition on malformed text.
Position parse_position(std::string_view text);

// Throws InvalidState when t is not beta-normal and InvalidPosition when p
// does not address a subterm.
Term subterm_at(const Term& t, const Position& p);
// Replaces the subterm at p; the replacement must have the same type.
Term replace_at(const Term& t, const Position& p, const Term& replacement);
// All positions of t in preorder.
std::vector<Position> positions(const Term& t);

// Common context of two eta-long beta-normal terms of the same type.
struct CommonContext {
  // The left operand; holes are addressed by `holes`.
  Term skeleton;
  std::vector<Position> holes;
  std::vector<std::pair<Term, Term>> pairs;

  // Fills the holes left to right.
  Term fill(std::span<const Term> fillers) const;
  Term fill_left() const;
  Term fill_right() const;
};

// Throws TypeMismatch when the types differ.
CommonContext common_context(const Term& s, const Term& t);

}  // namespace hou
