#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace hou {

using SymbolId = std::uint32_t;

// Simple type: a base type or a right-nested arrow. Immutable, shared.
class Type {
 public:
  Type() = default;

  static Type base(SymbolId id);
  static Type arrow(Type domain, Type codomain);
  // domains[0] -> domains[1] -> ... -> result
  static Type arrows(std::span<const Type> domains, Type result);

  bool valid() const { return node_ != nullptr; }
  bool is_base() const;
  bool is_arrow() const { return !is_base(); }

  SymbolId base_id() const;
  const Type& domain() const;
  const Type& codomain() const;

  // Decomposition a1 -> ... -> an -> b with b a base type.
  std::vector<Type> arg_types() const;
  const Type& result() const;
  std::size_t arity() const;

  std::size_t size() const;
  std::size_t hash() const;

  friend bool operator==(const Type& a, const Type& b);
  friend bool operator!=(const Type& a, const Type& b) { return !(a == b); }

  // Total order: by size, then structurally.
  friend int compare(const Type& a, const Type& b);
  friend bool operator<(const Type& a, const Type& b) { return compare(a, b) < 0; }

 private:
  struct Node;
  explicit Type(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct TypeHash {
  std::size_t operator()(const Type& t) const { return t.hash(); }
};

}  // namespace hou
