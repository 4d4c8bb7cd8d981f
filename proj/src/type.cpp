#include "hou/type.hpp"

#include <cassert>

namespace hou {

struct Type::Node {
  bool base = true;
  SymbolId id = 0;
  Type dom;
  Type cod;
  std::size_t size = 1;
  std::size_t hash = 0;
  std::size_t arity = 0;
  const Node* result = nullptr;
};

namespace {

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

}  // namespace

Type Type::base(SymbolId id) {
  auto n = std::make_shared<Node>();
  n->base = true;
  n->id = id;
  n->hash = mix(0x51ed27, id);
  n->result = n.get();
  return Type(std::move(n));
}

Type Type::arrow(Type domain, Type codomain) {
  assert(domain.valid() && codomain.valid());
  auto n = std::make_shared<Node>();
  n->base = false;
  n->size = domain.size() + codomain.size() + 1;
  n->hash = mix(mix(0xa770, domain.hash()), codomain.hash());
  n->arity = codomain.arity() + 1;
  n->result = codomain.node_->result;
  n->dom = std::move(domain);
  n->cod = std::move(codomain);
  return Type(std::move(n));
}

Type Type::arrows(std::span<const Type> domains, Type result) {
  Type t = std::move(result);
  for (auto it = domains.rbegin(); it != domains.rend(); ++it) t = arrow(*it, std::move(t));
  return t;
}

bool Type::is_base() const { return node_->base; }
SymbolId Type::base_id() const { return node_->result->id; }
const Type& Type::domain() const { return node_->dom; }
const Type& Type::codomain() const { return node_->cod; }
std::size_t Type::size() const { return node_->size; }
std::size_t Type::hash() const { return node_->hash; }
std::size_t Type::arity() const { return node_->arity; }

const Type& Type::result() const {
  const Type* t = this;
  while (t->is_arrow()) t = &t->codomain();
  return *t;
}

std::vector<Type> Type::arg_types() const {
  std::vector<Type> out;
  out.reserve(arity());
  const Type* t = this;
  while (t->is_arrow()) {
    out.push_back(t->domain());
    t = &t->codomain();
  }
  return out;
}

bool operator==(const Type& a, const Type& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.node_->hash != b.node_->hash || a.node_->base != b.node_->base) return false;
  if (a.node_->base) return a.node_->id == b.node_->id;
  return a.node_->dom == b.node_->dom && a.node_->cod == b.node_->cod;
}

int compare(const Type& a, const Type& b) {
  if (a.node_ == b.node_) return 0;
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  if (a.is_base() != b.is_base()) return a.is_base() ? -1 : 1;
  if (a.is_base()) return a.base_id() == b.base_id() ? 0 : (a.base_id() < b.base_id() ? -1 : 1);
  if (int c = compare(a.domain(), b.domain())) return c;
  return compare(a.codomain(), b.codomain());
}

}  // namespace hou
