#include "hou/problem_io.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>

#include "hou/errors.hpp"
#include "hou/normalize.hpp"

namespace hou {

namespace {

bool reserved_aux_name(std::string_view n) { return n.size() >= 2 && n[0] == 'H' && n[1] == '_'; }

}  // namespace

Type Signature::declare_base(const std::string& name) {
  if (base_ids.count(name)) throw DeclError(0, 0, "base type '" + name + "' declared twice");
  auto id = static_cast<SymbolId>(base_names.size());
  base_names.push_back(name);
  base_ids.emplace(name, id);
  return Type::base(id);
}

Term Signature::declare_const(const std::string& name, const Type& type) {
  if (const_index.count(name) || var_index.count(name)) throw DeclError(0, 0, "symbol '" + name + "' declared twice");
  Term c = Term::constant(static_cast<SymbolId>(consts.size()), type);
  const_index.emplace(name, consts.size());
  const_names.push_back(name);
  consts.push_back(c);
  return c;
}

Term Signature::declare_var(const std::string& name, const Type& type) {
  if (const_index.count(name) || var_index.count(name)) throw DeclError(0, 0, "symbol '" + name + "' declared twice");
  if (reserved_aux_name(name)) throw DeclError(0, 0, "identifiers starting with H_ are reserved");
  Term v = Term::free_var(static_cast<VarId>(vars.size()), type);
  var_index.emplace(name, vars.size());
  var_names.push_back(name);
  vars.push_back(v);
  return v;
}

const std::string* Signature::var_name(VarId id) const {
  return id < var_names.size() ? &var_names[id] : nullptr;
}

// ------------------------------------------------------------------- lexer

namespace {

enum class Tok { Ident, Backslash, Colon, Dot, Gt, LParen, RParen, Unif, Arrow, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t col;
};

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  auto ident_char = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; };
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '%') {
      while (i < s.size() && s[i] != '\n') advance(1);
      continue;
    }
    std::size_t l = line, cl = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && ident_char(s[j])) ++j;
      std::string word(s.substr(i, j - i));
      if (word == "query" && j < s.size() && s[j] == '-') {
        std::size_t k = j + 1;
        while (k < s.size() && ident_char(s[k])) ++k;
        word = std::string(s.substr(i, k - i));
        j = k;
      }
      advance(j - i);
      out.push_back({Tok::Ident, std::move(word), l, cl});
      continue;
    }
    if (s.substr(i, 3) == "=?=") {
      advance(3);
      out.push_back({Tok::Unif, "=?=", l, cl});
      continue;
    }
    if (s.substr(i, 2) == "->") {
      advance(2);
      out.push_back({Tok::Arrow, "->", l, cl});
      continue;
    }
    Tok k;
    switch (c) {
      case '\\': k = Tok::Backslash; break;
      case ':': k = Tok::Colon; break;
      case '.': k = Tok::Dot; break;
      case '>': k = Tok::Gt; break;
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      default: throw ParseError(l, cl, std::string("unexpected character '") + c + "'");
    }
    advance(1);
    out.push_back({k, std::string(1, c), l, cl});
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

// ---------------------------------------------------------- type inference

// Simple types with metavariables, solved by first-order unification.
class TypeStore {
 public:
  int meta() { return add({Kind::Meta, 0, -1, -1}); }
  int from(const Type& t) {
    if (t.is_base()) return add({Kind::Base, t.base_id(), -1, -1});
    int a = from(t.domain());
    int b = from(t.codomain());
    return add({Kind::Arrow, 0, a, b});
  }
  int arrow(int a, int b) { return add({Kind::Arrow, 0, a, b}); }

  bool unify(int x, int y) {
    x = find(x);
    y = find(y);
    if (x == y) return true;
    Node& nx = nodes_[x];
    Node& ny = nodes_[y];
    if (nx.kind == Kind::Meta) return bind(x, y);
    if (ny.kind == Kind::Meta) return bind(y, x);
    if (nx.kind != ny.kind) return false;
    if (nx.kind == Kind::Base) return nx.id == ny.id;
    int xa = nx.a, xb = nx.b, ya = ny.a, yb = ny.b;
    return unify(xa, ya) && unify(xb, yb);
  }

  std::optional<Type> resolve(int x) {
    x = find(x);
    const Node& n = nodes_[x];
    if (n.kind == Kind::Meta) return std::nullopt;
    if (n.kind == Kind::Base) return Type::base(n.id);
    int a = n.a, b = n.b;
    auto ta = resolve(a);
    auto tb = resolve(b);
    if (!ta || !tb) return std::nullopt;
    return Type::arrow(*ta, *tb);
  }

  // Domain and codomain of x, forcing an arrow shape.
  std::optional<std::pair<int, int>> split(int x) {
    int a = meta();
    int b = meta();
    if (!unify(x, arrow(a, b))) return std::nullopt;
    return std::make_pair(a, b);
  }

 private:
  enum class Kind { Meta, Base, Arrow };
  struct Node {
    Kind kind;
    SymbolId id;
    int a, b;
    int parent = -1;
  };
  int add(Node n) {
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size() - 1);
  }
  int find(int x) {
    while (nodes_[x].parent >= 0) x = nodes_[x].parent;
    return x;
  }
  bool occurs(int m, int x) {
    x = find(x);
    if (x == m) return true;
    const Node& n = nodes_[x];
    if (n.kind != Kind::Arrow) return false;
    int a = n.a, b = n.b;
    return occurs(m, a) || occurs(m, b);
  }
  bool bind(int m, int t) {
    if (occurs(m, t)) return false;
    nodes_[m].parent = t;
    return true;
  }
  std::vector<Node> nodes_;
};

// ------------------------------------------------------------------ parser

struct Ast {
  enum class Kind { Ident, App, Lam } kind;
  std::string name;
  Type binder;
  std::unique_ptr<Ast> a, b;
  std::size_t line = 0, col = 0;
};

// Elaborated term with an unresolved type.
struct Pre {
  enum class Kind { Bound, Var, Const, Aux, App, Lam } kind;
  std::uint32_t index = 0;
  Term leaf;
  std::string aux;
  Type binder;
  std::unique_ptr<Pre> a, b;
  int ty = -1;
};

class Parser {
 public:
  Parser(std::vector<Token> toks, Signature& sig) : toks_(std::move(toks)), sig_(sig) {}

  const Token& peek() const { return toks_[pos_]; }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_word(std::string_view w) const { return at(Tok::Ident) && peek().text == w; }
  Token take() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(peek().line, peek().col, msg + (at(Tok::End) ? " at end of input" : " near '" + peek().text + "'"));
  }
  Token expect(Tok k, const char* what) {
    if (!at(k)) fail(std::string("expected ") + what);
    return take();
  }

  Type type() {
    Type dom = type_atom();
    if (at(Tok::Gt)) {
      take();
      return Type::arrow(dom, type());
    }
    return dom;
  }

  Type type_atom() {
    if (at(Tok::LParen)) {
      take();
      Type t = type();
      expect(Tok::RParen, "')'");
      return t;
    }
    Token t = expect(Tok::Ident, "a type");
    auto it = sig_.base_ids.find(t.text);
    if (it == sig_.base_ids.end()) throw DeclError(t.line, t.col, "undeclared base type '" + t.text + "'");
    return Type::base(it->second);
  }

  std::unique_ptr<Ast> term() {
    if (at(Tok::Backslash)) return lambda();
    std::unique_ptr<Ast> head = atom();
    while (true) {
      std::unique_ptr<Ast> arg;
      if (at(Tok::Ident) || at(Tok::LParen))
        arg = atom();
      else if (at(Tok::Backslash))
        arg = lambda();
      else
        break;
      auto app = std::make_unique<Ast>();
      app->kind = Ast::Kind::App;
      app->line = head->line;
      app->col = head->col;
      app->a = std::move(head);
      app->b = std::move(arg);
      head = std::move(app);
    }
    return head;
  }

  std::unique_ptr<Ast> lambda() {
    Token bs = take();
    Token name = expect(Tok::Ident, "a binder name");
    expect(Tok::Colon, "':'");
    Type ty = type();
    expect(Tok::Dot, "'.'");
    auto lam = std::make_unique<Ast>();
    lam->kind = Ast::Kind::Lam;
    lam->name = name.text;
    lam->binder = ty;
    lam->line = bs.line;
    lam->col = bs.col;
    lam->a = term();
    return lam;
  }

  std::unique_ptr<Ast> atom() {
    if (at(Tok::LParen)) {
      take();
      auto t = term();
      expect(Tok::RParen, "')'");
      return t;
    }
    Token t = expect(Tok::Ident, "a term");
    auto leaf = std::make_unique<Ast>();
    leaf->kind = Ast::Kind::Ident;
    leaf->name = t.text;
    leaf->line = t.line;
    leaf->col = t.col;
    return leaf;
  }

  std::size_t pos_ = 0;

 private:
  std::vector<Token> toks_;
  Signature& sig_;
};

class Elaborator {
 public:
  Elaborator(const Signature& sig, bool allow_aux) : sig_(sig), allow_aux_(allow_aux) {}

  // Elaborates and checks against an expected type when given.
  void elaborate(const Ast& ast, const std::optional<Type>& expected) {
    std::vector<std::pair<std::string, Type>> env;
    std::unique_ptr<Pre> p = infer(ast, env);
    if (expected && !store_.unify(p->ty, store_.from(*expected)))
      throw DeclError(ast.line, ast.col, "term does not have the expected type");
    pending_.push_back(&ast);
    pres_.push_back(std::move(p));
  }

  // Resolves every elaborated term; call once after all elaborate() calls.
  std::vector<Term> finish(FreshSupply& supply) {
    for (auto& [name, ty] : aux_types_) {
      auto t = store_.resolve(ty);
      if (!t) throw DeclError(0, 0, "cannot infer the type of '" + name + "'");
      aux_vars_.emplace(name, supply.fresh(*t));
    }
    std::vector<Term> out;
    for (std::size_t i = 0; i < pres_.size(); ++i) out.push_back(build(*pres_[i], *pending_[i]));
    return out;
  }

  int unify_types(const Ast& at, int x, int y) {
    if (!store_.unify(x, y)) throw DeclError(at.line, at.col, "ill-typed application");
    return x;
  }

  std::unique_ptr<Pre> infer(const Ast& ast, std::vector<std::pair<std::string, Type>>& env) {
    auto p = std::make_unique<Pre>();
    switch (ast.kind) {
      case Ast::Kind::Ident: {
        for (std::size_t k = env.size(); k-- > 0;) {
          if (env[k].first != ast.name) continue;
          p->kind = Pre::Kind::Bound;
          p->index = static_cast<std::uint32_t>(env.size() - 1 - k);
          p->binder = env[k].second;
          p->ty = store_.from(env[k].second);
          return p;
        }
        if (auto it = sig_.var_index.find(ast.name); it != sig_.var_index.end()) {
          p->kind = Pre::Kind::Var;
          p->leaf = sig_.vars[it->second];
          p->ty = store_.from(p->leaf.type());
          return p;
        }
        if (auto it = sig_.const_index.find(ast.name); it != sig_.const_index.end()) {
          p->kind = Pre::Kind::Const;
          p->leaf = sig_.consts[it->second];
          p->ty = store_.from(p->leaf.type());
          return p;
        }
        if (allow_aux_ && reserved_aux_name(ast.name)) {
          p->kind = Pre::Kind::Aux;
          p->aux = ast.name;
          auto it = aux_types_.find(ast.name);
          if (it == aux_types_.end()) it = aux_types_.emplace(ast.name, store_.meta()).first;
          p->ty = it->second;
          return p;
        }
        throw DeclError(ast.line, ast.col, "undeclared identifier '" + ast.name + "'");
      }
      case Ast::Kind::App: {
        p->kind = Pre::Kind::App;
        p->a = infer(*ast.a, env);
        p->b = infer(*ast.b, env);
        auto parts = store_.split(p->a->ty);
        if (!parts) throw DeclError(ast.line, ast.col, "application of a term of base type");
        unify_types(*ast.b, parts->first, p->b->ty);
        p->ty = parts->second;
        return p;
      }
      case Ast::Kind::Lam: {
        p->kind = Pre::Kind::Lam;
        p->binder = ast.binder;
        env.emplace_back(ast.name, ast.binder);
        p->a = infer(*ast.a, env);
        env.pop_back();
        p->ty = store_.arrow(store_.from(ast.binder), p->a->ty);
        return p;
      }
    }
    throw InvalidState("unknown syntax node");
  }

  Term build(const Pre& p, const Ast& where) {
    switch (p.kind) {
      case Pre::Kind::Bound: return Term::bound_var(p.index, p.binder);
      case Pre::Kind::Var:
      case Pre::Kind::Const: return p.leaf;
      case Pre::Kind::Aux: return aux_vars_.at(p.aux);
      case Pre::Kind::App: return Term::app(build(*p.a, where), build(*p.b, where));
      case Pre::Kind::Lam: return Term::lam(p.binder, build(*p.a, where));
    }
    throw InvalidState("unknown elaborated node");
  }

 private:
  const Signature& sig_;
  bool allow_aux_;
  TypeStore store_;
  std::map<std::string, int> aux_types_;
  std::map<std::string, Term> aux_vars_;
  std::vector<std::unique_ptr<Pre>> pres_;
  std::vector<const Ast*> pending_;
};

void require_case(const Token& t, bool upper) {
  bool is_upper = std::isupper(static_cast<unsigned char>(t.text[0]));
  if (upper && !is_upper) throw DeclError(t.line, t.col, "variable names must start with an uppercase letter");
  if (!upper && is_upper) throw DeclError(t.line, t.col, "constant names must start with a lowercase letter");
}

template <class F>
auto at_token(const Token& t, F&& f) {
  try {
    return f();
  } catch (const DeclError& e) {
    if (e.line() != 0) throw;
    std::string msg = e.what();
    auto colon = msg.find(": ");
    throw DeclError(t.line, t.col, colon == std::string::npos ? msg : msg.substr(colon + 2));
  }
}

}  // namespace

ProblemFile parse_problem(std::string_view text) {
  ProblemFile pf;
  Parser ps(lex(text), pf.sig);
  while (!ps.at(Tok::End)) {
    Token kw = ps.expect(Tok::Ident, "a statement");
    if (kw.text == "tp") {
      Token name = ps.expect(Tok::Ident, "a type name");
      ps.expect(Tok::Dot, "'.'");
      at_token(name, [&] { return pf.sig.declare_base(name.text); });
      continue;
    }
    if (kw.text == "const" || kw.text == "var") {
      Token name = ps.expect(Tok::Ident, "a symbol name");
      ps.expect(Tok::Colon, "':'");
      Type ty = ps.type();
      ps.expect(Tok::Dot, "'.'");
      bool var = kw.text == "var";
      require_case(name, var);
      at_token(name, [&] { return var ? pf.sig.declare_var(name.text, ty) : pf.sig.declare_const(name.text, ty); });
      continue;
    }
    bool unify = kw.text == "unify";
    bool store = kw.text == "term";
    bool qu = kw.text == "query-unif";
    bool qm = kw.text == "query-match";
    if (!unify && !store && !qu && !qm)
      throw ParseError(kw.line, kw.col, "unknown statement '" + kw.text + "'");
    ps.expect(Tok::Colon, "':'");
    auto lhs = ps.term();
    std::unique_ptr<Ast> rhs;
    if (unify) {
      ps.expect(Tok::Unif, "'=?='");
      rhs = ps.term();
    }
    ps.expect(Tok::Dot, "'.'");
    Elaborator el(pf.sig, false);
    FreshSupply none;
    el.elaborate(*lhs, std::nullopt);
    if (rhs) el.elaborate(*rhs, std::nullopt);
    std::vector<Term> ts = el.finish(none);
    if (unify) {
      if (ts[0].type() != ts[1].type()) throw DeclError(kw.line, kw.col, "goal sides have different types");
      pf.goals.push_back({ts[0], ts[1]});
    } else if (store) {
      pf.terms.push_back(ts[0]);
    } else {
      pf.queries.push_back({qm, ts[0]});
    }
  }
  return pf;
}

ProblemFile read_problem_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str());
}

Type parse_type(std::string_view text, const Signature& sig) {
  Signature copy = sig;
  Parser ps(lex(text), copy);
  Type t = ps.type();
  if (!ps.at(Tok::End)) ps.fail("unexpected input after type");
  return t;
}

Term parse_term(std::string_view text, const Signature& sig) {
  Signature copy = sig;
  Parser ps(lex(text), copy);
  auto ast = ps.term();
  if (!ps.at(Tok::End)) ps.fail("unexpected input after term");
  Elaborator el(sig, false);
  FreshSupply none;
  el.elaborate(*ast, std::nullopt);
  return el.finish(none).front();
}

// ---------------------------------------------------------------- printing

std::string print_type(const Type& t, const Signature& sig) {
  auto base = [&](const Type& b) {
    SymbolId id = b.base_id();
    return id < sig.base_names.size() ? sig.base_names[id] : "t" + std::to_string(id);
  };
  if (t.is_base()) return base(t);
  std::string dom = print_type(t.domain(), sig);
  if (t.domain().is_arrow()) dom = "(" + dom + ")";
  return dom + " > " + print_type(t.codomain(), sig);
}

std::string AuxNames::name(VarId id) {
  auto it = names_.find(id);
  if (it != names_.end()) return it->second;
  std::string n = "H_" + std::to_string(names_.size() + 1);
  names_.emplace(id, n);
  return n;
}

namespace {

class Printer {
 public:
  Printer(const Signature& sig, AuxNames& aux) : sig_(sig), aux_(aux) {}

  std::string binder_name(std::size_t depth) {
    std::string n = "x" + std::to_string(depth + 1);
    while (sig_.const_index.count(n) || sig_.var_index.count(n)) n += "_";
    return n;
  }

  void print(const Term& t, std::string& out, std::vector<std::string>& names, bool atomic) {
    switch (t.kind()) {
      case TermKind::FreeVar: {
        const std::string* n = sig_.var_name(t.var_id());
        bool own = n && t.var_id() < sig_.vars.size() && sig_.vars[t.var_id()] == t;
        out += own ? *n : aux_.name(t.var_id());
        return;
      }
      case TermKind::BoundVar: {
        std::uint32_t i = t.bound_index();
        out += i < names.size() ? names[names.size() - 1 - i] : "?" + std::to_string(i);
        return;
      }
      case TermKind::Const: {
        SymbolId id = t.const_id();
        out += id < sig_.const_names.size() ? sig_.const_names[id] : "c" + std::to_string(id);
        return;
      }
      case TermKind::App: {
        if (atomic) out += "(";
        Spine sp = spine(t);
        print(sp.head, out, names, true);
        for (const Term& a : sp.args) {
          out += " ";
          print(a, out, names, true);
        }
        if (atomic) out += ")";
        return;
      }
      case TermKind::Lam: {
        if (atomic) out += "(";
        std::string n = binder_name(names.size());
        out += "\\" + n + ":" + print_type(t.binder_type(), sig_) + ". ";
        names.push_back(n);
        print(t.body(), out, names, false);
        names.pop_back();
        if (atomic) out += ")";
        return;
      }
    }
  }

 private:
  const Signature& sig_;
  AuxNames& aux_;
};

}  // namespace

std::string print_term(const Term& t, const Signature& sig, AuxNames& aux) {
  std::string out;
  std::vector<std::string> names;
  Printer(sig, aux).print(t, out, names, false);
  return out;
}

std::string print_term(const Term& t, const Signature& sig) {
  AuxNames aux;
  return print_term(t, sig, aux);
}

std::string print_unifier(const Substitution& sigma, const ProblemFile& problem) {
  const Signature& sig = problem.sig;
  std::vector<std::pair<std::string, const Term*>> lines;
  for (const auto& [id, e] : sigma.entries()) {
    const std::string* n = sig.var_name(id);
    if (!n) continue;
    lines.emplace_back(*n, &e.image);
  }
  std::sort(lines.begin(), lines.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  if (lines.empty()) return "identity\n";
  AuxNames aux;
  std::string out;
  for (const auto& [name, img] : lines) out += name + " -> " + print_term(eta_long_beta_normal(*img), sig, aux) + "\n";
  return out;
}

Substitution parse_unifier(std::string_view text, const ProblemFile& problem) {
  Signature sig = problem.sig;
  std::vector<Token> toks = lex(text);
  // One binding per line: images are not delimited otherwise.
  std::vector<std::vector<Token>> lines;
  for (const Token& t : toks) {
    if (t.kind == Tok::End) break;
    if (lines.empty() || lines.back().back().line != t.line) lines.emplace_back();
    lines.back().push_back(t);
  }
  for (auto& line : lines) {
    const Token& last = line.back();
    line.push_back({Tok::End, "", last.line, last.col + last.text.size()});
  }
  if (lines.size() == 1 && lines[0].size() == 2 && lines[0][0].kind == Tok::Ident && lines[0][0].text == "identity")
    return {};
  Elaborator el(problem.sig, true);
  std::vector<Term> targets;
  std::vector<std::unique_ptr<Ast>> asts;
  for (auto& line : lines) {
    Parser ps(std::move(line), sig);
    Token name = ps.expect(Tok::Ident, "a variable name");
    auto it = problem.sig.var_index.find(name.text);
    if (it == problem.sig.var_index.end()) throw DeclError(name.line, name.col, "unknown variable '" + name.text + "'");
    ps.expect(Tok::Arrow, "'->'");
    auto ast = ps.term();
    if (!ps.at(Tok::End)) ps.fail("unexpected input after the image");
    const Term& var = problem.sig.vars[it->second];
    el.elaborate(*ast, var.type());
    targets.push_back(var);
    asts.push_back(std::move(ast));
  }
  FreshSupply supply(static_cast<VarId>(problem.sig.vars.size()));
  std::vector<Term> images = el.finish(supply);
  Substitution out;
  for (std::size_t i = 0; i < targets.size(); ++i) out.set(targets[i], images[i]);
  return out;
}

std::string print_problem(const ProblemFile& problem) {
  const Signature& sig = problem.sig;
  std::string out;
  for (const std::string& b : sig.base_names) out += "tp " + b + ".\n";
  for (std::size_t i = 0; i < sig.consts.size(); ++i)
    out += "const " + sig.const_names[i] + " : " + print_type(sig.consts[i].type(), sig) + ".\n";
  for (std::size_t i = 0; i < sig.vars.size(); ++i)
    out += "var " + sig.var_names[i] + " : " + print_type(sig.vars[i].type(), sig) + ".\n";
  for (const Constraint& c : problem.goals)
    out += "unify: " + print_term(c.lhs, sig) + " =?= " + print_term(c.rhs, sig) + ".\n";
  for (const Term& t : problem.terms) out += "term: " + print_term(t, sig) + ".\n";
  for (const IndexQuery& q : problem.queries)
    out += std::string(q.matching ? "query-match: " : "query-unif: ") + print_term(q.term, sig) + ".\n";
  return out;
}

}  // namespace hou
