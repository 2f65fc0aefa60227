#pragma once

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <memory>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cllr/action.hpp"

namespace cllr {

enum class TermKind { Nil, Bot, Prefix, Choice, Conj, Disj, Par, Var, Rec };

using ActionSet = std::set<Action>;

class Term;

struct Binding;

// Immutable, structurally shared syntax tree of a process or context.
// Free variables are allowed; a Term with no free variables is a process.
class Term {
 public:
  // Default-constructed terms are 0.
  Term();

  static Term nil();
  static Term bot();
  static Term prefix(Action action, Term body);
  static Term choice(Term left, Term right);
  static Term conj(Term left, Term right);
  static Term disj(Term left, Term right);
  static Term par(ActionSet sync, Term left, Term right);
  static Term var(std::string name);
  static Term rec(std::string init, std::vector<Binding> bindings);

  TermKind kind() const noexcept;

  // Prefix only.
  const Action& action() const;
  const Term& body() const;
  // Choice, Conj, Disj, Par.
  const Term& left() const;
  const Term& right() const;
  // Par only.
  const ActionSet& sync() const;
  // Var: the variable; Rec: the initial variable.
  const std::string& name() const;
  // Rec only, in declaration order.
  const std::vector<Binding>& bindings() const;
  const Term* binding(const std::string& var) const;

  bool is_binary() const noexcept {
    auto k = kind();
    return k == TermKind::Choice || k == TermKind::Conj || k == TermKind::Disj ||
           k == TermKind::Par;
  }

  std::size_t size() const;

  // Same node (cheap identity, not structural equality).
  bool same_node(const Term& other) const noexcept { return node_ == other.node_; }

  // Address of the shared node; valid while some Term refers to it.
  const void* identity() const noexcept { return node_.get(); }

  friend bool operator==(const Term& a, const Term& b);
  friend int compare(const Term& a, const Term& b);

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

struct Binding {
  std::string var;
  Term body;

  friend bool operator==(const Binding&, const Binding&) = default;
};

struct Term::Node {
  TermKind kind = TermKind::Nil;
  Action action;
  std::string name;
  ActionSet sync;
  std::vector<Term> kids;
  std::vector<Binding> bindings;
};

inline Term::Term() : Term(nil()) {}

inline Term Term::nil() {
  static const auto node = std::make_shared<const Node>(Node{TermKind::Nil, {}, {}, {}, {}, {}});
  return Term(node);
}

inline Term Term::bot() {
  static const auto node = std::make_shared<const Node>(Node{TermKind::Bot, {}, {}, {}, {}, {}});
  return Term(node);
}

inline Term Term::prefix(Action action, Term body) {
  return Term(std::make_shared<const Node>(
      Node{TermKind::Prefix, std::move(action), {}, {}, {std::move(body)}, {}}));
}

inline Term Term::choice(Term left, Term right) {
  return Term(std::make_shared<const Node>(
      Node{TermKind::Choice, {}, {}, {}, {std::move(left), std::move(right)}, {}}));
}

inline Term Term::conj(Term left, Term right) {
  return Term(std::make_shared<const Node>(
      Node{TermKind::Conj, {}, {}, {}, {std::move(left), std::move(right)}, {}}));
}

inline Term Term::disj(Term left, Term right) {
  return Term(std::make_shared<const Node>(
      Node{TermKind::Disj, {}, {}, {}, {std::move(left), std::move(right)}, {}}));
}

inline Term Term::par(ActionSet sync, Term left, Term right) {
  return Term(std::make_shared<const Node>(Node{
      TermKind::Par, {}, {}, std::move(sync), {std::move(left), std::move(right)}, {}}));
}

inline Term Term::var(std::string name) {
  return Term(std::make_shared<const Node>(
      Node{TermKind::Var, {}, std::move(name), {}, {}, {}}));
}

inline Term Term::rec(std::string init, std::vector<Binding> bindings) {
  return Term(std::make_shared<const Node>(
      Node{TermKind::Rec, {}, std::move(init), {}, {}, std::move(bindings)}));
}

inline TermKind Term::kind() const noexcept { return node_->kind; }

inline const Action& Term::action() const {
  assert(kind() == TermKind::Prefix);
  return node_->action;
}

inline const Term& Term::body() const {
  assert(kind() == TermKind::Prefix);
  return node_->kids[0];
}

inline const Term& Term::left() const {
  assert(is_binary());
  return node_->kids[0];
}

inline const Term& Term::right() const {
  assert(is_binary());
  return node_->kids[1];
}

inline const ActionSet& Term::sync() const {
  assert(kind() == TermKind::Par);
  return node_->sync;
}

inline const std::string& Term::name() const {
  assert(kind() == TermKind::Var || kind() == TermKind::Rec);
  return node_->name;
}

inline const std::vector<Binding>& Term::bindings() const {
  assert(kind() == TermKind::Rec);
  return node_->bindings;
}

inline const Term* Term::binding(const std::string& var) const {
  for (const auto& b : bindings())
    if (b.var == var) return &b.body;
  return nullptr;
}

inline std::size_t Term::size() const {
  std::size_t n = 1;
  for (const auto& k : node_->kids) n += k.size();
  for (const auto& b : node_->bindings) n += b.body.size();
  return n;
}

inline bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  return x.kind == y.kind && x.action == y.action && x.name == y.name &&
         x.sync == y.sync && x.kids == y.kids && x.bindings == y.bindings;
}

// Structural total order: kind, action, name, synchronisation set, operands,
// then bindings. Negative, zero or positive like strcmp.
inline int compare(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return 0;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.kind != y.kind) return x.kind < y.kind ? -1 : 1;
  if (int c = x.action.name().compare(y.action.name())) return c < 0 ? -1 : 1;
  if (int c = x.name.compare(y.name)) return c < 0 ? -1 : 1;
  if (x.sync != y.sync) return x.sync < y.sync ? -1 : 1;
  for (std::size_t i = 0; i < x.kids.size(); ++i)
    if (int c = compare(x.kids[i], y.kids[i])) return c;
  const std::size_t n = std::min(x.bindings.size(), y.bindings.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = x.bindings[i].var.compare(y.bindings[i].var)) return c < 0 ? -1 : 1;
    if (int c = compare(x.bindings[i].body, y.bindings[i].body)) return c;
  }
  if (x.bindings.size() != y.bindings.size()) return x.bindings.size() < y.bindings.size() ? -1 : 1;
  return 0;
}

// Pretty printing in the concrete ASCII grammar. Precedence, loosest first:
// |[A]|, [], \/, /\, prefix. Binary operators associate to the left.
namespace detail {

inline int precedence(TermKind kind) {
  switch (kind) {
    case TermKind::Par: return 1;
    case TermKind::Choice: return 2;
    case TermKind::Disj: return 3;
    case TermKind::Conj: return 4;
    case TermKind::Prefix: return 5;
    default: return 6;
  }
}

inline void print(std::string& out, const Term& t, int context) {
  const int level = precedence(t.kind());
  const bool parens = level < context;
  if (parens) out += '(';
  switch (t.kind()) {
    case TermKind::Nil: out += '0'; break;
    case TermKind::Bot: out += "bot"; break;
    case TermKind::Var: out += t.name(); break;
    case TermKind::Prefix:
      out += t.action().name();
      out += '.';
      print(out, t.body(), level);
      break;
    case TermKind::Rec: {
      out += '<';
      out += t.name();
      out += " | ";
      bool first = true;
      for (const auto& b : t.bindings()) {
        if (!first) out += ", ";
        first = false;
        out += b.var;
        out += " = ";
        print(out, b.body, 0);
      }
      out += '>';
      break;
    }
    default: {
      print(out, t.left(), level);
      switch (t.kind()) {
        case TermKind::Choice: out += " [] "; break;
        case TermKind::Conj: out += " /\\ "; break;
        case TermKind::Disj: out += " \\/ "; break;
        default: {
          out += " |[";
          bool first = true;
          for (const auto& a : t.sync()) {
            if (!first) out += ',';
            first = false;
            out += a.name();
          }
          out += "]| ";
        }
      }
      print(out, t.right(), level + 1);
    }
  }
  if (parens) out += ')';
}

}  // namespace detail

inline std::string to_string(const Term& t) {
  std::string out;
  detail::print(out, t, 0);
  return out;
}

inline std::ostream& operator<<(std::ostream& os, const Term& t) { return os << to_string(t); }

}  // namespace cllr
