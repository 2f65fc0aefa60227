#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "cllr/action.hpp"
#include "cllr/error.hpp"
#include "cllr/term.hpp"

namespace cllr {

using VarSet = std::set<std::string>;
using Substitution = std::map<std::string, Term>;

// Ordering Unguarded < Weak < Strong.
enum class GuardMode { Unguarded = 0, Weak = 1, Strong = 2 };

inline std::string_view to_string(GuardMode m) {
  switch (m) {
    case GuardMode::Unguarded: return "unguarded";
    case GuardMode::Weak: return "weak";
    case GuardMode::Strong: return "strong";
  }
  return "";
}

namespace detail {

inline void collect_free(const Term& t, VarSet& bound_here, VarSet& out,
                         std::vector<std::string>* ordered) {
  switch (t.kind()) {
    case TermKind::Var:
      if (!bound_here.count(t.name())) {
        if (out.insert(t.name()).second && ordered) ordered->push_back(t.name());
      }
      break;
    case TermKind::Prefix: collect_free(t.body(), bound_here, out, ordered); break;
    case TermKind::Rec: {
      std::vector<std::string> added;
      for (const auto& b : t.bindings())
        if (bound_here.insert(b.var).second) added.push_back(b.var);
      for (const auto& b : t.bindings()) collect_free(b.body, bound_here, out, ordered);
      for (const auto& v : added) bound_here.erase(v);
      break;
    }
    case TermKind::Nil:
    case TermKind::Bot: break;
    default:
      collect_free(t.left(), bound_here, out, ordered);
      collect_free(t.right(), bound_here, out, ordered);
  }
}

}  // namespace detail

inline VarSet free_vars(const Term& t) {
  VarSet bound, out;
  detail::collect_free(t, bound, out, nullptr);
  return out;
}

// Free variables in order of first (pre-order, left-to-right) occurrence.
inline std::vector<std::string> free_vars_ordered(const Term& t) {
  VarSet bound, out;
  std::vector<std::string> ordered;
  detail::collect_free(t, bound, out, &ordered);
  return ordered;
}

inline bool is_closed(const Term& t) { return free_vars(t).empty(); }

inline bool occurs_free(const Term& t, const std::string& x) { return free_vars(t).count(x) > 0; }

// All visible actions mentioned in t (prefixes and synchronisation sets),
// in order of first occurrence.
inline Alphabet actions_of(const Term& t) {
  Alphabet out;
  auto walk = [&](auto&& self, const Term& u) -> void {
    switch (u.kind()) {
      case TermKind::Prefix:
        if (!u.action().is_tau()) out.add(u.action().name());
        self(self, u.body());
        break;
      case TermKind::Rec:
        for (const auto& b : u.bindings()) self(self, b.body);
        break;
      case TermKind::Par:
        self(self, u.left());
        for (const auto& a : u.sync()) out.add(a.name());
        self(self, u.right());
        break;
      case TermKind::Choice:
      case TermKind::Conj:
      case TermKind::Disj:
        self(self, u.left());
        self(self, u.right());
        break;
      default: break;
    }
  };
  walk(walk, t);
  return out;
}

// A variable name based on `base` that is not in `avoid`.
inline std::string fresh_variable(const std::string& base, const VarSet& avoid) {
  std::string stem = base;
  auto us = stem.rfind('_');
  if (us != std::string::npos && us + 1 < stem.size() &&
      std::all_of(stem.begin() + static_cast<std::ptrdiff_t>(us) + 1, stem.end(),
                  [](char c) { return c >= '0' && c <= '9'; }))
    stem.erase(us);
  for (std::size_t i = 1;; ++i) {
    std::string candidate = stem + "_" + std::to_string(i);
    if (!avoid.count(candidate)) return candidate;
  }
}

// Simultaneous capture-avoiding substitution of free variables.
inline Term substitute(const Term& t, const Substitution& subst) {
  if (subst.empty()) return t;
  switch (t.kind()) {
    case TermKind::Nil:
    case TermKind::Bot: return t;
    case TermKind::Var: {
      auto it = subst.find(t.name());
      return it == subst.end() ? t : it->second;
    }
    case TermKind::Prefix: {
      Term body = substitute(t.body(), subst);
      return body.same_node(t.body()) ? t : Term::prefix(t.action(), std::move(body));
    }
    case TermKind::Rec: {
      VarSet bound;
      for (const auto& b : t.bindings()) bound.insert(b.var);
      const VarSet fv = free_vars(t);
      Substitution active;
      for (const auto& [x, r] : subst)
        if (!bound.count(x) && fv.count(x)) active.emplace(x, r);
      if (active.empty()) return t;

      VarSet incoming;
      for (const auto& [x, r] : active) {
        auto rfv = free_vars(r);
        incoming.insert(rfv.begin(), rfv.end());
      }
      // Rename binders that would capture free variables of the replacements.
      Substitution rename;
      std::map<std::string, std::string> new_names;
      VarSet avoid = incoming;
      avoid.insert(fv.begin(), fv.end());
      avoid.insert(bound.begin(), bound.end());
      for (const auto& [x, r] : active) avoid.insert(x);
      for (const auto& v : bound) {
        if (incoming.count(v)) {
          std::string fresh = fresh_variable(v, avoid);
          avoid.insert(fresh);
          new_names[v] = fresh;
          rename.emplace(v, Term::var(fresh));
        }
      }
      std::vector<Binding> out;
      out.reserve(t.bindings().size());
      for (const auto& b : t.bindings()) {
        Term body = rename.empty() ? b.body : substitute(b.body, rename);
        auto nn = new_names.find(b.var);
        out.push_back({nn == new_names.end() ? b.var : nn->second, substitute(body, active)});
      }
      auto ni = new_names.find(t.name());
      return Term::rec(ni == new_names.end() ? t.name() : ni->second, std::move(out));
    }
    default: {
      Term l = substitute(t.left(), subst);
      Term r = substitute(t.right(), subst);
      if (l.same_node(t.left()) && r.same_node(t.right())) return t;
      switch (t.kind()) {
        case TermKind::Choice: return Term::choice(std::move(l), std::move(r));
        case TermKind::Conj: return Term::conj(std::move(l), std::move(r));
        case TermKind::Disj: return Term::disj(std::move(l), std::move(r));
        default: return Term::par(t.sync(), std::move(l), std::move(r));
      }
    }
  }
}

inline Term substitute(const Term& t, const std::string& x, const Term& replacement) {
  return substitute(t, Substitution{{x, replacement}});
}

// ⟨t_init|E⟩: the body of the initial variable with every bound variable Y
// replaced by ⟨Y|E⟩.
inline Term unfold(const Term& rec) {
  Substitution s;
  for (const auto& b : rec.bindings()) s.emplace(b.var, Term::rec(b.var, rec.bindings()));
  const Term* body = rec.binding(rec.name());
  if (!body) throw Error(ErrorKind::Precondition, "initial variable " + rec.name() + " is not bound");
  return substitute(*body, s);
}

namespace detail {

class Canonicalizer {
 public:
  explicit Canonicalizer(VarSet avoid) : avoid_(std::move(avoid)) {}

  Term run(const Term& t) {
    switch (t.kind()) {
      case TermKind::Nil:
      case TermKind::Bot: return t;
      case TermKind::Var: {
        auto it = env_.find(t.name());
        if (it == env_.end() || it->second.empty()) return t;
        return Term::var(it->second.back());
      }
      case TermKind::Prefix: return Term::prefix(t.action(), run(t.body()));
      case TermKind::Rec: return run_rec(t);
      default: {
        Term l = run(t.left());
        Term r = run(t.right());
        switch (t.kind()) {
          case TermKind::Choice: return Term::choice(std::move(l), std::move(r));
          case TermKind::Conj: return Term::conj(std::move(l), std::move(r));
          case TermKind::Disj: return Term::disj(std::move(l), std::move(r));
          default: return Term::par(t.sync(), std::move(l), std::move(r));
        }
      }
    }
  }

 private:
  std::string next_name() {
    for (;;) {
      std::string n = "X" + std::to_string(counter_++);
      if (!avoid_.count(n)) return n;
    }
  }

  // Bindings are ordered: initial variable first, then by first reference
  // from already-ordered bodies, then the unreferenced rest in declaration order.
  Term run_rec(const Term& t) {
    const auto& bs = t.bindings();
    std::vector<std::size_t> order;
    std::vector<bool> placed(bs.size(), false);
    auto index_of = [&](const std::string& v) -> std::size_t {
      for (std::size_t i = 0; i < bs.size(); ++i)
        if (bs[i].var == v) return i;
      return bs.size();
    };
    auto place = [&](std::size_t i) {
      if (i < bs.size() && !placed[i]) {
        placed[i] = true;
        order.push_back(i);
      }
    };
    place(index_of(t.name()));
    for (std::size_t k = 0; k < order.size(); ++k) {
      for (const auto& v : free_vars_ordered(bs[order[k]].body)) place(index_of(v));
    }
    for (std::size_t i = 0; i < bs.size(); ++i) place(i);

    // Top-level recursions are independent scopes, so numbering restarts;
    // this keeps the canonical form of a closed subterm context-free.
    if (depth_ == 0) counter_ = 0;
    ++depth_;
    std::vector<std::string> names(bs.size());
    for (std::size_t i : order) {
      names[i] = next_name();
      env_[bs[i].var].push_back(names[i]);
    }
    std::vector<Binding> out;
    out.reserve(bs.size());
    for (std::size_t i : order) out.push_back({names[i], run(bs[i].body)});
    for (std::size_t i : order) env_[bs[i].var].pop_back();
    --depth_;
    std::size_t init = index_of(t.name());
    return Term::rec(init < bs.size() ? names[init] : t.name(), std::move(out));
  }

  VarSet avoid_;
  std::size_t counter_ = 0;
  std::size_t depth_ = 0;
  std::unordered_map<std::string, std::vector<std::string>> env_;
};

}  // namespace detail

// Renames bound variables to X0, X1, ... in traversal order, restarting at
// every recursion not nested in another one (skipping any name free in t). Two terms get identical results iff they are
// α-equivalent.
inline Term alpha_canon(const Term& t) {
  detail::Canonicalizer c(free_vars(t));
  return c.run(t);
}

// Printed canonical form; used as the identity of states.
inline std::string canonical_key(const Term& t) { return to_string(alpha_canon(t)); }

inline GuardMode guard_mode(const Term& t, const std::string& x) {
  GuardMode result = GuardMode::Strong;
  auto walk = [&](auto&& self, const Term& u, GuardMode level) -> void {
    switch (u.kind()) {
      case TermKind::Var:
        if (u.name() == x) result = std::min(result, level);
        break;
      case TermKind::Prefix:
        self(self, u.body(),
             u.action().is_tau() ? std::max(level, GuardMode::Weak) : GuardMode::Strong);
        break;
      case TermKind::Disj:
        self(self, u.left(), std::max(level, GuardMode::Weak));
        self(self, u.right(), std::max(level, GuardMode::Weak));
        break;
      case TermKind::Rec:
        if (u.binding(x)) break;  // shadowed
        for (const auto& b : u.bindings()) self(self, b.body, level);
        break;
      case TermKind::Nil:
      case TermKind::Bot: break;
      default:
        self(self, u.left(), level);
        self(self, u.right(), level);
    }
  };
  walk(walk, t, GuardMode::Unguarded);
  return result;
}

// True iff no free occurrence of x lies inside an operand of a conjunction.
inline bool conj_scope_free(const Term& t, const std::string& x) {
  auto walk = [&](auto&& self, const Term& u, bool in_conj) -> bool {
    switch (u.kind()) {
      case TermKind::Var: return !(in_conj && u.name() == x);
      case TermKind::Prefix: return self(self, u.body(), in_conj);
      case TermKind::Rec:
        if (u.binding(x)) return true;
        for (const auto& b : u.bindings())
          if (!self(self, b.body, in_conj)) return false;
        return true;
      case TermKind::Nil:
      case TermKind::Bot: return true;
      case TermKind::Conj:
        return self(self, u.left(), true) && self(self, u.right(), true);
      default: return self(self, u.left(), in_conj) && self(self, u.right(), in_conj);
    }
  };
  return walk(walk, t, false);
}

// Checks the standing well-formedness assumptions: every Rec has distinct,
// nonempty bindings with a bound initial variable and is guarded; tau never
// appears in a synchronisation set; with a nonempty alphabet, every visible
// action is declared in it.
inline void validate(const Term& t, const Alphabet& alphabet = {}) {
  auto check_action = [&](const Action& a) {
    if (a.is_tau()) return;
    if (!alphabet.empty() && !alphabet.contains(a))
      throw Error(ErrorKind::UnknownAction, "action '" + a.name() + "' is not in the alphabet {" +
                                                alphabet.to_string() + "}");
  };
  auto walk = [&](auto&& self, const Term& u) -> void {
    switch (u.kind()) {
      case TermKind::Prefix:
        check_action(u.action());
        self(self, u.body());
        break;
      case TermKind::Par:
        for (const auto& a : u.sync()) {
          if (a.is_tau())
            throw Error(ErrorKind::Precondition, "tau cannot occur in a synchronisation set");
          check_action(a);
        }
        self(self, u.left());
        self(self, u.right());
        break;
      case TermKind::Choice:
      case TermKind::Conj:
      case TermKind::Disj:
        self(self, u.left());
        self(self, u.right());
        break;
      case TermKind::Rec: {
        if (u.bindings().empty())
          throw Error(ErrorKind::Precondition, "recursive specification has no equations");
        VarSet seen;
        for (const auto& b : u.bindings())
          if (!seen.insert(b.var).second)
            throw Error(ErrorKind::DuplicateBoundVariable, "variable " + b.var + " is bound twice");
        if (!seen.count(u.name()))
          throw Error(ErrorKind::Precondition, "initial variable " + u.name() + " is not bound");
        for (const auto& b : u.bindings()) {
          for (const auto& v : seen) {
            if (guard_mode(b.body, v) == GuardMode::Unguarded)
              throw Error(ErrorKind::UnguardedRecursion,
                          "variable " + v + " occurs unguarded in the equation for " + b.var);
          }
          self(self, b.body);
        }
        break;
      }
      default: break;
    }
  };
  walk(walk, t);
}

}  // namespace cllr
