#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "cllr/refinement.hpp"
#include "cllr/semantics.hpp"
#include "cllr/syntax.hpp"

// Slow, direct implementations used to cross-check the library.
namespace cllr::oracle {

using Pair = std::pair<StateId, StateId>;

inline std::set<Action> visible_ready(const Lts& lts, StateId s) {
  std::set<Action> r;
  for (const auto& a : lts.ready(s))
    if (!a.is_tau()) r.insert(a);
  return r;
}

inline std::set<Action> labels(const Lts& l, const Lts& r) {
  std::set<Action> out;
  for (const auto& t : l.transitions())
    if (!t.label.is_tau()) out.insert(t.label);
  for (const auto& t : r.transitions())
    if (!t.label.is_tau()) out.insert(t.label);
  return out;
}

// Stable ready simulation as the largest relation left after repeatedly
// deleting pairs that break a clause.
inline std::set<Pair> stable_rs(const Lts& l, const Lts& r) {
  std::set<Pair> rel;
  for (StateId p = 0; p < l.size(); ++p)
    for (StateId q = 0; q < r.size(); ++q)
      if (l.stable(p) && r.stable(q)) rel.insert({p, q});
  const auto acts = labels(l, r);
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = rel.begin(); it != rel.end();) {
      auto [p, q] = *it;
      bool ok = true;
      if (!l.inconsistent(p)) {
        ok = !r.inconsistent(q) && visible_ready(l, p) == visible_ready(r, q);
        for (auto a = acts.begin(); ok && a != acts.end(); ++a) {
          for (StateId p1 : weak_a_f(l, p, *a)) {
            auto qs = weak_a_f(r, q, *a);
            if (std::none_of(qs.begin(), qs.end(), [&](StateId q1) { return rel.count({p1, q1}); })) {
              ok = false;
              break;
            }
          }
        }
      }
      if (ok) {
        ++it;
      } else {
        it = rel.erase(it);
        changed = true;
      }
    }
  }
  return rel;
}

inline bool refines(const Lts& l, StateId p, const Lts& r, StateId q) {
  auto rel = oracle::stable_rs(l, r);
  auto qs = weak_eps_f(r, q);
  for (StateId p1 : weak_eps_f(l, p))
    if (std::none_of(qs.begin(), qs.end(), [&](StateId q1) { return rel.count({p1, q1}); }))
      return false;
  return true;
}

// True iff `rel` satisfies the stable ready simulation clauses.
inline bool is_stable_rs(const std::set<Pair>& rel, const Lts& l, const Lts& r) {
  const auto acts = labels(l, r);
  for (auto [p, q] : rel) {
    if (!l.stable(p) || !r.stable(q)) return false;
    if (l.inconsistent(p)) continue;
    if (r.inconsistent(q) || visible_ready(l, p) != visible_ready(r, q)) return false;
    for (const auto& a : acts)
      for (StateId p1 : weak_a_f(l, p, a)) {
        auto qs = weak_a_f(r, q, a);
        if (std::none_of(qs.begin(), qs.end(), [&](StateId q1) { return rel.count({p1, q1}); }))
          return false;
      }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Inconsistency predicate: closure check of a candidate set against the
// predicative rules, and the least closed set by exhaustive search.
// ---------------------------------------------------------------------------

inline std::vector<StateId> stable_descendants(const Lts& lts, StateId s) {
  std::set<StateId> seen{s};
  std::vector<StateId> todo{s}, out;
  while (!todo.empty()) {
    StateId u = todo.back();
    todo.pop_back();
    if (lts.stable(u)) out.push_back(u);
    for (const auto& t : lts.transitions())
      if (t.from == u && t.label.is_tau() && seen.insert(t.to).second) todo.push_back(t.to);
  }
  return out;
}

// Whether some rule derives s from the members of `in`.
inline bool derivable(const Lts& lts, StateId s, const std::vector<bool>& in) {
  const State& st = lts.state(s);
  const auto& c = st.components;
  auto all_in = [&](const std::vector<StateId>& xs) {
    for (auto x : xs)
      if (!in[x]) return false;
    return true;
  };
  switch (st.term.kind()) {
    case TermKind::Bot: return true;
    case TermKind::Prefix: return in[c.at(0)];
    case TermKind::Disj: return in[c.at(0)] && in[c.at(1)];
    case TermKind::Choice:
    case TermKind::Par: return in[c.at(0)] || in[c.at(1)];
    case TermKind::Conj: {
      if (in[c.at(0)] || in[c.at(1)]) return true;
      if (lts.stable(s) && visible_ready(lts, c[0]) != visible_ready(lts, c[1])) return true;
      for (const auto& a : lts.ready(s)) {
        if (all_in(lts.successors(s, a))) return true;
      }
      return all_in(stable_descendants(lts, s));
    }
    case TermKind::Rec: return in[c.at(0)] || all_in(stable_descendants(lts, s));
    default: return false;
  }
}

inline bool closed_under_rules(const Lts& lts, const std::vector<bool>& in) {
  for (StateId s = 0; s < lts.size(); ++s)
    if (!in[s] && derivable(lts, s, in)) return false;
  return true;
}

// The intersection of all rule-closed subsets. Exponential; graphs of at most
// a dozen states.
inline std::vector<bool> least_f(const Lts& lts) {
  const std::size_t n = lts.size();
  std::vector<bool> meet(n, true);
  for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
    std::vector<bool> in(n);
    for (std::size_t i = 0; i < n; ++i) in[i] = (bits >> i) & 1u;
    if (!closed_under_rules(lts, in)) continue;
    for (std::size_t i = 0; i < n; ++i) meet[i] = meet[i] && in[i];
  }
  return meet;
}

// ---------------------------------------------------------------------------
// Reachable graph straight from the term-level rules, keyed by canonical
// text.
// ---------------------------------------------------------------------------

struct KeyGraph {
  std::set<std::string> states;
  std::set<std::tuple<std::string, std::string, std::string>> edges;
};

inline std::string key_of(const Term& t, bool normalize) {
  return canonical_key(normalize ? normalize_conjunctions(t) : t);
}

inline std::optional<KeyGraph> explore(const Term& root, bool normalize, std::size_t bound) {
  KeyGraph g;
  std::map<std::string, Term> terms;
  std::deque<std::string> todo;
  auto visit = [&](const Term& t) {
    std::string k = key_of(t, normalize);
    if (g.states.insert(k).second) {
      terms.emplace(k, normalize ? normalize_conjunctions(t) : t);
      todo.push_back(k);
    }
    return k;
  };
  visit(root);
  while (!todo.empty()) {
    if (g.states.size() > bound) return std::nullopt;
    std::string k = todo.front();
    todo.pop_front();
    for (const auto& step : successors(terms.at(k)))
      g.edges.insert({k, step.first.name(), visit(step.second)});
  }
  return g;
}

inline KeyGraph reachable_part(const Lts& lts) {
  KeyGraph g;
  for (StateId s = 0; s < lts.size(); ++s)
    if (lts.state(s).reachable) g.states.insert(lts.state(s).key);
  for (const auto& t : lts.transitions())
    if (lts.state(t.from).reachable)
      g.edges.insert({lts.state(t.from).key, t.label.name(), lts.state(t.to).key});
  return g;
}

}  // namespace cllr::oracle
