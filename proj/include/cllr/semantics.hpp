#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <tuple>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cllr/action.hpp"
#include "cllr/error.hpp"
#include "cllr/syntax.hpp"
#include "cllr/term.hpp"

namespace cllr {

using Step = std::pair<Action, Term>;

// ---------------------------------------------------------------------------
// One-step operational semantics.
//
// Every negative premise of the rules has the form "x has no tau-step", and
// tau-steps are derived by negation-free rules only. So tau-successors are
// computed first and the visible rules only ask whether operands can do tau.
// ---------------------------------------------------------------------------

namespace detail {

inline Term rebuild(const Term& t, Term l, Term r) {
  switch (t.kind()) {
    case TermKind::Choice: return Term::choice(std::move(l), std::move(r));
    case TermKind::Conj: return Term::conj(std::move(l), std::move(r));
    case TermKind::Disj: return Term::disj(std::move(l), std::move(r));
    default: return Term::par(t.sync(), std::move(l), std::move(r));
  }
}

}  // namespace detail

inline bool has_tau(const Term& t) {
  switch (t.kind()) {
    case TermKind::Prefix: return t.action().is_tau();
    case TermKind::Disj: return true;
    case TermKind::Choice:
    case TermKind::Conj:
    case TermKind::Par: return has_tau(t.left()) || has_tau(t.right());
    case TermKind::Rec: return has_tau(unfold(t));
    default: return false;
  }
}

inline std::vector<Term> tau_successors(const Term& t) {
  std::vector<Term> out;
  switch (t.kind()) {
    case TermKind::Prefix:
      if (t.action().is_tau()) out.push_back(t.body());
      break;
    case TermKind::Disj:
      out.push_back(t.left());
      out.push_back(t.right());
      break;
    case TermKind::Choice:
    case TermKind::Conj:
    case TermKind::Par:
      for (auto& l : tau_successors(t.left())) out.push_back(detail::rebuild(t, l, t.right()));
      for (auto& r : tau_successors(t.right())) out.push_back(detail::rebuild(t, t.left(), r));
      break;
    case TermKind::Rec: return tau_successors(unfold(t));
    default: break;
  }
  return out;
}

inline std::vector<Step> visible_successors(const Term& t) {
  std::vector<Step> out;
  switch (t.kind()) {
    case TermKind::Prefix:
      if (!t.action().is_tau()) out.emplace_back(t.action(), t.body());
      break;
    case TermKind::Choice: {
      const bool left_tau = has_tau(t.left());
      const bool right_tau = has_tau(t.right());
      if (!right_tau) {
        for (auto& s : visible_successors(t.left())) out.push_back(std::move(s));
      }
      if (!left_tau) {
        for (auto& s : visible_successors(t.right())) out.push_back(std::move(s));
      }
      break;
    }
    case TermKind::Conj: {
      auto ls = visible_successors(t.left());
      auto rs = visible_successors(t.right());
      for (const auto& [a, l] : ls)
        for (const auto& [b, r] : rs)
          if (a == b) out.emplace_back(a, Term::conj(l, r));
      break;
    }
    case TermKind::Par: {
      const auto& sync = t.sync();
      auto ls = visible_successors(t.left());
      auto rs = visible_successors(t.right());
      const bool left_tau = has_tau(t.left());
      const bool right_tau = has_tau(t.right());
      for (const auto& [a, l] : ls)
        if (!sync.count(a) && !right_tau) out.emplace_back(a, Term::par(sync, l, t.right()));
      for (const auto& [a, r] : rs)
        if (!sync.count(a) && !left_tau) out.emplace_back(a, Term::par(sync, t.left(), r));
      for (const auto& [a, l] : ls)
        if (sync.count(a))
          for (const auto& [b, r] : rs)
            if (a == b) out.emplace_back(a, Term::par(sync, l, r));
      break;
    }
    case TermKind::Rec: return visible_successors(unfold(t));
    default: break;
  }
  return out;
}

// All one-step transitions of a closed guarded term, tau-steps first, with
// alpha-canonical targets and duplicates removed.
inline std::vector<Step> successors(const Term& p) {
  std::vector<Step> out;
  std::set<std::pair<Action, std::string>> seen;
  auto add = [&](Action a, const Term& target) {
    Term c = alpha_canon(target);
    if (seen.emplace(a, to_string(c)).second) out.emplace_back(std::move(a), std::move(c));
  };
  for (const auto& t : tau_successors(p)) add(Action::tau(), t);
  for (const auto& [a, t] : visible_successors(p)) add(a, t);
  return out;
}

// ---------------------------------------------------------------------------
// Conjunction normalization.
//
// Nested conjunctions are flattened, sorted structurally and
// deduplicated, then rebuilt left-nested. Applied to closed structure only
// (never inside recursion bodies). Without it, recursion through a
// conjunction yields ever-growing terms such as Y /\ (Y /\ (Y /\ ... C)).
// ---------------------------------------------------------------------------

namespace detail {

inline void flatten_conj(const Term& t, std::vector<Term>& out);

inline Term normalize_conj_impl(const Term& t) {
  switch (t.kind()) {
    case TermKind::Prefix: {
      Term b = normalize_conj_impl(t.body());
      return b.same_node(t.body()) ? t : Term::prefix(t.action(), std::move(b));
    }
    case TermKind::Conj: {
      std::vector<Term> parts;
      flatten_conj(t, parts);
      std::vector<Term> keyed;
      keyed.reserve(parts.size());
      for (auto& p : parts) keyed.push_back(alpha_canon(p));
      std::sort(keyed.begin(), keyed.end(),
                [](const Term& a, const Term& b) { return compare(a, b) < 0; });
      keyed.erase(std::unique(keyed.begin(), keyed.end()), keyed.end());
      Term acc = keyed.front();
      for (std::size_t i = 1; i < keyed.size(); ++i) acc = Term::conj(acc, keyed[i]);
      return acc;
    }
    case TermKind::Choice:
    case TermKind::Disj:
    case TermKind::Par: {
      Term l = normalize_conj_impl(t.left());
      Term r = normalize_conj_impl(t.right());
      if (l.same_node(t.left()) && r.same_node(t.right())) return t;
      return rebuild(t, std::move(l), std::move(r));
    }
    default: return t;
  }
}

inline void flatten_conj(const Term& t, std::vector<Term>& out) {
  if (t.kind() == TermKind::Conj) {
    flatten_conj(t.left(), out);
    flatten_conj(t.right(), out);
  } else {
    out.push_back(normalize_conj_impl(t));
  }
}

}  // namespace detail

inline Term normalize_conjunctions(const Term& t) { return detail::normalize_conj_impl(t); }

// ---------------------------------------------------------------------------
// Explored transition graphs.
// ---------------------------------------------------------------------------

using StateId = std::uint32_t;

struct Transition {
  StateId from = 0;
  Action label;
  StateId to = 0;

  friend bool operator==(const Transition&, const Transition&) = default;
};

struct State {
  Term term;
  std::string key;
  // Sub-states whose F-status the predicative rules consult: the prefix body,
  // both operands of a binary operator, or the unfolding of a recursion.
  std::vector<StateId> components;
  bool stable = true;
  ActionSet ready;
  bool inconsistent = false;
  bool reachable = true;
};

struct BuildOptions {
  std::size_t bound = 10000;
  // Identify states up to associativity, commutativity and idempotence of
  // conjunction. Off means plain alpha-equivalence.
  bool normalize_conjunctions = true;
};

class Lts {
 public:
  Lts() = default;

  // Hand-assembled graph; stability and ready sets are derived from the
  // transitions, inconsistency flags are taken as given.
  Lts(Alphabet alphabet, std::vector<State> states, std::vector<Transition> transitions,
      StateId initial)
      : alphabet_(std::move(alphabet)),
        states_(std::move(states)),
        transitions_(std::move(transitions)),
        roots_{initial} {
    index();
  }

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  StateId initial() const noexcept { return roots_.front(); }
  const std::vector<StateId>& roots() const noexcept { return roots_; }
  std::size_t bound() const noexcept { return bound_; }

  std::size_t size() const noexcept { return states_.size(); }
  const State& state(StateId s) const { return states_.at(s); }
  const std::vector<State>& states() const noexcept { return states_; }
  const std::vector<Transition>& transitions() const noexcept { return transitions_; }

  // Indices into transitions() of the transitions leaving s, tau first.
  const std::vector<std::size_t>& out(StateId s) const { return out_.at(s); }

  bool stable(StateId s) const { return states_.at(s).stable; }
  bool inconsistent(StateId s) const { return states_.at(s).inconsistent; }
  const ActionSet& ready(StateId s) const { return states_.at(s).ready; }

  std::vector<StateId> successors(StateId s, const Action& label) const {
    std::vector<StateId> r;
    for (auto i : out_.at(s))
      if (transitions_[i].label == label) r.push_back(transitions_[i].to);
    return r;
  }

  std::optional<StateId> find(const std::string& key) const {
    auto it = by_key_.find(key);
    if (it == by_key_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t reachable_count() const {
    return static_cast<std::size_t>(
        std::count_if(states_.begin(), states_.end(), [](const State& s) { return s.reachable; }));
  }

  void set_inconsistent(const std::vector<bool>& mask) {
    for (std::size_t i = 0; i < states_.size(); ++i) states_[i].inconsistent = mask[i];
  }

 private:
  friend class LtsBuilder;

  void index() {
    out_.assign(states_.size(), {});
    for (auto& s : states_) {
      s.ready.clear();
      s.stable = true;
    }
    for (std::size_t i = 0; i < transitions_.size(); ++i) {
      const auto& t = transitions_[i];
      out_[t.from].push_back(i);
      states_[t.from].ready.insert(t.label);
      if (t.label.is_tau()) states_[t.from].stable = false;
    }
    by_key_.clear();
    for (std::size_t i = 0; i < states_.size(); ++i)
      if (!states_[i].key.empty()) by_key_.emplace(states_[i].key, static_cast<StateId>(i));
  }

  Alphabet alphabet_;
  std::vector<State> states_;
  std::vector<Transition> transitions_;
  std::vector<StateId> roots_{0};
  std::size_t bound_ = 0;
  std::vector<std::vector<std::size_t>> out_;
  std::unordered_map<std::string, StateId> by_key_;
};

// ---------------------------------------------------------------------------
// Inconsistency predicate: least set closed under the predicative rules.
// ---------------------------------------------------------------------------

namespace detail {

inline ActionSet visible_part(const ActionSet& ready) {
  ActionSet r;
  for (const auto& a : ready)
    if (!a.is_tau()) r.insert(a);
  return r;
}

// Stable states reachable by zero or more tau-steps (F is ignored).
inline std::vector<StateId> stable_tau_descendants(const Lts& lts, StateId s) {
  std::vector<StateId> result;
  std::vector<bool> seen(lts.size(), false);
  std::vector<StateId> stack{s};
  seen[s] = true;
  while (!stack.empty()) {
    StateId u = stack.back();
    stack.pop_back();
    if (lts.stable(u)) result.push_back(u);
    for (auto i : lts.out(u)) {
      const auto& t = lts.transitions()[i];
      if (t.label.is_tau() && !seen[t.to]) {
        seen[t.to] = true;
        stack.push_back(t.to);
      }
    }
  }
  std::sort(result.begin(), result.end());
  return result;
}

}  // namespace detail

inline std::vector<bool> compute_f_mask(const Lts& lts) {
  const std::size_t n = lts.size();
  std::vector<bool> f(n, false);
  std::vector<std::vector<StateId>> descendants(n);
  std::vector<bool> has_descendants(n, false);
  // watchers[t]: states whose rule premises mention t.
  std::vector<std::vector<StateId>> watchers(n);
  for (StateId s = 0; s < n; ++s) {
    const State& st = lts.state(s);
    for (auto c : st.components) watchers[c].push_back(s);
    auto k = st.term.kind();
    if (k == TermKind::Conj) {
      for (auto i : lts.out(s)) watchers[lts.transitions()[i].to].push_back(s);
    }
    if (k == TermKind::Conj || k == TermKind::Rec) {
      descendants[s] = detail::stable_tau_descendants(lts, s);
      has_descendants[s] = true;
      for (auto d : descendants[s]) watchers[d].push_back(s);
    }
  }
  auto all_in_f = [&](const std::vector<StateId>& xs) {
    return std::all_of(xs.begin(), xs.end(), [&](StateId x) { return f[x]; });
  };
  auto derivable = [&](StateId s) -> bool {
    const State& st = lts.state(s);
    const auto& c = st.components;
    switch (st.term.kind()) {
      case TermKind::Bot: return true;
      case TermKind::Prefix: return c.size() == 1 && f[c[0]];
      case TermKind::Disj: return c.size() == 2 && f[c[0]] && f[c[1]];
      case TermKind::Choice:
      case TermKind::Par: return c.size() == 2 && (f[c[0]] || f[c[1]]);
      case TermKind::Conj: {
        if (c.size() == 2 && (f[c[0]] || f[c[1]])) return true;
        // A stable conjunction of operands with different ready sets.
        if (c.size() == 2 && st.stable &&
            detail::visible_part(lts.ready(c[0])) != detail::visible_part(lts.ready(c[1])))
          return true;
        // Some label all of whose successors are inconsistent.
        for (const auto& alpha : st.ready) {
          if (all_in_f(lts.successors(s, alpha))) return true;
        }
        return has_descendants[s] && all_in_f(descendants[s]);
      }
      case TermKind::Rec:
        if (c.size() == 1 && f[c[0]]) return true;
        return has_descendants[s] && all_in_f(descendants[s]);
      default: return false;
    }
  };
  std::vector<StateId> work;
  for (StateId s = 0; s < n; ++s) work.push_back(static_cast<StateId>(n - 1 - s));
  while (!work.empty()) {
    StateId s = work.back();
    work.pop_back();
    if (f[s] || !derivable(s)) continue;
    f[s] = true;
    for (auto w : watchers[s])
      if (!f[w]) work.push_back(w);
  }
  return f;
}

inline std::set<StateId> compute_f(const Lts& lts) {
  std::set<StateId> out;
  auto mask = compute_f_mask(lts);
  for (StateId s = 0; s < mask.size(); ++s)
    if (mask[s]) out.insert(s);
  return out;
}

// ---------------------------------------------------------------------------
// Graph construction.
//
// Closed subterms are hash-consed into a table: a node outside every
// recursion is identified by its operator and operand ids, a recursion by its
// alpha-canonical text. Successors are memoized per node and assembled from
// the operands' successors, mirroring the term-level rules above.
// ---------------------------------------------------------------------------

namespace detail {

class TermTable {
 public:
  using Id = std::uint32_t;

  explicit TermTable(bool normalize) : normalize_(normalize) {}

  Id intern(const Term& t) {
    switch (t.kind()) {
      case TermKind::Nil:
      case TermKind::Bot: return make(t.kind(), {}, {}, 0, 0);
      case TermKind::Prefix: return make(TermKind::Prefix, t.action(), {}, intern(t.body()), 0);
      case TermKind::Conj: return conj(intern(t.left()), intern(t.right()));
      case TermKind::Choice:
      case TermKind::Disj:
      case TermKind::Par:
        return make(t.kind(), {}, t.kind() == TermKind::Par ? t.sync() : ActionSet{},
                    intern(t.left()), intern(t.right()));
      case TermKind::Rec: return rec(t);
      case TermKind::Var: break;
    }
    throw Error(ErrorKind::Precondition, "term has free variables: " + to_string(t));
  }

  TermKind kind(Id i) const { return nodes_[i].kind; }
  Id left(Id i) const { return nodes_[i].l; }
  Id right(Id i) const { return nodes_[i].r; }
  Id body(Id i) const { return nodes_[i].l; }

  Id unfolding(Id i) {
    auto& n = nodes_[i];
    if (!n.unfolded) {
      Term u = unfold(n.rec);
      Id v = intern(u);
      nodes_[i].unfolded = v;
    }
    return *nodes_[i].unfolded;
  }

  // Canonical term of a node (shared subterms are rebuilt once).
  const Term& term(Id i) {
    if (terms_.size() <= i) terms_.resize(nodes_.size());
    if (terms_[i]) return *terms_[i];
    const Node n = nodes_[i];
    Term t;
    switch (n.kind) {
      case TermKind::Nil: t = Term::nil(); break;
      case TermKind::Bot: t = Term::bot(); break;
      case TermKind::Prefix: t = Term::prefix(n.action, term(n.l)); break;
      case TermKind::Choice: t = Term::choice(term(n.l), term(n.r)); break;
      case TermKind::Conj: t = Term::conj(term(n.l), term(n.r)); break;
      case TermKind::Disj: t = Term::disj(term(n.l), term(n.r)); break;
      case TermKind::Par: t = Term::par(n.sync, term(n.l), term(n.r)); break;
      case TermKind::Rec: t = n.rec; break;
      case TermKind::Var: break;
    }
    if (terms_.size() <= i) terms_.resize(nodes_.size());
    terms_[i] = std::move(t);
    return *terms_[i];
  }

  struct Successors {
    bool has_tau = false;
    std::vector<Id> tau;
    std::vector<std::pair<Action, Id>> visible;
  };

  const Successors& successors(Id i) {
    if (succ_.size() <= i) succ_.resize(nodes_.size());
    if (succ_[i]) return *succ_[i];
    if (busy_.count(i))
      throw Error(ErrorKind::UnguardedRecursion, "unguarded recursion in " + to_string(term(i)));
    busy_.insert(i);
    Successors s = compute(i);
    busy_.erase(i);
    if (succ_.size() <= i) succ_.resize(nodes_.size());
    succ_[i] = std::move(s);
    return *succ_[i];
  }

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    TermKind kind = TermKind::Nil;
    Action action;
    ActionSet sync;
    Id l = 0;
    Id r = 0;
    Term rec;
    std::optional<Id> unfolded;
  };

  Id make(TermKind k, Action a, ActionSet sync, Id l, Id r) {
    std::string key;
    key += static_cast<char>('A' + static_cast<int>(k));
    key += a.name();
    key += '|';
    for (const auto& s : sync) {
      key += s.name();
      key += ',';
    }
    key += '|';
    key += std::to_string(l);
    key += ':';
    key += std::to_string(r);
    auto it = structural_.find(key);
    if (it != structural_.end()) return it->second;
    Id id = static_cast<Id>(nodes_.size());
    nodes_.push_back(Node{k, std::move(a), std::move(sync), l, r, Term(), std::nullopt});
    structural_.emplace(std::move(key), id);
    return id;
  }

  Id rec(const Term& t) {
    auto hit = by_node_.find(t.identity());
    if (hit != by_node_.end()) return hit->second.second;
    Term c = alpha_canon(t);
    std::string key = to_string(c);
    Id id;
    auto it = recs_.find(key);
    if (it != recs_.end()) {
      id = it->second;
    } else {
      id = static_cast<Id>(nodes_.size());
      nodes_.push_back(Node{TermKind::Rec, {}, {}, 0, 0, std::move(c), std::nullopt});
      recs_.emplace(std::move(key), id);
    }
    by_node_.emplace(t.identity(), std::make_pair(t, id));
    return id;
  }

  // Same order as compare() on the canonical terms.
  int order(Id a, Id b) {
    if (a == b) return 0;
    const Node& x = nodes_[a];
    const Node& y = nodes_[b];
    if (x.kind != y.kind) return x.kind < y.kind ? -1 : 1;
    switch (x.kind) {
      case TermKind::Rec: return compare(x.rec, y.rec);
      case TermKind::Prefix:
        if (int c = x.action.name().compare(y.action.name())) return c < 0 ? -1 : 1;
        return order(x.l, y.l);
      case TermKind::Choice:
      case TermKind::Conj:
      case TermKind::Disj:
      case TermKind::Par: {
        if (x.sync != y.sync) return x.sync < y.sync ? -1 : 1;
        if (int c = order(x.l, y.l)) return c;
        return order(x.r, y.r);
      }
      default: return 0;
    }
  }

  void flatten(Id i, std::vector<Id>& out) const {
    if (nodes_[i].kind == TermKind::Conj) {
      flatten(nodes_[i].l, out);
      flatten(nodes_[i].r, out);
    } else {
      out.push_back(i);
    }
  }

  Id conj(Id l, Id r) {
    if (!normalize_) return make(TermKind::Conj, {}, {}, l, r);
    std::vector<Id> parts;
    flatten(l, parts);
    flatten(r, parts);
    std::sort(parts.begin(), parts.end(), [&](Id a, Id b) { return order(a, b) < 0; });
    parts.erase(std::unique(parts.begin(), parts.end()), parts.end());
    Id acc = parts.front();
    for (std::size_t k = 1; k < parts.size(); ++k) acc = make(TermKind::Conj, {}, {}, acc, parts[k]);
    return acc;
  }

  Id rebuild(Id i, Id l, Id r) {
    const Node& n = nodes_[i];
    if (n.kind == TermKind::Conj) return conj(l, r);
    return make(n.kind, {}, n.sync, l, r);
  }

  Successors compute(Id i) {
    Successors out;
    const Node n = nodes_[i];
    switch (n.kind) {
      case TermKind::Prefix:
        if (n.action.is_tau()) {
          out.has_tau = true;
          out.tau.push_back(n.l);
        } else {
          out.visible.emplace_back(n.action, n.l);
        }
        break;
      case TermKind::Disj:
        out.has_tau = true;
        out.tau = {n.l, n.r};
        break;
      case TermKind::Choice:
      case TermKind::Conj:
      case TermKind::Par: {
        const Successors ls = successors(n.l);
        const Successors rs = successors(n.r);
        out.has_tau = ls.has_tau || rs.has_tau;
        for (auto l : ls.tau) out.tau.push_back(rebuild(i, l, n.r));
        for (auto r : rs.tau) out.tau.push_back(rebuild(i, n.l, r));
        if (n.kind == TermKind::Choice) {
          if (!rs.has_tau) out.visible.insert(out.visible.end(), ls.visible.begin(), ls.visible.end());
          if (!ls.has_tau) out.visible.insert(out.visible.end(), rs.visible.begin(), rs.visible.end());
        } else if (n.kind == TermKind::Conj) {
          for (const auto& [a, l] : ls.visible)
            for (const auto& [b, r] : rs.visible)
              if (a == b) out.visible.emplace_back(a, conj(l, r));
        } else {
          for (const auto& [a, l] : ls.visible)
            if (!n.sync.count(a) && !rs.has_tau)
              out.visible.emplace_back(a, make(TermKind::Par, {}, n.sync, l, n.r));
          for (const auto& [a, r] : rs.visible)
            if (!n.sync.count(a) && !ls.has_tau)
              out.visible.emplace_back(a, make(TermKind::Par, {}, n.sync, n.l, r));
          for (const auto& [a, l] : ls.visible)
            if (n.sync.count(a))
              for (const auto& [b, r] : rs.visible)
                if (a == b) out.visible.emplace_back(a, make(TermKind::Par, {}, n.sync, l, r));
        }
        break;
      }
      case TermKind::Rec: out = successors(unfolding(i)); break;
      default: break;
    }
    return out;
  }

  bool normalize_;
  std::vector<Node> nodes_;
  std::unordered_map<std::string, Id> structural_;
  std::unordered_map<std::string, Id> recs_;
  std::unordered_map<const void*, std::pair<Term, Id>> by_node_;
  std::vector<std::optional<Term>> terms_;
  std::vector<std::optional<Successors>> succ_;
  std::set<Id> busy_;
};

}  // namespace detail

class LtsBuilder {
 public:
  LtsBuilder(Alphabet alphabet, BuildOptions options)
      : options_(options), table_(options.normalize_conjunctions) {
    lts_.alphabet_ = std::move(alphabet);
    lts_.bound_ = options.bound;
    lts_.roots_.clear();
  }

  StateId add_root(const Term& t) {
    if (!is_closed(t))
      throw Error(ErrorKind::Precondition, "term has free variables: " + to_string(t));
    validate(t);
    lts_.alphabet_ = lts_.alphabet_.merged(actions_of(t));
    StateId id = intern(table_.intern(t));
    lts_.roots_.push_back(id);
    return id;
  }

  Lts finish() {
    explore();
    if (lts_.roots_.empty()) throw Error(ErrorKind::Precondition, "no root state");
    for (std::size_t s = 0; s < nodes_.size(); ++s) {
      lts_.states_[s].term = table_.term(nodes_[s]);
      lts_.states_[s].key = to_string(lts_.states_[s].term);
    }
    lts_.index();
    mark_reachable();
    lts_.set_inconsistent(compute_f_mask(lts_));
    return std::move(lts_);
  }

 private:
  using Id = detail::TermTable::Id;

  StateId intern(Id node) {
    auto it = index_.find(node);
    if (it != index_.end()) return it->second;
    if (lts_.states_.size() >= options_.bound) throw StateBoundExceeded(options_.bound);
    StateId id = static_cast<StateId>(lts_.states_.size());
    lts_.states_.emplace_back();
    nodes_.push_back(node);
    index_.emplace(node, id);
    return id;
  }

  void explore() {
    for (std::size_t next = 0; next < lts_.states_.size(); ++next) {
      const StateId s = static_cast<StateId>(next);
      const Id node = nodes_[s];
      const auto succ = table_.successors(node);
      std::vector<Id> taus = succ.tau;
      std::sort(taus.begin(), taus.end());
      taus.erase(std::unique(taus.begin(), taus.end()), taus.end());
      for (auto t : taus) lts_.transitions_.push_back({s, Action::tau(), intern(t)});
      std::set<std::pair<Action, Id>> seen;
      for (const auto& step : succ.visible)
        if (seen.insert(step).second) lts_.transitions_.push_back({s, step.first, intern(step.second)});

      std::vector<StateId> comps;
      switch (table_.kind(node)) {
        case TermKind::Prefix: comps.push_back(intern(table_.body(node))); break;
        case TermKind::Rec: comps.push_back(intern(table_.unfolding(node))); break;
        case TermKind::Choice:
        case TermKind::Conj:
        case TermKind::Disj:
        case TermKind::Par:
          comps.push_back(intern(table_.left(node)));
          comps.push_back(intern(table_.right(node)));
          break;
        default: break;
      }
      lts_.states_[s].components = std::move(comps);
    }
  }

  void mark_reachable() {
    for (auto& s : lts_.states_) s.reachable = false;
    std::vector<StateId> stack(lts_.roots_.begin(), lts_.roots_.end());
    for (auto r : stack) lts_.states_[r].reachable = true;
    while (!stack.empty()) {
      StateId u = stack.back();
      stack.pop_back();
      for (auto i : lts_.out_[u]) {
        StateId v = lts_.transitions_[i].to;
        if (!lts_.states_[v].reachable) {
          lts_.states_[v].reachable = true;
          stack.push_back(v);
        }
      }
    }
  }

  BuildOptions options_;
  detail::TermTable table_;
  Lts lts_;
  std::vector<Id> nodes_;
  std::unordered_map<Id, StateId> index_;
};

inline Lts build_lts(std::span<const Term> roots, const BuildOptions& options = {},
                     const Alphabet& alphabet = {}) {
  if (options.bound == 0) throw Error(ErrorKind::Usage, "state bound must be positive");
  LtsBuilder b(alphabet, options);
  for (const auto& r : roots) b.add_root(r);
  return b.finish();
}

inline Lts build_lts(const Term& p, const BuildOptions& options = {},
                     const Alphabet& alphabet = {}) {
  return build_lts(std::span<const Term>(&p, 1), options, alphabet);
}

inline Lts build_lts(const Term& p, std::size_t bound) {
  BuildOptions o;
  o.bound = bound;
  return build_lts(p, o);
}

// Looks up the state of a term in a built graph (after the same identification
// the builder applies).
inline std::optional<StateId> find_state(const Lts& lts, const Term& t, bool normalized = true) {
  Term n = normalized ? normalize_conjunctions(t) : t;
  return lts.find(canonical_key(n));
}

// ---------------------------------------------------------------------------
// LLTS axioms.
// ---------------------------------------------------------------------------

enum class LltsAxiom { Lts1, Lts2, TauPurity, TauInconsistency };

inline std::string_view to_string(LltsAxiom a) {
  switch (a) {
    case LltsAxiom::Lts1: return "LTS1";
    case LltsAxiom::Lts2: return "LTS2";
    case LltsAxiom::TauPurity: return "tau-purity";
    case LltsAxiom::TauInconsistency: return "tau-inconsistency";
  }
  return "";
}

struct LltsViolation {
  StateId state = 0;
  LltsAxiom axiom = LltsAxiom::Lts1;

  friend bool operator==(const LltsViolation&, const LltsViolation&) = default;
};

using LltsReport = std::vector<LltsViolation>;

// Checks LTS1, LTS2, tau-purity and "p in F with a tau-step implies every
// tau-successor in F" on every state of the graph.
inline LltsReport verify_llts(const Lts& lts) {
  LltsReport report;
  const std::size_t n = lts.size();
  for (StateId s = 0; s < n; ++s) {
    const bool in_f = lts.inconsistent(s);
    // LTS1
    if (!in_f) {
      for (const auto& alpha : lts.ready(s)) {
        auto succ = lts.successors(s, alpha);
        if (std::all_of(succ.begin(), succ.end(), [&](StateId t) { return lts.inconsistent(t); })) {
          report.push_back({s, LltsAxiom::Lts1});
          break;
        }
      }
    }
    // LTS2: some F-free tau-path must reach a stable F-free state.
    if (!in_f) {
      bool found = false;
      std::vector<bool> seen(n, false);
      std::vector<StateId> stack{s};
      seen[s] = true;
      while (!stack.empty() && !found) {
        StateId u = stack.back();
        stack.pop_back();
        if (lts.stable(u)) {
          found = true;
          break;
        }
        for (auto i : lts.out(u)) {
          const auto& t = lts.transitions()[i];
          if (t.label.is_tau() && !lts.inconsistent(t.to) && !seen[t.to]) {
            seen[t.to] = true;
            stack.push_back(t.to);
          }
        }
      }
      if (!found) report.push_back({s, LltsAxiom::Lts2});
    }
    if (!lts.stable(s)) {
      const auto& ready = lts.ready(s);
      if (std::any_of(ready.begin(), ready.end(), [](const Action& a) { return !a.is_tau(); }))
        report.push_back({s, LltsAxiom::TauPurity});
      if (in_f) {
        auto succ = lts.successors(s, Action::tau());
        if (!std::all_of(succ.begin(), succ.end(), [&](StateId t) { return lts.inconsistent(t); }))
          report.push_back({s, LltsAxiom::TauInconsistency});
      }
    }
  }
  return report;
}

}  // namespace cllr
