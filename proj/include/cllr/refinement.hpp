#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "cllr/semantics.hpp"

namespace cllr {

// ---------------------------------------------------------------------------
// Weak F-free transitions to stable states.
// ---------------------------------------------------------------------------

// All stable q with an F-free tau-path from s to q (empty when s is in F).
inline std::vector<StateId> weak_eps_f(const Lts& lts, StateId s) {
  std::vector<StateId> result;
  if (lts.inconsistent(s)) return result;
  std::vector<bool> seen(lts.size(), false);
  std::vector<StateId> stack{s};
  seen[s] = true;
  while (!stack.empty()) {
    StateId u = stack.back();
    stack.pop_back();
    if (lts.stable(u)) result.push_back(u);
    for (auto i : lts.out(u)) {
      const auto& t = lts.transitions()[i];
      if (t.label.is_tau() && !seen[t.to] && !lts.inconsistent(t.to)) {
        seen[t.to] = true;
        stack.push_back(t.to);
      }
    }
  }
  std::sort(result.begin(), result.end());
  return result;
}

// All stable q with s =eps=>_F r -a->_F r' =eps=>_F| q.
inline std::vector<StateId> weak_a_f(const Lts& lts, StateId s, const Action& a) {
  std::set<StateId> result;
  if (lts.inconsistent(s)) return {};
  std::vector<bool> seen(lts.size(), false);
  std::vector<StateId> stack{s};
  seen[s] = true;
  while (!stack.empty()) {
    StateId u = stack.back();
    stack.pop_back();
    for (auto i : lts.out(u)) {
      const auto& t = lts.transitions()[i];
      if (lts.inconsistent(t.to)) continue;
      if (t.label.is_tau()) {
        if (!seen[t.to]) {
          seen[t.to] = true;
          stack.push_back(t.to);
        }
      } else if (t.label == a) {
        for (auto q : weak_eps_f(lts, t.to)) result.insert(q);
      }
    }
  }
  return {result.begin(), result.end()};
}

// Memoized weak_eps_f / weak_a_f over one immutable graph.
class WeakSteps {
 public:
  explicit WeakSteps(const Lts& lts) : lts_(&lts), eps_(lts.size()) {}

  const Lts& lts() const noexcept { return *lts_; }

  const std::vector<StateId>& eps(StateId s) {
    auto& slot = eps_[s];
    if (!slot) slot = weak_eps_f(*lts_, s);
    return *slot;
  }

  const std::vector<StateId>& after(StateId s, const Action& a) {
    auto key = std::make_pair(s, a.name());
    auto it = after_.find(key);
    if (it != after_.end()) return it->second;
    std::set<StateId> result;
    if (!lts_->inconsistent(s)) {
      // s =eps=>_F r: visit F-free tau-closure.
      std::vector<bool> seen(lts_->size(), false);
      std::vector<StateId> stack{s};
      seen[s] = true;
      while (!stack.empty()) {
        StateId u = stack.back();
        stack.pop_back();
        for (auto i : lts_->out(u)) {
          const auto& t = lts_->transitions()[i];
          if (lts_->inconsistent(t.to)) continue;
          if (t.label.is_tau()) {
            if (!seen[t.to]) {
              seen[t.to] = true;
              stack.push_back(t.to);
            }
          } else if (t.label == a) {
            for (auto q : eps(t.to)) result.insert(q);
          }
        }
      }
    }
    return after_.emplace(key, std::vector<StateId>(result.begin(), result.end())).first->second;
  }

  // Visible labels a with a possible F-free weak a-step from the stable state s.
  std::vector<Action> visible_labels(StateId s) const {
    std::vector<Action> out;
    for (const auto& a : lts_->ready(s))
      if (!a.is_tau()) out.push_back(a);
    return out;
  }

 private:
  const Lts* lts_;
  std::vector<std::optional<std::vector<StateId>>> eps_;
  std::map<std::pair<StateId, std::string>, std::vector<StateId>> after_;
};

// ---------------------------------------------------------------------------
// Relations, verdicts and counterexamples.
// ---------------------------------------------------------------------------

enum class RelationKind { StableRS, Alt, UptoWitness };

enum class Clause { RS2, RS3, RS4, EpsMatching, RSi, RSiii, RSiv };

inline std::string_view to_string(Clause c) {
  switch (c) {
    case Clause::RS2: return "RS2";
    case Clause::RS3: return "RS3";
    case Clause::RS4: return "RS4";
    case Clause::EpsMatching: return "eps-matching";
    case Clause::RSi: return "RSi";
    case Clause::RSiii: return "RSiii";
    case Clause::RSiv: return "RSiv";
  }
  return "";
}

// Pairs relate a state of the left graph to a state of the right graph.
struct SimRelation {
  RelationKind kind = RelationKind::StableRS;
  std::set<std::pair<StateId, StateId>> pairs;

  bool contains(StateId l, StateId r) const { return pairs.count({l, r}) > 0; }
};

struct TraceStep {
  StateId left = 0;
  StateId right = 0;
  std::string left_term;
  std::string right_term;
  Clause clause = Clause::EpsMatching;
};

struct Counterexample {
  std::vector<TraceStep> trace;
  Clause clause = Clause::EpsMatching;
};

struct RefinementVerdict {
  bool holds = false;
  std::optional<SimRelation> witness;
  std::optional<Counterexample> counterexample;
};

// ---------------------------------------------------------------------------
// Greatest fixpoints as simulation games.
//
// A node is a pair of states. It is lost when a static clause fails, or when
// some obligation (one move of the left state) has no surviving answer.
// Losing propagates backwards through answer lists with counters.
// ---------------------------------------------------------------------------

namespace detail {

enum class NodeType { Stable, Alt, Root };

class SimulationGame {
 public:
  SimulationGame(const Lts& left, const Lts& right) : wl_(left), wr_(right) {}

  const Lts& left() const { return wl_.lts(); }
  const Lts& right() const { return wr_.lts(); }

  std::size_t node(NodeType type, StateId l, StateId r) {
    auto key = std::make_tuple(static_cast<int>(type), l, r);
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    std::size_t id = nodes_.size();
    nodes_.push_back(Node{type, l, r, std::nullopt, {}, true, 0, std::nullopt, false});
    index_.emplace(key, id);
    pending_.push_back(id);
    return id;
  }

  // Expands every node reachable from the ones created so far, then solves.
  void solve() {
    while (!pending_.empty()) {
      std::size_t id = pending_.front();
      pending_.pop_front();
      expand(id);
    }
    std::vector<std::pair<std::size_t, std::optional<std::size_t>>> queue;
    for (std::size_t id = 0; id < nodes_.size(); ++id) {
      auto& n = nodes_[id];
      if (n.static_failure) {
        queue.emplace_back(id, std::nullopt);
        continue;
      }
      for (std::size_t k = 0; k < n.obligations.size(); ++k) {
        if (n.obligations[k].answers.empty()) {
          queue.emplace_back(id, k);
          break;
        }
      }
    }
    for (std::size_t head = 0; head < queue.size(); ++head) {
      auto [id, ob] = queue[head];
      auto& n = nodes_[id];
      if (!n.alive) continue;
      n.alive = false;
      n.stamp = ++clock_;
      n.failed_obligation = ob;
      for (auto [parent, k] : parents_[id]) {
        auto& p = nodes_[parent];
        auto& o = p.obligations[k];
        if (--o.alive_answers == 0 && p.alive) queue.emplace_back(parent, k);
      }
    }
  }

  bool alive(std::size_t id) const { return nodes_[id].alive; }
  std::size_t size() const { return nodes_.size(); }
  NodeType type(std::size_t id) const { return nodes_[id].type; }
  std::pair<StateId, StateId> states(std::size_t id) const {
    return {nodes_[id].left, nodes_[id].right};
  }

  // Alive nodes reachable from `root` through alive answers (root excluded
  // when it is the virtual refinement root).
  std::set<std::pair<StateId, StateId>> witness(std::size_t root) const {
    std::set<std::pair<StateId, StateId>> out;
    std::vector<bool> seen(nodes_.size(), false);
    std::vector<std::size_t> stack{root};
    seen[root] = true;
    while (!stack.empty()) {
      std::size_t id = stack.back();
      stack.pop_back();
      const auto& n = nodes_[id];
      if (n.type != NodeType::Root) out.emplace(n.left, n.right);
      for (const auto& o : n.obligations)
        for (auto a : o.answers)
          if (nodes_[a].alive && !seen[a]) {
            seen[a] = true;
            stack.push_back(a);
          }
    }
    return out;
  }

  Counterexample counterexample(std::size_t root) const {
    Counterexample cex;
    std::size_t id = root;
    for (;;) {
      const auto& n = nodes_[id];
      TraceStep step;
      step.left = n.left;
      step.right = n.right;
      step.left_term = to_string(left().state(n.left).term);
      step.right_term = to_string(right().state(n.right).term);
      std::optional<std::size_t> next;
      if (n.static_failure) {
        step.clause = *n.static_failure;
      } else if (n.failed_obligation) {
        const auto& o = n.obligations[*n.failed_obligation];
        step.clause = o.clause;
        std::size_t best_stamp = std::numeric_limits<std::size_t>::max();
        for (auto a : o.answers) {
          if (nodes_[a].stamp < best_stamp) {
            best_stamp = nodes_[a].stamp;
            next = a;
          }
        }
      }
      cex.trace.push_back(step);
      cex.clause = step.clause;
      if (!next) break;
      id = *next;
    }
    return cex;
  }

  WeakSteps& left_steps() { return wl_; }
  WeakSteps& right_steps() { return wr_; }

 private:
  struct Obligation {
    Clause clause;
    std::vector<std::size_t> answers;
    std::size_t alive_answers = 0;
  };

  struct Node {
    NodeType type;
    StateId left;
    StateId right;
    std::optional<Clause> static_failure;
    std::vector<Obligation> obligations;
    bool alive = true;
    std::size_t stamp = 0;
    std::optional<std::size_t> failed_obligation;
    bool expanded = false;
  };

  void add_obligation(std::size_t id, Clause clause, NodeType answer_type,
                      StateId subject, const std::vector<StateId>& candidates) {
    Obligation o{clause, {}, 0};
    for (auto q : candidates) o.answers.push_back(node(answer_type, subject, q));
    o.alive_answers = o.answers.size();
    std::size_t k = nodes_[id].obligations.size();
    for (auto a : o.answers) {
      if (parents_.size() <= a) parents_.resize(a + 1);
      parents_[a].emplace_back(id, k);
    }
    nodes_[id].obligations.push_back(std::move(o));
  }

  void expand(std::size_t id) {
    if (parents_.size() < nodes_.size()) parents_.resize(nodes_.size());
    const NodeType type = nodes_[id].type;
    const StateId p = nodes_[id].left;
    const StateId q = nodes_[id].right;
    const Lts& L = left();
    const Lts& R = right();
    const bool p_ok = !L.inconsistent(p);
    switch (type) {
      case NodeType::Root: {
        // Copy: eps() may rehash nothing, but node() grows nodes_.
        const auto ps = wl_.eps(p);
        const auto qs = wr_.eps(q);
        for (auto p1 : ps) add_obligation(id, Clause::EpsMatching, NodeType::Stable, p1, qs);
        break;
      }
      case NodeType::Stable: {
        if (!p_ok) break;
        if (R.inconsistent(q)) {
          nodes_[id].static_failure = Clause::RS2;
          break;
        }
        if (L.ready(p) != R.ready(q)) {
          nodes_[id].static_failure = Clause::RS4;
          break;
        }
        for (const auto& a : wl_.visible_labels(p)) {
          const auto ps = wl_.after(p, a);
          const auto qs = wr_.after(q, a);
          for (auto p1 : ps) add_obligation(id, Clause::RS3, NodeType::Stable, p1, qs);
        }
        break;
      }
      case NodeType::Alt: {
        const bool both_stable = L.stable(p) && R.stable(q);
        if (p_ok && both_stable && L.ready(p) != R.ready(q)) {
          nodes_[id].static_failure = Clause::RSiv;
          break;
        }
        {
          const auto ps = wl_.eps(p);
          const auto qs = wr_.eps(q);
          for (auto p1 : ps) add_obligation(id, Clause::RSi, NodeType::Alt, p1, qs);
        }
        if (both_stable && p_ok) {
          for (const auto& a : wl_.visible_labels(p)) {
            const auto ps = wl_.after(p, a);
            const auto qs = wr_.after(q, a);
            for (auto p1 : ps) add_obligation(id, Clause::RSiii, NodeType::Alt, p1, qs);
          }
        }
        break;
      }
    }
    if (parents_.size() < nodes_.size()) parents_.resize(nodes_.size());
  }

  WeakSteps wl_;
  WeakSteps wr_;
  std::vector<Node> nodes_;
  std::map<std::tuple<int, StateId, StateId>, std::size_t> index_;
  std::deque<std::size_t> pending_;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> parents_;
  std::size_t clock_ = 0;
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Public checks.
// ---------------------------------------------------------------------------

// The largest stable ready simulation between the stable states of two graphs.
inline SimRelation stable_rs(const Lts& left, const Lts& right) {
  detail::SimulationGame game(left, right);
  std::vector<std::size_t> ids;
  for (StateId p = 0; p < left.size(); ++p) {
    if (!left.stable(p)) continue;
    for (StateId q = 0; q < right.size(); ++q)
      if (right.stable(q)) ids.push_back(game.node(detail::NodeType::Stable, p, q));
  }
  game.solve();
  SimRelation rel;
  rel.kind = RelationKind::StableRS;
  for (auto id : ids)
    if (game.alive(id)) rel.pairs.insert(game.states(id));
  return rel;
}

// p ready-simulated by q, for p a state of `left` and q a state of `right`.
inline RefinementVerdict refines(const Lts& left, StateId p, const Lts& right, StateId q) {
  detail::SimulationGame game(left, right);
  auto root = game.node(detail::NodeType::Root, p, q);
  game.solve();
  RefinementVerdict v;
  v.holds = game.alive(root);
  if (v.holds) {
    v.witness = SimRelation{RelationKind::StableRS, game.witness(root)};
  } else {
    v.counterexample = game.counterexample(root);
  }
  return v;
}

// Alternative formulation: a relation over arbitrary state pairs.
inline RefinementVerdict refines_alt(const Lts& left, StateId p, const Lts& right, StateId q) {
  detail::SimulationGame game(left, right);
  auto root = game.node(detail::NodeType::Alt, p, q);
  game.solve();
  RefinementVerdict v;
  v.holds = game.alive(root);
  if (v.holds) {
    v.witness = SimRelation{RelationKind::Alt, game.witness(root)};
  } else {
    v.counterexample = game.counterexample(root);
  }
  return v;
}

namespace detail {

inline std::pair<Lts, Lts> build_pair(const Term& p, const Term& q, const BuildOptions& options) {
  Alphabet a = actions_of(p).merged(actions_of(q));
  return {build_lts(p, options, a), build_lts(q, options, a)};
}

}  // namespace detail

inline RefinementVerdict refines(const Term& p, const Term& q, const BuildOptions& options = {}) {
  auto [l, r] = detail::build_pair(p, q, options);
  return refines(l, l.initial(), r, r.initial());
}

inline RefinementVerdict refines_alt(const Term& p, const Term& q,
                                     const BuildOptions& options = {}) {
  auto [l, r] = detail::build_pair(p, q, options);
  return refines_alt(l, l.initial(), r, r.initial());
}

// =RS: refinement in both directions.
inline bool equivalent(const Lts& left, StateId p, const Lts& right, StateId q) {
  return refines(left, p, right, q).holds && refines(right, q, left, p).holds;
}

inline bool equivalent(const Term& p, const Term& q, const BuildOptions& options = {}) {
  auto [l, r] = detail::build_pair(p, q, options);
  return equivalent(l, l.initial(), r, r.initial());
}

// Checks that `rel` is an alternative ready simulation up to stable ready
// simulation: answers are accepted up to  ⊑~RS ; rel ; ⊑~RS.
inline bool check_upto(const SimRelation& rel, const Lts& left, const Lts& right) {
  const SimRelation srs_left = stable_rs(left, left);
  const SimRelation srs_right = stable_rs(right, right);
  WeakSteps wl(left);
  WeakSteps wr(right);

  // composed(p1, q1): some (u, v) in rel with p1 ⊑~RS u and v ⊑~RS q1.
  auto composed = [&](StateId p1, StateId q1) {
    for (const auto& [u, v] : rel.pairs)
      if (srs_left.contains(p1, u) && srs_right.contains(v, q1)) return true;
    return false;
  };
  auto matched = [&](const std::vector<StateId>& ps, const std::vector<StateId>& qs) {
    for (auto p1 : ps) {
      bool ok = std::any_of(qs.begin(), qs.end(), [&](StateId q1) { return composed(p1, q1); });
      if (!ok) return false;
    }
    return true;
  };

  for (const auto& [p, q] : rel.pairs) {
    if (!matched(wl.eps(p), wr.eps(q))) return false;  // ALT-upto-1
    const bool both_stable = left.stable(p) && right.stable(q);
    if (both_stable) {
      for (const auto& a : wl.visible_labels(p))  // ALT-upto-2
        if (!matched(wl.after(p, a), wr.after(q, a))) return false;
      if (!left.inconsistent(p) && left.ready(p) != right.ready(q)) return false;  // ALT-upto-3
    }
  }
  return true;
}

}  // namespace cllr
