#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cllr/actl.hpp"
#include "cllr/parser.hpp"
#include "cllr/term.hpp"

namespace cllr::testing {

struct GenConfig {
  std::vector<std::string> actions{"a", "b"};
  bool tau = true;
  bool bot = true;
  bool conj = true;
  bool disj = true;
  bool par = true;
  bool rec = true;
};

// Random guarded terms. Depth counts nodes on the longest path, so depth 1
// is a leaf. Recursion variables only appear where they are guarded, and
// parallel operands never mention an enclosing recursion variable, which
// keeps every generated process finite-state.
class TermGen {
 public:
  explicit TermGen(std::uint64_t seed, GenConfig cfg = {}) : rng_(seed), cfg_(std::move(cfg)) {}

  std::mt19937_64& rng() { return rng_; }

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  Action action(bool allow_tau) {
    int n = static_cast<int>(cfg_.actions.size());
    if (allow_tau && cfg_.tau && uniform(0, n * 2) == 0) return Action::tau();
    return Action(cfg_.actions[static_cast<std::size_t>(uniform(0, n - 1))]);
  }

  Term closed(int depth) {
    std::vector<Slot> scope;
    return gen(depth, scope);
  }

  // A closed term whose root is a recursion.
  Term recursion(int depth) {
    std::vector<Slot> scope;
    return gen_rec(std::max(depth, 2), scope);
  }

  // A term with exactly one free occurrence of `hole`.
  Term context(int depth, const std::string& hole) {
    std::vector<Slot> scope;
    return gen_ctx(depth, hole, scope);
  }

  // Body of an equation in `var`: var is the only free variable and occurs
  // only under visible prefixes (strong guard); with `conj_free`, never
  // inside a conjunction.
  Term equation_body(int depth, const std::string& var, bool conj_free) {
    std::vector<Slot> scope{{var, false, Guard::Strong}};
    conj_free_var_ = conj_free ? var : std::string();
    Term t = gen(depth, scope);
    conj_free_var_.clear();
    return t;
  }

  Formula formula(int depth) {
    const auto pick_action = [&] { return action(false); };
    if (depth <= 1 || chance(0.2)) {
      switch (uniform(0, 3)) {
        case 0: return Formula::tt();
        case 1: return Formula::ff();
        case 2: return Formula::en(pick_action());
        default: return Formula::dis(pick_action());
      }
    }
    switch (uniform(0, 4)) {
      case 0: return Formula::lor(formula(depth - 1), formula(depth - 1));
      case 1: return Formula::land(formula(depth - 1), formula(depth - 1));
      case 2: return Formula::box(pick_action(), formula(depth - 1));
      case 3: return Formula::always(formula(depth - 1));
      default: return Formula::weak_until(formula(depth - 1), formula(depth - 1));
    }
  }

 private:
  enum class Guard { Any, Strong };

  struct Slot {
    std::string var;
    bool guarded;
    Guard need;
  };

  std::string fresh() { return "V" + std::to_string(counter_++); }

  static void guard_all(std::vector<Slot>& scope, bool visible) {
    for (auto& s : scope)
      if (visible || s.need == Guard::Any) s.guarded = true;
  }

  Term leaf(const std::vector<Slot>& scope) {
    std::vector<const Slot*> usable;
    for (const auto& s : scope)
      if (s.guarded) usable.push_back(&s);
    int r = uniform(0, 9);
    if (!usable.empty() && r < 5)
      return Term::var(usable[static_cast<std::size_t>(uniform(0, static_cast<int>(usable.size()) - 1))]->var);
    if (cfg_.bot && r == 9) return Term::bot();
    return Term::nil();
  }

  bool conj_allowed(const std::vector<Slot>& scope) const {
    if (!cfg_.conj) return false;
    if (conj_free_var_.empty()) return true;
    for (const auto& s : scope)
      if (s.var == conj_free_var_) return false;
    return true;
  }

  Term gen(int depth, std::vector<Slot>& scope) {
    if (depth <= 1) return leaf(scope);
    for (;;) {
      switch (uniform(0, 9)) {
        case 0:
        case 1:
        case 2:
        case 8: {
          Action a = action(true);
          auto inner = scope;
          guard_all(inner, !a.is_tau());
          return Term::prefix(std::move(a), gen(depth - 1, inner));
        }
        case 3: return Term::choice(gen(depth - 1, scope), gen(depth - 1, scope));
        case 4: {
          if (!cfg_.disj) break;
          auto inner = scope;
          guard_all(inner, false);
          return Term::disj(gen(depth - 1, inner), gen(depth - 1, inner));
        }
        case 5: {
          if (!conj_allowed(scope)) break;
          // Variables stay out of conjunctions unless the caller allows them.
          return Term::conj(gen(depth - 1, scope), gen(depth - 1, scope));
        }
        case 6: {
          if (!cfg_.par) break;
          std::vector<Slot> none;
          ActionSet sync;
          for (const auto& a : cfg_.actions)
            if (chance(0.5)) sync.insert(Action(a));
          return Term::par(std::move(sync), gen(depth - 1, none), gen(depth - 1, none));
        }
        case 7: {
          if (!cfg_.rec) break;
          return gen_rec(depth, scope);
        }
        default: return leaf(scope);
      }
    }
  }

  Term gen_rec(int depth, std::vector<Slot>& scope) {
    const int n = chance(0.25) ? 2 : 1;
    std::vector<std::string> vars;
    for (int i = 0; i < n; ++i) vars.push_back(fresh());
    auto inner = scope;
    for (const auto& v : vars) inner.push_back({v, false, Guard::Any});
    std::vector<Binding> bs;
    for (const auto& v : vars) {
      auto body_scope = inner;
      bs.push_back({v, gen(depth - 1, body_scope)});
    }
    return Term::rec(vars.front(), std::move(bs));
  }

  Term gen_ctx(int depth, const std::string& hole, std::vector<Slot>& scope) {
    if (depth <= 1) return Term::var(hole);
    switch (uniform(0, 7)) {
      case 0: {
        Action a = action(true);
        auto inner = scope;
        guard_all(inner, !a.is_tau());
        return Term::prefix(std::move(a), gen_ctx(depth - 1, hole, inner));
      }
      case 1:
      case 2:
      case 3:
      case 4: {
        Term with = gen_ctx(depth - 1, hole, scope);
        Term other = gen(depth - 1, scope);
        bool left = chance(0.5);
        Term l = left ? with : other, r = left ? other : with;
        switch (uniform(0, cfg_.par ? 3 : 2)) {
          case 0: return Term::choice(l, r);
          case 1: return Term::conj(l, r);
          case 2: return Term::disj(l, r);
          default: {
            std::vector<Slot> none;
            Term lc = left ? gen_ctx(depth - 1, hole, none) : gen(depth - 1, none);
            Term rc = left ? gen(depth - 1, none) : gen_ctx(depth - 1, hole, none);
            ActionSet sync;
            for (const auto& a : cfg_.actions)
              if (chance(0.5)) sync.insert(Action(a));
            return Term::par(std::move(sync), lc, rc);
          }
        }
      }
      case 5: {
        std::string v = fresh();
        auto inner = scope;
        inner.push_back({v, false, Guard::Any});
        return Term::rec(v, {Binding{v, gen_ctx(depth - 1, hole, inner)}});
      }
      default: return Term::var(hole);
    }
  }

  std::mt19937_64 rng_;
  GenConfig cfg_;
  std::size_t counter_ = 0;
  std::string conj_free_var_;
};

// Random pairs skewed towards related terms so both verdicts occur often.
inline std::pair<Term, Term> related_pair(TermGen& gen, int depth) {
  Term p = gen.closed(depth);
  switch (gen.uniform(0, 5)) {
    case 0: return {p, Term::disj(p, gen.closed(depth))};
    case 1: return {Term::conj(p, gen.closed(depth)), p};
    case 2: return {p, parse_term(to_string(p))};
    default: return {p, gen.closed(depth)};
  }
}

}  // namespace cllr::testing
