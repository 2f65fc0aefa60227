#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <memory>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cllr/action.hpp"
#include "cllr/error.hpp"
#include "cllr/parser.hpp"
#include "cllr/refinement.hpp"
#include "cllr/semantics.hpp"
#include "cllr/term.hpp"

namespace cllr {

enum class FormulaKind { TT, FF, En, Dis, Or, And, Box, Always, WeakUntil };

class Formula {
 public:
  static Formula tt() { return Formula(FormulaKind::TT); }
  static Formula ff() { return Formula(FormulaKind::FF); }
  static Formula en(Action a) { return Formula(FormulaKind::En, std::move(a)); }
  static Formula dis(Action a) { return Formula(FormulaKind::Dis, std::move(a)); }
  static Formula lor(Formula f, Formula g) {
    return Formula(FormulaKind::Or, {}, std::move(f), std::move(g));
  }
  static Formula land(Formula f, Formula g) {
    return Formula(FormulaKind::And, {}, std::move(f), std::move(g));
  }
  static Formula box(Action a, Formula f) {
    return Formula(FormulaKind::Box, std::move(a), std::move(f));
  }
  static Formula always(Formula f) { return Formula(FormulaKind::Always, {}, std::move(f)); }
  static Formula weak_until(Formula f, Formula g) {
    return Formula(FormulaKind::WeakUntil, {}, std::move(f), std::move(g));
  }

  FormulaKind kind() const noexcept { return kind_; }
  const Action& action() const { return action_; }
  // Box/Always: the body; binary operators: the left operand.
  const Formula& left() const { return *kids_.at(0); }
  const Formula& right() const { return *kids_.at(1); }
  const Formula& body() const { return *kids_.at(0); }

  std::size_t depth() const {
    std::size_t d = 0;
    for (const auto& k : kids_) d = std::max(d, k->depth());
    return d + 1;
  }

  friend bool operator==(const Formula& a, const Formula& b) {
    if (a.kind_ != b.kind_ || a.action_ != b.action_ || a.kids_.size() != b.kids_.size())
      return false;
    for (std::size_t i = 0; i < a.kids_.size(); ++i)
      if (!(*a.kids_[i] == *b.kids_[i])) return false;
    return true;
  }

 private:
  explicit Formula(FormulaKind k, Action a = {}) : kind_(k), action_(std::move(a)) {}
  Formula(FormulaKind k, Action a, Formula f) : Formula(k, std::move(a)) {
    kids_.push_back(std::make_shared<const Formula>(std::move(f)));
  }
  Formula(FormulaKind k, Action a, Formula f, Formula g) : Formula(k, std::move(a), std::move(f)) {
    kids_.push_back(std::make_shared<const Formula>(std::move(g)));
  }

  FormulaKind kind_;
  Action action_;
  std::vector<std::shared_ptr<const Formula>> kids_;
};

// Printing. Loosest first: W, \/, /\, then the prefixes [a] and A.
namespace detail {

inline int precedence(FormulaKind k) {
  switch (k) {
    case FormulaKind::WeakUntil: return 1;
    case FormulaKind::Or: return 2;
    case FormulaKind::And: return 3;
    case FormulaKind::Box:
    case FormulaKind::Always: return 4;
    default: return 5;
  }
}

inline void print(std::string& out, const Formula& f, int context) {
  const int level = precedence(f.kind());
  const bool parens = level < context;
  if (parens) out += '(';
  switch (f.kind()) {
    case FormulaKind::TT: out += "tt"; break;
    case FormulaKind::FF: out += "ff"; break;
    case FormulaKind::En: out += "en(" + f.action().name() + ")"; break;
    case FormulaKind::Dis: out += "dis(" + f.action().name() + ")"; break;
    case FormulaKind::Box:
      out += "[" + f.action().name() + "] ";
      print(out, f.body(), level);
      break;
    case FormulaKind::Always:
      out += "A ";
      print(out, f.body(), level);
      break;
    default:
      print(out, f.left(), level);
      out += f.kind() == FormulaKind::Or ? " \\/ " : f.kind() == FormulaKind::And ? " /\\ " : " W ";
      print(out, f.right(), level + 1);
  }
  if (parens) out += ')';
}

class FormulaParser {
 public:
  explicit FormulaParser(std::string_view src) : ts_(src) {}

  Formula parse_all() {
    Formula f = parse_until();
    if (!ts_.at(Tok::End)) ts_.fail({"an operator", "end of input"});
    return f;
  }

 private:
  bool at_keyword(Tok k, std::string_view text) const {
    return ts_.at(k) && ts_.peek().text == text;
  }

  Formula parse_until() {
    Formula f = parse_or();
    while (at_keyword(Tok::UpperIdent, "W")) {
      ts_.next();
      f = Formula::weak_until(std::move(f), parse_or());
    }
    return f;
  }

  Formula parse_or() {
    Formula f = parse_and();
    while (ts_.accept(Tok::DisjOp)) f = Formula::lor(std::move(f), parse_and());
    return f;
  }

  Formula parse_and() {
    Formula f = parse_unary();
    while (ts_.accept(Tok::ConjOp)) f = Formula::land(std::move(f), parse_unary());
    return f;
  }

  Formula parse_unary() {
    if (ts_.accept(Tok::LBracket)) {
      Action a = parse_action();
      ts_.expect(Tok::RBracket, "']'");
      return Formula::box(std::move(a), parse_unary());
    }
    if (ts_.at(Tok::ChoiceOp)) ts_.fail({"an action between '[' and ']'"});
    if (at_keyword(Tok::UpperIdent, "A")) {
      ts_.next();
      return Formula::always(parse_unary());
    }
    return parse_atom();
  }

  Action parse_action() {
    if (!ts_.at(Tok::LowerIdent) || ts_.peek().text == "tau") ts_.fail({"a visible action"});
    return Action(ts_.next().text);
  }

  Formula parse_atom() {
    if (ts_.accept(Tok::LParen)) {
      Formula f = parse_until();
      ts_.expect(Tok::RParen, "')'");
      return f;
    }
    if (ts_.at(Tok::LowerIdent)) {
      const std::string word = ts_.peek().text;
      if (word == "tt") {
        ts_.next();
        return Formula::tt();
      }
      if (word == "ff") {
        ts_.next();
        return Formula::ff();
      }
      if (word == "en" || word == "dis") {
        ts_.next();
        ts_.expect(Tok::LParen, "'('");
        Action a = parse_action();
        ts_.expect(Tok::RParen, "')'");
        return word == "en" ? Formula::en(std::move(a)) : Formula::dis(std::move(a));
      }
    }
    ts_.fail({"'tt'", "'ff'", "'en('", "'dis('", "'['", "'A'", "'('"});
  }

  TokenStream ts_;
};

}  // namespace detail

inline std::string to_string(const Formula& f) {
  std::string out;
  detail::print(out, f, 0);
  return out;
}

inline std::ostream& operator<<(std::ostream& os, const Formula& f) { return os << to_string(f); }

// Visible actions mentioned by the formula, in first-occurrence order.
inline Alphabet actions_of(const Formula& f) {
  Alphabet out;
  auto walk = [&](auto&& self, const Formula& g) -> void {
    switch (g.kind()) {
      case FormulaKind::En:
      case FormulaKind::Dis: out.add(g.action().name()); break;
      case FormulaKind::Box:
        out.add(g.action().name());
        self(self, g.body());
        break;
      case FormulaKind::Always: self(self, g.body()); break;
      case FormulaKind::Or:
      case FormulaKind::And:
      case FormulaKind::WeakUntil:
        self(self, g.left());
        self(self, g.right());
        break;
      default: break;
    }
  };
  walk(walk, f);
  return out;
}

inline void check_formula(const Formula& f, const Alphabet& alphabet) {
  if (alphabet.empty()) throw Error(ErrorKind::EmptyAlphabet, "formulas need a nonempty alphabet");
  for (const auto& a : actions_of(f))
    if (!alphabet.contains(a))
      throw Error(ErrorKind::UnknownAction,
                  "action '" + a + "' is not in the alphabet {" + alphabet.to_string() + "}");
}

inline Formula parse_formula(std::string_view text) {
  return detail::FormulaParser(text).parse_all();
}

inline Formula parse_actl(std::string_view text, const Alphabet& alphabet) {
  if (alphabet.empty()) throw Error(ErrorKind::EmptyAlphabet, "formulas need a nonempty alphabet");
  Formula f = parse_formula(text);
  check_formula(f, alphabet);
  return f;
}

// ---------------------------------------------------------------------------
// Encoding into terms.
// ---------------------------------------------------------------------------

enum class FoldOp { Choice, Disj, Conj };

inline Term gen_fold(FoldOp op, const std::vector<Term>& items) {
  if (items.empty()) {
    switch (op) {
      case FoldOp::Choice: return Term::nil();
      case FoldOp::Disj: throw Error(ErrorKind::EmptyDisjunction, "disjunction over no terms");
      case FoldOp::Conj: throw Error(ErrorKind::EmptyConjunction, "conjunction over no terms");
    }
  }
  Term acc = items.front();
  for (std::size_t i = 1; i < items.size(); ++i) {
    switch (op) {
      case FoldOp::Choice: acc = Term::choice(std::move(acc), items[i]); break;
      case FoldOp::Disj: acc = Term::disj(std::move(acc), items[i]); break;
      case FoldOp::Conj: acc = Term::conj(std::move(acc), items[i]); break;
    }
  }
  return acc;
}

inline constexpr std::size_t kDefaultAlphabetCap = 4;

namespace detail {

// Subsets of the alphabet as index lists, ascending bitmask order.
inline std::vector<std::vector<std::size_t>> subsets(const Alphabet& alphabet) {
  std::vector<std::vector<std::size_t>> out;
  const std::size_t n = alphabet.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t{1} << i)) s.push_back(i);
    out.push_back(std::move(s));
  }
  return out;
}

inline bool has_index(const std::vector<std::size_t>& s, std::size_t i) {
  return std::find(s.begin(), s.end(), i) != s.end();
}

inline void check_alphabet(const Alphabet& alphabet, std::size_t cap) {
  if (alphabet.empty()) throw Error(ErrorKind::EmptyAlphabet, "encoding needs a nonempty alphabet");
  if (alphabet.size() > cap)
    throw Error(ErrorKind::AlphabetTooLarge, "alphabet has " + std::to_string(alphabet.size()) +
                                                 " actions, the cap is " + std::to_string(cap));
}

// Disjunction over the subsets selected by `keep` of the choice over b.E(tt).
template <class Pred>
inline Term ready_disjunction(const Alphabet& alphabet, const Term& any, Pred keep) {
  std::vector<Term> disjuncts;
  for (const auto& s : subsets(alphabet)) {
    if (!keep(s)) continue;
    std::vector<Term> arms;
    for (auto i : s) arms.push_back(Term::prefix(alphabet.action(i), any));
    disjuncts.push_back(gen_fold(FoldOp::Choice, arms));
  }
  return gen_fold(FoldOp::Disj, disjuncts);
}

}  // namespace detail

// E(tt) = <X | X = \/_{A ⊆ Act} []_{a in A} a.X>
inline Term encode_tt(const Alphabet& alphabet) {
  detail::check_alphabet(alphabet, std::numeric_limits<std::size_t>::max());
  std::vector<Term> disjuncts;
  for (const auto& s : detail::subsets(alphabet)) {
    std::vector<Term> arms;
    for (auto i : s) arms.push_back(Term::prefix(alphabet.action(i), Term::var("X")));
    disjuncts.push_back(gen_fold(FoldOp::Choice, arms));
  }
  return Term::rec("X", {Binding{"X", gen_fold(FoldOp::Disj, disjuncts)}});
}

// ⌈a⌉body: after an a-step, body; every other ready set is left unconstrained.
inline Term box_a(const Action& a, const Term& body, const Alphabet& alphabet) {
  auto idx = alphabet.index_of(a.name());
  if (!idx)
    throw Error(ErrorKind::Precondition,
                "action '" + a.name() + "' is not in the alphabet {" + alphabet.to_string() + "}");
  const Term any = encode_tt(alphabet);
  const auto all = detail::subsets(alphabet);
  std::vector<Term> disjuncts;
  for (const auto& s : all) {
    if (!detail::has_index(s, *idx)) continue;
    std::vector<Term> arms;
    for (auto i : s)
      if (i != *idx) arms.push_back(Term::prefix(alphabet.action(i), any));
    arms.push_back(Term::prefix(a, body));
    disjuncts.push_back(gen_fold(FoldOp::Choice, arms));
  }
  for (const auto& s : all) {
    if (detail::has_index(s, *idx)) continue;
    std::vector<Term> arms;
    for (auto i : s) arms.push_back(Term::prefix(alphabet.action(i), any));
    disjuncts.push_back(gen_fold(FoldOp::Choice, arms));
  }
  return gen_fold(FoldOp::Disj, disjuncts);
}

inline Term encode(const Formula& f, const Alphabet& alphabet,
                   std::size_t cap = kDefaultAlphabetCap) {
  detail::check_alphabet(alphabet, cap);
  check_formula(f, alphabet);
  const Term any = encode_tt(alphabet);

  auto all_boxes = [&](const Term& x) {
    std::vector<Term> boxes;
    for (std::size_t i = 0; i < alphabet.size(); ++i)
      boxes.push_back(box_a(alphabet.action(i), x, alphabet));
    return gen_fold(FoldOp::Conj, boxes);
  };

  auto enc = [&](auto&& self, const Formula& g) -> Term {
    switch (g.kind()) {
      case FormulaKind::TT: return any;
      case FormulaKind::FF: return Term::bot();
      case FormulaKind::En: {
        auto i = *alphabet.index_of(g.action().name());
        return detail::ready_disjunction(alphabet, any,
                                         [&](const auto& s) { return detail::has_index(s, i); });
      }
      case FormulaKind::Dis: {
        auto i = *alphabet.index_of(g.action().name());
        return detail::ready_disjunction(alphabet, any,
                                         [&](const auto& s) { return !detail::has_index(s, i); });
      }
      case FormulaKind::Or: return Term::disj(self(self, g.left()), self(self, g.right()));
      case FormulaKind::And: return Term::conj(self(self, g.left()), self(self, g.right()));
      case FormulaKind::Box: return box_a(g.action(), self(self, g.body()), alphabet);
      case FormulaKind::Always: {
        Term x = Term::var("X");
        return Term::rec("X", {Binding{"X", Term::conj(self(self, g.body()), all_boxes(x))}});
      }
      case FormulaKind::WeakUntil: {
        Term x = Term::var("X");
        Term body = Term::disj(self(self, g.right()),
                               Term::conj(self(self, g.left()), all_boxes(x)));
        return Term::rec("X", {Binding{"X", std::move(body)}});
      }
    }
    return any;
  };
  return enc(enc, f);
}

// ---------------------------------------------------------------------------
// Satisfaction.
// ---------------------------------------------------------------------------

// Direct evaluation over the stable F-free states of a graph. A state set is
// computed per subformula; p satisfies f iff all its F-free stable
// descendants are in the set.
class DirectChecker {
 public:
  explicit DirectChecker(const Lts& lts) : lts_(&lts), steps_(lts) {
    for (StateId s = 0; s < lts.size(); ++s)
      if (lts.stable(s) && !lts.inconsistent(s)) stable_.push_back(s);
  }

  bool holds(StateId p, const Formula& f) {
    const auto set = eval(f);
    for (auto q : steps_.eps(p))
      if (!set[q]) return false;
    return true;
  }

  std::vector<bool> eval(const Formula& f) {
    const std::size_t n = lts_->size();
    std::vector<bool> out(n, false);
    switch (f.kind()) {
      case FormulaKind::TT:
        for (auto s : stable_) out[s] = true;
        break;
      case FormulaKind::FF: break;
      case FormulaKind::En:
      case FormulaKind::Dis:
        for (auto s : stable_)
          out[s] = (lts_->ready(s).count(f.action()) > 0) == (f.kind() == FormulaKind::En);
        break;
      case FormulaKind::Or:
      case FormulaKind::And: {
        auto l = eval(f.left());
        auto r = eval(f.right());
        for (auto s : stable_) out[s] = f.kind() == FormulaKind::Or ? (l[s] || r[s]) : (l[s] && r[s]);
        break;
      }
      case FormulaKind::Box: {
        auto b = eval(f.body());
        for (auto s : stable_) out[s] = all_in(steps_.after(s, f.action()), b);
        break;
      }
      case FormulaKind::Always: {
        auto b = eval(f.body());
        out = greatest([&](StateId s, const std::vector<bool>& y) { return b[s] && next_all(s, y); });
        break;
      }
      case FormulaKind::WeakUntil: {
        auto l = eval(f.left());
        auto r = eval(f.right());
        out = greatest(
            [&](StateId s, const std::vector<bool>& y) { return r[s] || (l[s] && next_all(s, y)); });
        break;
      }
    }
    return out;
  }

 private:
  static bool all_in(const std::vector<StateId>& xs, const std::vector<bool>& set) {
    for (auto x : xs)
      if (!set[x]) return false;
    return true;
  }

  bool next_all(StateId s, const std::vector<bool>& y) {
    for (const auto& a : steps_.visible_labels(s))
      if (!all_in(steps_.after(s, a), y)) return false;
    return true;
  }

  template <class Step>
  std::vector<bool> greatest(Step step) {
    std::vector<bool> y(lts_->size(), false);
    for (auto s : stable_) y[s] = true;
    for (bool changed = true; changed;) {
      changed = false;
      for (auto s : stable_) {
        if (y[s] && !step(s, y)) {
          y[s] = false;
          changed = true;
        }
      }
    }
    return y;
  }

  const Lts* lts_;
  WeakSteps steps_;
  std::vector<StateId> stable_;
};

inline bool sat_direct(const Term& p, const Formula& f, const Alphabet& alphabet,
                       std::size_t bound = 10000) {
  check_formula(f, alphabet);
  BuildOptions o;
  o.bound = bound;
  const Lts lts = build_lts(p, o, alphabet);
  DirectChecker checker(lts);
  return checker.holds(lts.initial(), f);
}

inline RefinementVerdict sat_refine_verdict(const Term& p, const Formula& f,
                                            const Alphabet& alphabet, std::size_t bound = 10000,
                                            std::size_t cap = kDefaultAlphabetCap) {
  const Term e = encode(f, alphabet, cap);
  BuildOptions o;
  o.bound = bound;
  return refines(p, e, o);
}

inline bool sat_refine(const Term& p, const Formula& f, const Alphabet& alphabet,
                       std::size_t bound = 10000, std::size_t cap = kDefaultAlphabetCap) {
  return sat_refine_verdict(p, f, alphabet, bound, cap).holds;
}

}  // namespace cllr
