#pragma once

#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cllr/error.hpp"
#include "cllr/parser.hpp"
#include "cllr/refinement.hpp"
#include "cllr/semantics.hpp"
#include "cllr/syntax.hpp"

namespace cllr {

// The equation  var =RS body  where body may mention var freely.
struct EquationProblem {
  std::string var = "X";
  Term body;
  Alphabet alphabet;
  std::size_t bound = 10000;
};

struct SolutionReport {
  Term candidate;
  bool is_solution = false;
  bool is_consistent = false;
  // Set only for consistent solutions.
  std::optional<bool> refines_canonical;
};

inline void check_problem(const EquationProblem& prob) {
  for (const auto& v : free_vars(prob.body))
    if (v != prob.var)
      throw Error(ErrorKind::Precondition, "body has free variable " + v + " besides " + prob.var);
  if (guard_mode(prob.body, prob.var) == GuardMode::Unguarded)
    throw Error(ErrorKind::UnguardedRecursion, prob.var + " occurs unguarded in the body");
  validate(prob.body, prob.alphabet);
}

inline Term canonical_solution(const EquationProblem& prob) {
  check_problem(prob);
  return Term::rec(prob.var, {Binding{prob.var, prob.body}});
}

namespace detail {

inline BuildOptions options_for(const EquationProblem& prob) {
  BuildOptions o;
  o.bound = prob.bound;
  return o;
}

inline SolutionReport analyse_candidate(const Term& p, const EquationProblem& prob,
                                        const Term& canonical) {
  if (!is_closed(p))
    throw Error(ErrorKind::Precondition, "candidate has free variables: " + to_string(p));
  validate(p, prob.alphabet);
  const Term image = substitute(prob.body, prob.var, p);
  const std::vector<Term> roots{p, image, canonical};
  const Lts lts = build_lts(roots, options_for(prob), prob.alphabet);
  const StateId sp = lts.roots()[0], si = lts.roots()[1], sc = lts.roots()[2];

  SolutionReport r;
  r.candidate = p;
  r.is_solution = equivalent(lts, sp, lts, si);
  r.is_consistent = !lts.inconsistent(sp);
  if (r.is_solution && r.is_consistent) r.refines_canonical = refines(lts, sp, lts, sc).holds;
  return r;
}

}  // namespace detail

// p =RS body{p/var}, p not in F, and (for consistent solutions) p below the
// canonical solution.
inline SolutionReport is_solution(const Term& p, const EquationProblem& prob) {
  return detail::analyse_candidate(p, prob, canonical_solution(prob));
}

inline bool uniqueness_precondition(const EquationProblem& prob) {
  return guard_mode(prob.body, prob.var) == GuardMode::Strong &&
         conj_scope_free(prob.body, prob.var);
}

// One report per candidate; the greatest-solution property holds on the
// candidate set iff every consistent solution refines the canonical one.
inline std::vector<SolutionReport> check_greatest(const EquationProblem& prob,
                                                  const std::vector<Term>& candidates) {
  if (guard_mode(prob.body, prob.var) != GuardMode::Strong)
    throw Error(ErrorKind::Precondition,
                prob.var + " is not strongly guarded in " + to_string(prob.body));
  const Term canonical = canonical_solution(prob);
  std::vector<SolutionReport> out;
  out.reserve(candidates.size());
  for (const auto& c : candidates) out.push_back(detail::analyse_candidate(c, prob, canonical));
  return out;
}

inline bool greatest_holds(const std::vector<SolutionReport>& reports) {
  for (const auto& r : reports)
    if (r.is_solution && r.is_consistent && !r.refines_canonical.value_or(false)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Equation files:
//
//   alphabet a,b        (optional; inferred from the terms when absent)
//   var X
//   body <term>
//   candidate <term>    (zero or more)
//
// Blank lines and lines starting with '#' are ignored.
// ---------------------------------------------------------------------------

struct EquationFile {
  EquationProblem problem;
  std::vector<Term> candidates;
};

inline EquationFile parse_equation_file(std::string_view text, const Alphabet& override_alphabet = {},
                                        std::size_t bound = 10000) {
  std::optional<Alphabet> declared;
  std::optional<std::string> var;
  std::optional<std::string> body_text;
  std::vector<std::string> candidate_texts;

  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    line = line.substr(first);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    auto sp = line.find_first_of(" \t");
    std::string head = line.substr(0, sp);
    std::string rest = sp == std::string::npos ? "" : line.substr(line.find_first_not_of(" \t", sp));
    auto bad = [&](const std::string& what) {
      throw Error(ErrorKind::Syntax, "line " + std::to_string(lineno) + ": " + what);
    };
    if (head == "alphabet") {
      if (declared) bad("duplicate alphabet line");
      declared = Alphabet::parse(rest);
    } else if (head == "var") {
      if (var) bad("duplicate var line");
      if (!is_variable_identifier(rest)) bad("expected a variable name after 'var'");
      var = rest;
    } else if (head == "body") {
      if (body_text) bad("duplicate body line");
      body_text = rest;
    } else if (head == "candidate") {
      candidate_texts.push_back(rest);
    } else {
      bad("unknown directive '" + head + "'");
    }
  }
  if (!body_text) throw Error(ErrorKind::Syntax, "missing body line");

  Alphabet alphabet = !override_alphabet.empty() ? override_alphabet : declared.value_or(Alphabet{});
  EquationFile f;
  f.problem.var = var.value_or("X");
  f.problem.bound = bound;
  f.problem.body = parse_term(*body_text, alphabet);
  for (const auto& c : candidate_texts) f.candidates.push_back(parse_term(c, alphabet));
  if (alphabet.empty()) {
    alphabet = actions_of(f.problem.body);
    for (const auto& c : f.candidates) alphabet = alphabet.merged(actions_of(c));
  }
  f.problem.alphabet = alphabet;
  check_problem(f.problem);
  return f;
}

}  // namespace cllr
