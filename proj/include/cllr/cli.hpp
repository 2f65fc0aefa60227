#pragma once

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cllr/actl.hpp"
#include "cllr/equations.hpp"
#include "cllr/error.hpp"
#include "cllr/io.hpp"
#include "cllr/parser.hpp"
#include "cllr/refinement.hpp"
#include "cllr/semantics.hpp"

namespace cllr::cli {

inline constexpr std::size_t kDefaultBound = 10000;

struct RunConfig {
  std::optional<Alphabet> alphabet;
  std::size_t bound = kDefaultBound;
  std::string format = "text";
  std::string method = "both";
};

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Loaded {
  Term term;
  Alphabet alphabet;  // declared (flag or header), or empty
};

inline Loaded load_term(const std::string& path, const RunConfig& cfg) {
  SourceText src = split_header(read_file(path));
  Alphabet declared = cfg.alphabet ? *cfg.alphabet : src.alphabet.value_or(Alphabet{});
  Loaded l{parse_term(src.body, declared), declared};
  return l;
}

struct LoadedFormula {
  Formula formula;
  Alphabet alphabet;
};

inline LoadedFormula load_formula(const std::string& path, const RunConfig& cfg) {
  SourceText src = split_header(read_file(path));
  Alphabet declared = cfg.alphabet ? *cfg.alphabet : src.alphabet.value_or(Alphabet{});
  Formula f = parse_formula(src.body);
  if (!declared.empty()) check_formula(f, declared);
  return {std::move(f), declared};
}

inline BuildOptions options(const RunConfig& cfg) {
  BuildOptions o;
  o.bound = cfg.bound;
  return o;
}

inline void require_closed(const Term& t, const std::string& path) {
  if (!is_closed(t))
    throw Error(ErrorKind::Precondition, path + ": term has free variables");
}

inline void reject_dot(const RunConfig& cfg) {
  if (cfg.format == "dot") throw Error(ErrorKind::Usage, "dot output is only available for lts");
}

inline json string_array(const std::vector<std::string>& xs) {
  json j = json::array();
  for (const auto& x : xs) j.push_back(x);
  return j;
}

inline json alphabet_json(const Alphabet& a) { return string_array({a.begin(), a.end()}); }

// --- subcommands -----------------------------------------------------------

inline int cmd_parse(const std::string& path, const RunConfig& cfg, std::ostream& out) {
  reject_dot(cfg);
  auto l = load_term(path, cfg);
  if (cfg.format == "json") {
    json j{{"term", to_string(l.term)},
           {"canonical", canonical_key(l.term)},
           {"closed", is_closed(l.term)},
           {"free_vars", string_array(free_vars_ordered(l.term))},
           {"actions", alphabet_json(actions_of(l.term))}};
    out << j.dump(2) << "\n";
  } else {
    out << to_string(l.term) << "\n";
  }
  return 0;
}

inline int cmd_lts(const std::string& path, const RunConfig& cfg, std::ostream& out) {
  auto l = load_term(path, cfg);
  require_closed(l.term, path);
  const Lts lts = build_lts(l.term, options(cfg), l.alphabet);
  if (cfg.format == "json")
    out << lts_to_json(lts).dump(2) << "\n";
  else if (cfg.format == "dot")
    out << lts_to_dot(lts);
  else
    out << lts_to_text(lts);
  return 0;
}

inline int cmd_consistent(const std::string& path, const RunConfig& cfg, std::ostream& out) {
  reject_dot(cfg);
  auto l = load_term(path, cfg);
  require_closed(l.term, path);
  const Lts lts = build_lts(l.term, options(cfg), l.alphabet);
  const bool ok = !lts.inconsistent(lts.initial());
  if (cfg.format == "json")
    out << json{{"term", to_string(l.term)}, {"consistent", ok}, {"states", lts.size()}}.dump(2)
        << "\n";
  else
    out << (ok ? "consistent" : "inconsistent") << "\n";
  return ok ? 0 : 1;
}

inline std::pair<Lts, Lts> build_two(const Loaded& a, const Loaded& b, const RunConfig& cfg) {
  Alphabet merged = a.alphabet.merged(b.alphabet);
  merged = merged.merged(actions_of(a.term)).merged(actions_of(b.term));
  return {build_lts(a.term, options(cfg), merged), build_lts(b.term, options(cfg), merged)};
}

inline int cmd_refine(const std::string& left, const std::string& right, const RunConfig& cfg,
                      std::ostream& out) {
  reject_dot(cfg);
  auto a = load_term(left, cfg);
  auto b = load_term(right, cfg);
  require_closed(a.term, left);
  require_closed(b.term, right);
  auto [la, lb] = build_two(a, b, cfg);
  const auto v = refines(la, la.initial(), lb, lb.initial());
  if (cfg.format == "json")
    out << verdict_to_json(v).dump(2) << "\n";
  else
    out << verdict_to_text(v);
  return v.holds ? 0 : 1;
}

inline int cmd_equiv(const std::string& left, const std::string& right, const RunConfig& cfg,
                     std::ostream& out) {
  reject_dot(cfg);
  auto a = load_term(left, cfg);
  auto b = load_term(right, cfg);
  require_closed(a.term, left);
  require_closed(b.term, right);
  auto [la, lb] = build_two(a, b, cfg);
  const auto ab = refines(la, la.initial(), lb, lb.initial());
  const auto ba = refines(lb, lb.initial(), la, la.initial());
  const bool eq = ab.holds && ba.holds;
  if (cfg.format == "json") {
    out << json{{"equivalent", eq},
                {"left_refines_right", verdict_to_json(ab)},
                {"right_refines_left", verdict_to_json(ba)}}
               .dump(2)
        << "\n";
  } else {
    out << (eq ? "equivalent" : "not equivalent") << "\n";
    if (!ab.holds) out << "left below right " << verdict_to_text(ab);
    if (!ba.holds) out << "right below left " << verdict_to_text(ba);
  }
  return eq ? 0 : 1;
}

inline EquationFile load_equation(const std::string& path, const RunConfig& cfg) {
  return parse_equation_file(read_file(path), cfg.alphabet.value_or(Alphabet{}), cfg.bound);
}

inline json problem_json(const EquationFile& f) {
  return json{{"var", f.problem.var},
              {"body", to_string(f.problem.body)},
              {"alphabet", alphabet_json(f.problem.alphabet)},
              {"canonical", to_string(canonical_solution(f.problem))}};
}

inline int cmd_eq_check(const std::string& path, const RunConfig& cfg, std::ostream& out) {
  reject_dot(cfg);
  auto f = load_equation(path, cfg);
  std::vector<Term> cands = f.candidates;
  if (cands.empty()) cands.push_back(canonical_solution(f.problem));
  std::vector<SolutionReport> reports;
  for (const auto& c : cands) reports.push_back(is_solution(c, f.problem));
  bool all = std::all_of(reports.begin(), reports.end(),
                         [](const SolutionReport& r) { return r.is_solution; });
  if (cfg.format == "json") {
    json j = problem_json(f);
    j["reports"] = json::array();
    for (const auto& r : reports) j["reports"].push_back(report_to_json(r));
    j["holds"] = all;
    out << j.dump(2) << "\n";
  } else {
    out << reports_to_text(reports);
  }
  return all ? 0 : 1;
}

inline int cmd_eq_greatest(const std::string& path, const RunConfig& cfg, std::ostream& out) {
  reject_dot(cfg);
  auto f = load_equation(path, cfg);
  auto reports = check_greatest(f.problem, f.candidates);
  const bool ok = greatest_holds(reports);
  if (cfg.format == "json") {
    json j = problem_json(f);
    j["reports"] = json::array();
    for (const auto& r : reports) j["reports"].push_back(report_to_json(r));
    j["holds"] = ok;
    out << j.dump(2) << "\n";
  } else {
    out << reports_to_text(reports);
    out << (ok ? "greatest consistent solution confirmed" : "greatest consistent solution refuted")
        << "\n";
  }
  return ok ? 0 : 1;
}

inline int cmd_eq_unique(const std::string& path, const RunConfig& cfg, std::ostream& out) {
  reject_dot(cfg);
  auto f = load_equation(path, cfg);
  const GuardMode g = guard_mode(f.problem.body, f.problem.var);
  const bool free = conj_scope_free(f.problem.body, f.problem.var);
  const bool ok = uniqueness_precondition(f.problem);
  if (cfg.format == "json") {
    json j = problem_json(f);
    j["guard_mode"] = std::string(to_string(g));
    j["conjunction_free"] = free;
    j["holds"] = ok;
    out << j.dump(2) << "\n";
  } else {
    out << "guard mode: " << to_string(g) << "\n"
        << "outside conjunctions: " << (free ? "yes" : "no") << "\n"
        << "precondition " << (ok ? "holds" : "fails") << "\n";
  }
  return ok ? 0 : 1;
}

inline int cmd_actl_encode(const std::string& path, const RunConfig& cfg, std::ostream& out) {
  reject_dot(cfg);
  auto lf = load_formula(path, cfg);
  Alphabet alphabet = lf.alphabet.empty() ? actions_of(lf.formula) : lf.alphabet;
  const Term e = encode(lf.formula, alphabet);
  if (cfg.format == "json")
    out << json{{"formula", to_string(lf.formula)},
                {"alphabet", alphabet_json(alphabet)},
                {"term", to_string(e)}}
               .dump(2)
        << "\n";
  else
    out << to_string(e) << "\n";
  return 0;
}

inline int cmd_actl_check(const std::string& proc, const std::string& formula,
                          const RunConfig& cfg, std::ostream& out) {
  reject_dot(cfg);
  auto lf = load_formula(formula, cfg);
  auto lp = load_term(proc, cfg);
  require_closed(lp.term, proc);
  Alphabet alphabet = lf.alphabet;
  if (alphabet.empty()) alphabet = lp.alphabet;
  if (alphabet.empty()) alphabet = actions_of(lp.term).merged(actions_of(lf.formula));
  check_formula(lf.formula, alphabet);
  validate(lp.term, alphabet);

  std::optional<bool> direct;
  std::optional<RefinementVerdict> verdict;
  if (cfg.method != "refine") direct = sat_direct(lp.term, lf.formula, alphabet, cfg.bound);
  if (cfg.method != "direct") verdict = sat_refine_verdict(lp.term, lf.formula, alphabet, cfg.bound);
  if (direct && verdict && *direct != verdict->holds)
    throw Error(ErrorKind::Disagreement,
                std::string("direct check says ") + (*direct ? "satisfied" : "not satisfied") +
                    ", refinement check says " + (verdict->holds ? "satisfied" : "not satisfied"));
  const bool holds = verdict ? verdict->holds : *direct;
  if (cfg.format == "json") {
    json j{{"process", to_string(lp.term)},
           {"formula", to_string(lf.formula)},
           {"alphabet", alphabet_json(alphabet)},
           {"method", cfg.method},
           {"holds", holds}};
    if (direct) j["direct"] = *direct;
    if (verdict) j["refinement"] = verdict_to_json(*verdict);
    out << j.dump(2) << "\n";
  } else {
    out << (holds ? "satisfied" : "not satisfied") << "\n";
    if (verdict && !verdict->holds) out << verdict_to_text(*verdict);
  }
  return holds ? 0 : 1;
}

inline std::size_t bound_from_env(const std::optional<std::string>& env) {
  if (!env || env->empty()) return kDefaultBound;
  try {
    std::size_t used = 0;
    long long v = std::stoll(*env, &used);
    if (used == env->size() && v > 0) return static_cast<std::size_t>(v);
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::Usage, "CLLR_BOUND must be a positive integer, got '" + *env + "'");
}

}  // namespace detail

// Runs one command line (without the program name). `env_bound` stands in
// for the CLLR_BOUND environment variable.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
               const std::optional<std::string>& env_bound) {
  CLI::App app{"Refinement and consistency checks for logic LTS process terms", "cllr"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  std::string alphabet_text;
  std::size_t bound = 0;
  app.add_option("--alphabet", alphabet_text, "Declared actions, e.g. a,b");
  app.add_option("--bound", bound, "State bound (default 10000 or CLLR_BOUND)")
      ->check(CLI::PositiveNumber);
  app.add_option("--format", cfg.format, "Output format")
      ->check(CLI::IsMember({"text", "json", "dot"}));
  app.add_option("--method", cfg.method, "Satisfaction checker for actl check")
      ->check(CLI::IsMember({"direct", "refine", "both"}));

  std::string f1, f2;
  auto* parse = app.add_subcommand("parse", "Parse and print a term");
  parse->add_option("file", f1, "Term file (.cllr)")->required();
  auto* lts = app.add_subcommand("lts", "Build the transition graph");
  lts->add_option("file", f1, "Term file (.cllr)")->required();
  auto* consistent = app.add_subcommand("consistent", "Exit 0 iff the process is not in F");
  consistent->add_option("file", f1, "Term file (.cllr)")->required();
  auto* refine = app.add_subcommand("refine", "Check left is ready-simulated by right");
  refine->add_option("left", f1)->required();
  refine->add_option("right", f2)->required();
  auto* equiv = app.add_subcommand("equiv", "Check ready-simulation equivalence");
  equiv->add_option("left", f1)->required();
  equiv->add_option("right", f2)->required();

  auto* eq = app.add_subcommand("eq", "Recursive equation analysis");
  eq->require_subcommand(1);
  auto* eq_check = eq->add_subcommand("check", "Check each candidate is a solution");
  eq_check->add_option("file", f1, "Equation file (.eq)")->required();
  auto* eq_greatest = eq->add_subcommand("greatest", "Check the canonical solution is greatest");
  eq_greatest->add_option("file", f1, "Equation file (.eq)")->required();
  auto* eq_unique = eq->add_subcommand("unique-pre", "Check the uniqueness precondition");
  eq_unique->add_option("file", f1, "Equation file (.eq)")->required();

  auto* actl = app.add_subcommand("actl", "Action-based CTL formulas");
  actl->require_subcommand(1);
  auto* actl_encode = actl->add_subcommand("encode", "Print the encoding of a formula");
  actl_encode->add_option("formula", f1, "Formula file (.actl)")->required();
  auto* actl_check = actl->add_subcommand("check", "Check a process satisfies a formula");
  actl_check->add_option("process", f1, "Term file (.cllr)")->required();
  actl_check->add_option("formula", f2, "Formula file (.actl)")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error:" << kind_name(ErrorKind::Usage) << ": " << e.what() << "\n";
    return 2;
  }

  try {
    if (!alphabet_text.empty()) cfg.alphabet = Alphabet::parse(alphabet_text);
    cfg.bound = bound > 0 ? bound : detail::bound_from_env(env_bound);

    if (*parse) return detail::cmd_parse(f1, cfg, out);
    if (*lts) return detail::cmd_lts(f1, cfg, out);
    if (*consistent) return detail::cmd_consistent(f1, cfg, out);
    if (*refine) return detail::cmd_refine(f1, f2, cfg, out);
    if (*equiv) return detail::cmd_equiv(f1, f2, cfg, out);
    if (*eq_check) return detail::cmd_eq_check(f1, cfg, out);
    if (*eq_greatest) return detail::cmd_eq_greatest(f1, cfg, out);
    if (*eq_unique) return detail::cmd_eq_unique(f1, cfg, out);
    if (*actl_encode) return detail::cmd_actl_encode(f1, cfg, out);
    if (*actl_check) return detail::cmd_actl_check(f1, f2, cfg, out);
    throw Error(ErrorKind::Usage, "no command given");
  } catch (const Error& e) {
    err << "error:" << kind_name(e.kind()) << ": " << e.what() << "\n";
    return 2;
  } catch (const std::bad_alloc&) {
    err << "error:" << kind_name(ErrorKind::StateBound) << ": out of memory\n";
    return 2;
  }
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const char* env = std::getenv("CLLR_BOUND");
  return run(args, out, err, env ? std::optional<std::string>(env) : std::nullopt);
}

}  // namespace cllr::cli
