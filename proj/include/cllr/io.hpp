#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cllr/actl.hpp"
#include "cllr/equations.hpp"
#include "cllr/refinement.hpp"
#include "cllr/semantics.hpp"

namespace cllr {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Input files: an optional "alphabet a,b" header line, then a term or
// formula. '#' comments are allowed anywhere.
// ---------------------------------------------------------------------------

struct SourceText {
  std::optional<Alphabet> alphabet;
  std::string body;
};

inline SourceText split_header(std::string_view text) {
  SourceText out;
  out.body = std::string(text);
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t eol = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, eol - pos);
    std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || line[first] == '#') {
      pos = eol + 1;
      continue;
    }
    line.remove_prefix(first);
    if (line.substr(0, 8) == "alphabet" && (line.size() == 8 || line[8] == ' ' || line[8] == '\t')) {
      out.alphabet = Alphabet::parse(line.substr(8));
      // Blank the header so parse offsets still point into the file.
      std::fill(out.body.begin() + static_cast<std::ptrdiff_t>(pos),
                out.body.begin() + static_cast<std::ptrdiff_t>(eol), ' ');
    }
    break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Graphs.
// ---------------------------------------------------------------------------

inline json lts_to_json(const Lts& lts) {
  json j;
  j["alphabet"] = json::array();
  for (const auto& a : lts.alphabet()) j["alphabet"].push_back(a);
  j["initial"] = lts.initial();
  j["states"] = json::array();
  for (StateId s = 0; s < lts.size(); ++s) {
    const auto& st = lts.state(s);
    j["states"].push_back({{"id", s},
                           {"term", st.key},
                           {"stable", st.stable},
                           {"inconsistent", st.inconsistent},
                           {"reachable", st.reachable}});
  }
  j["transitions"] = json::array();
  for (const auto& t : lts.transitions())
    j["transitions"].push_back({{"from", t.from}, {"label", t.label.name()}, {"to", t.to}});
  return j;
}

namespace detail {

inline std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace detail

// Inconsistent states are double circles filled grey, tau-edges dashed, and
// component states outside the reachable part sit in their own cluster.
inline std::string lts_to_dot(const Lts& lts) {
  std::ostringstream os;
  os << "digraph lts {\n  rankdir=LR;\n  node [shape=circle];\n";
  os << "  init [shape=point];\n  init -> s" << lts.initial() << ";\n";
  auto node = [&](StateId s, const char* indent) {
    const auto& st = lts.state(s);
    os << indent << "s" << s << " [label=\"" << s << "\", tooltip=\"" << detail::dot_escape(st.key)
       << "\"";
    if (st.inconsistent) os << ", shape=doublecircle, style=filled, fillcolor=lightgrey";
    os << "];\n";
  };
  bool any_hidden = false;
  for (StateId s = 0; s < lts.size(); ++s) {
    if (lts.state(s).reachable)
      node(s, "  ");
    else
      any_hidden = true;
  }
  if (any_hidden) {
    os << "  subgraph cluster_components {\n    label=\"components\";\n    style=dotted;\n";
    for (StateId s = 0; s < lts.size(); ++s)
      if (!lts.state(s).reachable) node(s, "    ");
    os << "  }\n";
  }
  for (const auto& t : lts.transitions()) {
    os << "  s" << t.from << " -> s" << t.to << " [label=\"" << t.label.name() << "\"";
    if (t.label.is_tau()) os << ", style=dashed";
    os << "];\n";
  }
  os << "}\n";
  return os.str();
}

inline std::string lts_to_text(const Lts& lts) {
  std::ostringstream os;
  os << "states " << lts.size() << " (reachable " << lts.reachable_count() << "), transitions "
     << lts.transitions().size() << ", initial " << lts.initial() << "\n";
  for (StateId s = 0; s < lts.size(); ++s) {
    const auto& st = lts.state(s);
    os << s << (st.stable ? "" : " ~") << (st.inconsistent ? " F" : "")
       << (st.reachable ? "" : " (component)") << "  " << st.key << "\n";
  }
  for (const auto& t : lts.transitions())
    os << t.from << " -" << t.label.name() << "-> " << t.to << "\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Verdicts and reports.
// ---------------------------------------------------------------------------

inline json verdict_to_json(const RefinementVerdict& v) {
  json j;
  j["holds"] = v.holds;
  if (v.witness) {
    j["witness"] = json::array();
    for (const auto& [l, r] : v.witness->pairs) j["witness"].push_back({l, r});
  }
  if (v.counterexample) {
    json trace = json::array();
    for (const auto& step : v.counterexample->trace)
      trace.push_back({{"left", step.left},
                       {"right", step.right},
                       {"left_term", step.left_term},
                       {"right_term", step.right_term},
                       {"clause", to_string(step.clause)}});
    j["counterexample"] = {{"trace", trace}, {"clause", to_string(v.counterexample->clause)}};
  }
  return j;
}

inline std::string verdict_to_text(const RefinementVerdict& v) {
  std::ostringstream os;
  if (v.holds) {
    os << "holds (witness of " << v.witness->pairs.size() << " pairs)\n";
    return os.str();
  }
  os << "fails: " << to_string(v.counterexample->clause) << "\n";
  for (const auto& step : v.counterexample->trace)
    os << "  " << step.left_term << "  vs  " << step.right_term << "  [" << to_string(step.clause)
       << "]\n";
  return os.str();
}

inline json report_to_json(const SolutionReport& r) {
  json j{{"candidate", to_string(r.candidate)},
         {"is_solution", r.is_solution},
         {"is_consistent", r.is_consistent}};
  j["refines_canonical"] = r.refines_canonical ? json(*r.refines_canonical) : json(nullptr);
  return j;
}

inline std::string reports_to_text(const std::vector<SolutionReport>& reports) {
  std::ostringstream os;
  auto yn = [](bool b) { return b ? "yes" : "no"; };
  for (const auto& r : reports) {
    os << to_string(r.candidate) << "\n  solution " << yn(r.is_solution) << ", consistent "
       << yn(r.is_consistent) << ", refines canonical "
       << (r.refines_canonical ? yn(*r.refines_canonical) : "n/a") << "\n";
  }
  return os.str();
}

}  // namespace cllr
