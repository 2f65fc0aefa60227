#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cllr/error.hpp"

namespace cllr {

// A transition label: a visible action name or the silent action "tau".
class Action {
 public:
  Action() = default;
  explicit Action(std::string name) : name_(std::move(name)) {}

  static Action tau() { return Action("tau"); }

  const std::string& name() const noexcept { return name_; }
  bool is_tau() const noexcept { return name_ == "tau"; }

  auto operator<=>(const Action&) const = default;

 private:
  std::string name_;
};

inline bool is_action_identifier(std::string_view s) {
  if (s.empty() || !(s[0] >= 'a' && s[0] <= 'z')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
  });
}

inline bool is_variable_identifier(std::string_view s) {
  if (s.empty() || !(s[0] >= 'A' && s[0] <= 'Z')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
           (c >= '0' && c <= '9') || c == '_';
  });
}

// The declared, ordered set of visible actions. Declaration order fixes
// subset enumeration order wherever that matters.
class Alphabet {
 public:
  Alphabet() = default;

  explicit Alphabet(std::vector<std::string> names) {
    for (auto& n : names) add(std::move(n));
  }

  // Parses "a,b,c" (whitespace around names is ignored; empty string = empty alphabet).
  static Alphabet parse(std::string_view text) {
    Alphabet result;
    std::size_t start = 0;
    auto trim = [](std::string_view s) {
      while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
      while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
      return s;
    };
    if (trim(text).empty()) return result;
    while (start <= text.size()) {
      auto comma = text.find(',', start);
      if (comma == std::string_view::npos) comma = text.size();
      result.add(std::string(trim(text.substr(start, comma - start))));
      start = comma + 1;
    }
    return result;
  }

  void add(std::string name) {
    if (name == "tau")
      throw Error(ErrorKind::Usage, "tau cannot be declared in an alphabet");
    if (!is_action_identifier(name))
      throw Error(ErrorKind::Usage, "invalid action name '" + name + "'");
    if (!contains(name)) names_.push_back(std::move(name));
  }

  bool contains(std::string_view name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
  }
  bool contains(const Action& a) const { return contains(a.name()); }

  std::optional<std::size_t> index_of(std::string_view name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names_.begin());
  }

  std::size_t size() const noexcept { return names_.size(); }
  bool empty() const noexcept { return names_.empty(); }
  const std::string& operator[](std::size_t i) const { return names_[i]; }
  Action action(std::size_t i) const { return Action(names_[i]); }

  auto begin() const { return names_.begin(); }
  auto end() const { return names_.end(); }

  // Union preserving this alphabet's order, then the other's.
  Alphabet merged(const Alphabet& other) const {
    Alphabet result = *this;
    for (const auto& n : other) result.add(n);
    return result;
  }

  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (i) out += ',';
      out += names_[i];
    }
    return out;
  }

  bool operator==(const Alphabet&) const = default;

 private:
  std::vector<std::string> names_;
};

}  // namespace cllr
