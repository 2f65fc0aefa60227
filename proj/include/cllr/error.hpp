#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cllr {

enum class ErrorKind {
  Syntax,
  UnknownAction,
  UnguardedRecursion,
  DuplicateBoundVariable,
  StateBound,
  Precondition,
  AlphabetTooLarge,
  EmptyAlphabet,
  EmptyDisjunction,
  EmptyConjunction,
  Usage,
  Io,
  Disagreement,
};

// Machine-readable kind names; the CLI prints them as "error:<kind>:".
constexpr std::string_view kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Syntax: return "syntax";
    case ErrorKind::UnknownAction: return "unknown-action";
    case ErrorKind::UnguardedRecursion: return "unguarded-recursion";
    case ErrorKind::DuplicateBoundVariable: return "duplicate-bound-variable";
    case ErrorKind::StateBound: return "state-bound";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::AlphabetTooLarge: return "alphabet-too-large";
    case ErrorKind::EmptyAlphabet: return "empty-alphabet";
    case ErrorKind::EmptyDisjunction: return "empty-disjunction";
    case ErrorKind::EmptyConjunction: return "empty-conjunction";
    case ErrorKind::Usage: return "usage";
    case ErrorKind::Io: return "io";
    case ErrorKind::Disagreement: return "checker-disagreement";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, std::vector<std::string> expected,
              const std::string& found)
      : Error(ErrorKind::Syntax, describe(offset, expected, found)),
        offset_(offset),
        expected_(std::move(expected)) {}

  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  static std::string describe(std::size_t offset,
                              const std::vector<std::string>& expected,
                              const std::string& found) {
    std::string msg = "at offset " + std::to_string(offset) + ": expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i > 0) msg += i + 1 == expected.size() ? " or " : ", ";
      msg += expected[i];
    }
    msg += ", found " + (found.empty() ? std::string("end of input") : "'" + found + "'");
    return msg;
  }

  std::size_t offset_;
  std::vector<std::string> expected_;
};

class StateBoundExceeded : public Error {
 public:
  explicit StateBoundExceeded(std::size_t bound)
      : Error(ErrorKind::StateBound,
              "more than " + std::to_string(bound) + " states"),
        bound_(bound) {}

  std::size_t bound() const noexcept { return bound_; }

 private:
  std::size_t bound_;
};

}  // namespace cllr
