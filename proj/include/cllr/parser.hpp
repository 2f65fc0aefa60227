#pragma once

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cllr/action.hpp"
#include "cllr/error.hpp"
#include "cllr/syntax.hpp"
#include "cllr/term.hpp"

namespace cllr {

namespace detail {

enum class Tok {
  End,
  LowerIdent,  // action names, tau, bot and formula keywords
  UpperIdent,  // variables, and the A/W formula operators
  Zero,
  Dot,
  Comma,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Less,
  Greater,
  Bar,
  Equals,
  ChoiceOp,  // []
  ConjOp,    // /\ (backslash)
  DisjOp,    // \/ (backslash)
  ParOpen,   // |[
  ParClose,  // ]|
};

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t offset = 0;
};

// Shared tokenizer for terms and formulas. '#' starts a comment running to
// the end of the line.
inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  auto is_ident = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') ++i;
      continue;
    }
    const std::size_t start = i;
    auto two = [&](std::string_view s) { return src.substr(i, 2) == s; };
    auto push = [&](Tok k, std::size_t len) {
      out.push_back({k, std::string(src.substr(i, len)), start});
      i += len;
    };
    if (two("[]")) push(Tok::ChoiceOp, 2);
    else if (two("/\\")) push(Tok::ConjOp, 2);
    else if (two("\\/")) push(Tok::DisjOp, 2);
    else if (two("|[")) push(Tok::ParOpen, 2);
    else if (two("]|")) push(Tok::ParClose, 2);
    else if (c == '.') push(Tok::Dot, 1);
    else if (c == ',') push(Tok::Comma, 1);
    else if (c == '(') push(Tok::LParen, 1);
    else if (c == ')') push(Tok::RParen, 1);
    else if (c == '[') push(Tok::LBracket, 1);
    else if (c == ']') push(Tok::RBracket, 1);
    else if (c == '<') push(Tok::Less, 1);
    else if (c == '>') push(Tok::Greater, 1);
    else if (c == '|') push(Tok::Bar, 1);
    else if (c == '=') push(Tok::Equals, 1);
    else if (c == '0' && !(i + 1 < src.size() && is_ident(src[i + 1]))) push(Tok::Zero, 1);
    else if (std::islower(static_cast<unsigned char>(c)) || std::isupper(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && is_ident(src[j])) ++j;
      push(std::isupper(static_cast<unsigned char>(c)) ? Tok::UpperIdent : Tok::LowerIdent, j - i);
    } else {
      throw SyntaxError(start, {"a token"}, std::string(1, c));
    }
  }
  out.push_back({Tok::End, "", src.size()});
  return out;
}

class TokenStream {
 public:
  explicit TokenStream(std::string_view src) : toks_(tokenize(src)) {}

  const Token& peek() const { return toks_[pos_]; }
  const Token& peek(std::size_t ahead) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  bool at(Tok k) const { return peek().kind == k; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool accept(Tok k) {
    if (!at(k)) return false;
    next();
    return true;
  }
  const Token& expect(Tok k, const char* what) {
    if (!at(k)) fail({what});
    return next();
  }
  [[noreturn]] void fail(std::vector<std::string> expected) const {
    throw SyntaxError(peek().offset, std::move(expected), peek().text);
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

class TermParser {
 public:
  explicit TermParser(std::string_view src) : ts_(src) {}

  Term parse_all() {
    Term t = parse_par();
    if (!ts_.at(Tok::End)) ts_.fail({"an operator", "end of input"});
    return t;
  }

 private:
  Term parse_par() {
    Term left = parse_choice();
    while (ts_.accept(Tok::ParOpen)) {
      ActionSet sync;
      if (!ts_.at(Tok::ParClose)) {
        do {
          sync.insert(parse_action());
        } while (ts_.accept(Tok::Comma));
      }
      ts_.expect(Tok::ParClose, "']|'");
      left = Term::par(std::move(sync), std::move(left), parse_choice());
    }
    return left;
  }

  Term parse_choice() {
    Term left = parse_disj();
    while (ts_.accept(Tok::ChoiceOp)) left = Term::choice(std::move(left), parse_disj());
    return left;
  }

  Term parse_disj() {
    Term left = parse_conj();
    while (ts_.accept(Tok::DisjOp)) left = Term::disj(std::move(left), parse_conj());
    return left;
  }

  Term parse_conj() {
    Term left = parse_prefix();
    while (ts_.accept(Tok::ConjOp)) left = Term::conj(std::move(left), parse_prefix());
    return left;
  }

  Term parse_prefix() {
    if (ts_.at(Tok::LowerIdent) && ts_.peek().text != "bot") {
      Action a = parse_action();
      ts_.expect(Tok::Dot, "'.'");
      return Term::prefix(std::move(a), parse_prefix());
    }
    return parse_atom();
  }

  Action parse_action() {
    if (!ts_.at(Tok::LowerIdent) || ts_.peek().text == "bot") ts_.fail({"an action"});
    return Action(ts_.next().text);
  }

  Term parse_atom() {
    const Token& t = ts_.peek();
    switch (t.kind) {
      case Tok::Zero: ts_.next(); return Term::nil();
      case Tok::LowerIdent:  // only "bot" reaches here
        ts_.next();
        return Term::bot();
      case Tok::UpperIdent: return Term::var(ts_.next().text);
      case Tok::LParen: {
        ts_.next();
        Term inner = parse_par();
        ts_.expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::Less: {
        ts_.next();
        std::string init = ts_.expect(Tok::UpperIdent, "a variable").text;
        ts_.expect(Tok::Bar, "'|'");
        std::vector<Binding> bindings;
        do {
          std::string v = ts_.expect(Tok::UpperIdent, "a variable").text;
          ts_.expect(Tok::Equals, "'='");
          bindings.push_back({std::move(v), parse_par()});
        } while (ts_.accept(Tok::Comma));
        ts_.expect(Tok::Greater, "'>' or ','");
        return Term::rec(std::move(init), std::move(bindings));
      }
      default:
        ts_.fail({"'0'", "'bot'", "an action prefix", "a variable", "'<'", "'('"});
    }
  }

  TokenStream ts_;
};

}  // namespace detail

// Parses a term in the ASCII grammar and validates it against `alphabet`
// (an empty alphabet accepts any action name).
inline Term parse_term(std::string_view text, const Alphabet& alphabet = {}) {
  detail::TermParser p(text);
  Term t = p.parse_all();
  validate(t, alphabet);
  return t;
}

}  // namespace cllr
