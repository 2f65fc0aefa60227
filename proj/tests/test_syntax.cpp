#include <catch_amalgamated.hpp>

#include <functional>
#include <map>

#include "cllr/cllr.hpp"
#include "support/generators.hpp"

using namespace cllr;

namespace {

Term a_loop(const std::string& v = "X", const std::string& act = "a") {
  return Term::rec(v, {Binding{v, Term::prefix(Action(act), Term::var(v))}});
}

// Renames every binder with `rename`, consistently with its occurrences.
Term rename_bound(const Term& t, const std::function<std::string(const std::string&)>& rename,
                  std::map<std::string, std::string> env = {}) {
  switch (t.kind()) {
    case TermKind::Nil:
    case TermKind::Bot: return t;
    case TermKind::Var: {
      auto it = env.find(t.name());
      return it == env.end() ? t : Term::var(it->second);
    }
    case TermKind::Prefix: return Term::prefix(t.action(), rename_bound(t.body(), rename, env));
    case TermKind::Choice:
      return Term::choice(rename_bound(t.left(), rename, env), rename_bound(t.right(), rename, env));
    case TermKind::Conj:
      return Term::conj(rename_bound(t.left(), rename, env), rename_bound(t.right(), rename, env));
    case TermKind::Disj:
      return Term::disj(rename_bound(t.left(), rename, env), rename_bound(t.right(), rename, env));
    case TermKind::Par:
      return Term::par(t.sync(), rename_bound(t.left(), rename, env),
                       rename_bound(t.right(), rename, env));
    case TermKind::Rec: {
      for (const auto& b : t.bindings()) env[b.var] = rename(b.var);
      std::vector<Binding> bs;
      for (const auto& b : t.bindings()) bs.push_back({env[b.var], rename_bound(b.body, rename, env)});
      return Term::rec(env[t.name()], std::move(bs));
    }
  }
  return t;
}

}  // namespace

TEST_CASE("parse builds the expected trees", "[syntax]") {
  CHECK(parse_term("a.0") == Term::prefix(Action("a"), Term::nil()));
  CHECK(parse_term("<X | X = a.X>") == a_loop());
  CHECK(parse_term("bot") == Term::bot());
  CHECK(parse_term("tau.0") == Term::prefix(Action::tau(), Term::nil()));
  CHECK(parse_term("a.0 |[a, b]| b.0") ==
        Term::par({Action("a"), Action("b")}, parse_term("a.0"), parse_term("b.0")));
  CHECK(parse_term("a.0 |[]| b.0").sync().empty());
}

TEST_CASE("operator precedence and associativity", "[syntax]") {
  Term t = parse_term("a.0 /\\ b.0 \\/ c.0 [] d.0 |[a]| e.0");
  REQUIRE(t.kind() == TermKind::Par);
  REQUIRE(t.left().kind() == TermKind::Choice);
  REQUIRE(t.left().left().kind() == TermKind::Disj);
  REQUIRE(t.left().left().left().kind() == TermKind::Conj);

  Term chain = parse_term("a.0 [] b.0 [] c.0");
  REQUIRE(chain.left().kind() == TermKind::Choice);
  CHECK(chain.right() == parse_term("c.0"));

  CHECK(parse_term("a.b.0 /\\ c.0").left() == parse_term("a.b.0"));
  CHECK(parse_term("(a.0 [] b.0) /\\ c.0").left().kind() == TermKind::Choice);
}

TEST_CASE("guardedness and binding errors", "[syntax]") {
  auto kind_of = [](const std::string& src) {
    try {
      parse_term(src);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Usage;
  };
  CHECK(kind_of("<X | X = X [] a.0>") == ErrorKind::UnguardedRecursion);
  CHECK(kind_of("<X | X = X>") == ErrorKind::UnguardedRecursion);
  CHECK(kind_of("<X | X = a.Y, Y = Y /\\ b.0>") == ErrorKind::UnguardedRecursion);
  CHECK(kind_of("<X | X = a.X, X = b.X>") == ErrorKind::DuplicateBoundVariable);
  CHECK(kind_of("<X | Y = a.Y>") == ErrorKind::Precondition);
  CHECK(kind_of("a.0 [") == ErrorKind::Syntax);

  // Weak guards are accepted.
  CHECK_NOTHROW(parse_term("<X | X = tau.X>"));
  CHECK_NOTHROW(parse_term("<X | X = X \\/ a.X>"));
}

TEST_CASE("alphabet checks on parse", "[syntax]") {
  Alphabet ab = Alphabet::parse("a,b");
  CHECK_NOTHROW(parse_term("a.b.tau.0", ab));
  try {
    parse_term("a.c.0", ab);
    FAIL("expected an unknown action");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownAction);
  }
  CHECK_THROWS_AS(Alphabet::parse("a,tau"), Error);
}

TEST_CASE("syntax errors report offset and expectations", "[syntax]") {
  try {
    parse_term("a.0 [] (b.0");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.offset() == 11);
    CHECK_THAT(e.expected(), Catch::Matchers::VectorContains(std::string("')'")));
  }
  try {
    parse_term("a b");
    FAIL("expected a syntax error");
  } catch (const SyntaxError& e) {
    CHECK(e.offset() == 2);
  }
}

TEST_CASE("free variables", "[syntax]") {
  CHECK(free_vars(Term::var("X")) == VarSet{"X"});
  CHECK(free_vars(a_loop()).empty());
  Term t = Term::choice(Term::var("X"),
                        Term::rec("Y", {Binding{"Y", Term::prefix(Action("a"), Term::var("X"))}}));
  CHECK(free_vars(t) == VarSet{"X"});
  CHECK(free_vars(Term::rec("X", {Binding{"X", Term::var("Y")}, Binding{"Y", Term::var("Z")}})) ==
        VarSet{"Z"});
}

TEST_CASE("substitution", "[syntax]") {
  CHECK(substitute(Term::var("X"), "X", Term::nil()) == Term::nil());
  CHECK(substitute(a_loop(), "X", Term::nil()) == a_loop());

  // X [] a.<Y | Y = X [] Y>  with X := <X | X = b.X>
  auto inner = [](Term x) {
    return Term::choice(
        x, Term::prefix(Action("a"),
                        Term::rec("Y", {Binding{"Y", Term::choice(x, Term::var("Y"))}})));
  };
  Term rx = a_loop("X", "b");
  CHECK(substitute(inner(Term::var("X")), "X", rx) == inner(rx));

  // Capture avoidance: the replacement's free Y must not be bound.
  Term body = Term::rec("Y", {Binding{"Y", Term::prefix(Action("a"), Term::choice(Term::var("X"), Term::var("Y")))}});
  Term out = substitute(body, "X", Term::var("Y"));
  CHECK(free_vars(out) == VarSet{"Y"});
  CHECK(out.name() != "Y");
}

TEST_CASE("alpha canonical forms", "[syntax]") {
  CHECK(alpha_canon(a_loop("X")) == alpha_canon(a_loop("Y")));
  CHECK(alpha_canon(parse_term("a.0")) == parse_term("a.0"));
  CHECK(alpha_canon(a_loop("X", "a")) != alpha_canon(a_loop("X", "b")));
  CHECK(canonical_key(parse_term("<Q | Q = a.Q> [] <R | R = a.R>")) ==
        canonical_key(parse_term("<X | X = a.X> [] <X | X = a.X>")));
}

TEST_CASE("guard modes", "[syntax]") {
  CHECK(guard_mode(parse_term("a.X"), "X") == GuardMode::Strong);
  CHECK(guard_mode(Term::disj(Term::prefix(Action::tau(), Term::var("X")),
                              Term::prefix(Action("a"), Term::var("X"))),
                   "X") == GuardMode::Weak);
  CHECK(guard_mode(Term::choice(Term::var("X"), Term::prefix(Action("a"), Term::var("X"))), "X") ==
        GuardMode::Unguarded);
  CHECK(guard_mode(Term::prefix(Action::tau(), Term::prefix(Action("a"), Term::var("X"))), "X") ==
        GuardMode::Strong);
  CHECK(guard_mode(parse_term("b.0"), "X") == GuardMode::Strong);
}

TEST_CASE("conjunction scope", "[syntax]") {
  CHECK(conj_scope_free(parse_term("a.X"), "X"));
  CHECK_FALSE(conj_scope_free(
      parse_term("(<Y | Y = a.Y> /\\ a.X) \\/ (<Z | Z = b.Z> /\\ b.X)"), "X"));
  CHECK(conj_scope_free(parse_term("b.0 /\\ a.0"), "X"));
}

TEST_CASE("printing round-trips through the parser", "[syntax]") {
  testing::TermGen gen(11);
  for (int i = 0; i < 400; ++i) {
    Term t = gen.closed(gen.uniform(1, 5));
    INFO(to_string(t));
    CHECK(parse_term(to_string(t)) == t);
  }
  for (int i = 0; i < 200; ++i) {
    Term c = gen.context(gen.uniform(1, 5), "H");
    INFO(to_string(c));
    CHECK(parse_term(to_string(c)) == c);
  }
}

TEST_CASE("identity substitution", "[syntax]") {
  testing::TermGen gen(12);
  for (int i = 0; i < 300; ++i) {
    Term c = gen.context(gen.uniform(1, 5), "H");
    CHECK(substitute(c, "H", Term::var("H")) == c);
    Term t = gen.closed(4);
    CHECK(substitute(t, "X", Term::var("X")) == t);
  }
}

TEST_CASE("alpha canonicalization is idempotent and renaming invariant", "[syntax]") {
  testing::TermGen gen(13);
  int counter = 0;
  auto rename = [&](const std::string&) { return "R" + std::to_string(counter++); };
  for (int i = 0; i < 300; ++i) {
    Term t = gen.closed(gen.uniform(2, 5));
    Term c = alpha_canon(t);
    INFO(to_string(t));
    CHECK(alpha_canon(c) == c);
    CHECK(alpha_canon(rename_bound(t, rename)) == c);
  }
}

TEST_CASE("guard mode of absent variables and validated bindings", "[syntax]") {
  testing::TermGen gen(14);
  std::function<void(const Term&)> each_rec = [&](const Term& t) {
    switch (t.kind()) {
      case TermKind::Rec:
        for (const auto& b : t.bindings()) {
          for (const auto& x : t.bindings()) CHECK(guard_mode(b.body, x.var) != GuardMode::Unguarded);
          each_rec(b.body);
        }
        break;
      case TermKind::Prefix: each_rec(t.body()); break;
      case TermKind::Choice:
      case TermKind::Conj:
      case TermKind::Disj:
      case TermKind::Par:
        each_rec(t.left());
        each_rec(t.right());
        break;
      default: break;
    }
  };
  for (int i = 0; i < 300; ++i) {
    Term t = gen.closed(gen.uniform(1, 5));
    CHECK(guard_mode(t, "Q") == GuardMode::Strong);
    REQUIRE_NOTHROW(validate(t));
    each_rec(t);
  }
}
