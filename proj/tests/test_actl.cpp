#include <catch_amalgamated.hpp>

#include <functional>

#include "cllr/cllr.hpp"
#include "support/generators.hpp"

using namespace cllr;

namespace {

Term t(const char* src) { return parse_term(src); }

const Alphabet kAB = Alphabet::parse("a,b");
const Alphabet kA = Alphabet::parse("a");

std::size_t count_disjuncts(const Term& x) {
  if (x.kind() != TermKind::Disj) return 1;
  return count_disjuncts(x.left()) + count_disjuncts(x.right());
}

testing::GenConfig ab_config() {
  testing::GenConfig c;
  c.actions = {"a", "b"};
  return c;
}

}  // namespace

TEST_CASE("formula parsing", "[actl]") {
  CHECK(parse_actl("en(a)", kAB) == Formula::en(Action("a")));
  CHECK(parse_actl("[a] dis(b) W ff", kAB) ==
        Formula::weak_until(Formula::box(Action("a"), Formula::dis(Action("b"))), Formula::ff()));
  CHECK(parse_actl("tt \\/ ff /\\ en(b)", kAB) ==
        Formula::lor(Formula::tt(), Formula::land(Formula::ff(), Formula::en(Action("b")))));
  CHECK(parse_actl("A [b] tt", kAB) == Formula::always(Formula::box(Action("b"), Formula::tt())));
  CHECK(parse_actl("tt W ff W tt", kAB).kind() == FormulaKind::WeakUntil);

  try {
    parse_actl("en(c)", kAB);
    FAIL("unknown action accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::UnknownAction);
  }
  try {
    parse_actl("tt", Alphabet{});
    FAIL("empty alphabet accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyAlphabet);
  }
  CHECK_THROWS_AS(parse_actl("en(tau)", kAB), Error);
  CHECK_THROWS_AS(parse_actl("en(a", kAB), SyntaxError);
}

TEST_CASE("formula printing round-trips", "[actl]") {
  testing::TermGen gen(51, ab_config());
  for (int i = 0; i < 300; ++i) {
    Formula f = gen.formula(gen.uniform(1, 4));
    INFO(to_string(f));
    CHECK(parse_actl(to_string(f), kAB) == f);
  }
}

TEST_CASE("general choice, disjunction and conjunction", "[actl]") {
  CHECK(gen_fold(FoldOp::Choice, {}) == Term::nil());
  CHECK(gen_fold(FoldOp::Choice, {t("a.0"), t("b.0"), t("c.0")}) == t("(a.0 [] b.0) [] c.0"));
  CHECK(gen_fold(FoldOp::Disj, {t("a.0")}) == t("a.0"));
  CHECK(gen_fold(FoldOp::Conj, {t("a.0"), t("b.0")}) == t("a.0 /\\ b.0"));
  try {
    gen_fold(FoldOp::Disj, {});
    FAIL("empty disjunction accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyDisjunction);
  }
  try {
    gen_fold(FoldOp::Conj, {});
    FAIL("empty conjunction accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::EmptyConjunction);
  }
}

TEST_CASE("box combinator", "[actl]") {
  CHECK(box_a(Action("a"), Term::nil(), kA) == t("a.0 \\/ 0"));
  CHECK(count_disjuncts(box_a(Action("a"), Term::nil(), kAB)) == 4);
  try {
    box_a(Action("c"), Term::nil(), kAB);
    FAIL("action outside the alphabet accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Precondition);
  }
}

TEST_CASE("encoding examples", "[actl]") {
  CHECK(encode(Formula::ff(), kA) == Term::bot());
  CHECK(encode(Formula::tt(), kA) == t("<X | X = 0 \\/ a.X>"));
  CHECK(encode(Formula::en(Action("a")), kA) == Term::prefix(Action("a"), t("<X | X = 0 \\/ a.X>")));
  CHECK(encode(Formula::tt(), kAB) == t("<X | X = ((0 \\/ a.X) \\/ b.X) \\/ (a.X [] b.X)>"));
  CHECK(encode(Formula::land(Formula::en(Action("a")), Formula::tt()), kAB) ==
        Term::conj(encode(Formula::en(Action("a")), kAB), encode(Formula::tt(), kAB)));

  try {
    encode(Formula::tt(), Alphabet::parse("a,b,c,d,e"));
    FAIL("alphabet above the cap accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::AlphabetTooLarge);
  }
  CHECK_NOTHROW(encode(Formula::tt(), Alphabet::parse("a,b,c,d,e"), 5));
}

TEST_CASE("disjunct counts of enabledness encodings", "[actl]") {
  for (const char* alpha : {"a", "a,b", "a,b,c", "a,b,c,d"}) {
    Alphabet al = Alphabet::parse(alpha);
    const std::size_t expect = std::size_t{1} << (al.size() - 1);
    for (std::size_t i = 0; i < al.size(); ++i) {
      INFO(alpha << " " << al[i]);
      CHECK(count_disjuncts(encode(Formula::en(al.action(i)), al)) == expect);
      CHECK(count_disjuncts(encode(Formula::dis(al.action(i)), al)) == expect);
    }
  }
}

TEST_CASE("encoding is deterministic", "[actl]") {
  testing::TermGen gen(52, ab_config());
  for (int i = 0; i < 100; ++i) {
    Formula f = gen.formula(3);
    CHECK(encode(f, kAB) == encode(parse_actl(to_string(f), kAB), kAB));
  }
}

TEST_CASE("direct satisfaction examples", "[actl]") {
  CHECK(sat_direct(t("0"), Formula::tt(), kA));
  CHECK(sat_direct(t("a.0"), Formula::en(Action("a")), kA));
  CHECK_FALSE(sat_direct(t("0"), Formula::en(Action("a")), kA));
  CHECK(sat_direct(t("bot"), Formula::ff(), kA));
  CHECK(refines(t("bot"), t("bot")).holds);
  CHECK(sat_direct(t("<X | X = a.X>"), Formula::always(Formula::en(Action("a"))), kA));
  CHECK_FALSE(sat_direct(t("a.0"), Formula::always(Formula::en(Action("a"))), kA));
  CHECK(sat_direct(t("a.b.0"), Formula::box(Action("a"), Formula::en(Action("b"))), kAB));
  CHECK(sat_direct(t("b.0"), Formula::box(Action("a"), Formula::ff()), kAB));
  CHECK(sat_direct(t("a.a.b.0"), Formula::weak_until(Formula::en(Action("a")), Formula::en(Action("b"))), kAB));
  CHECK_FALSE(sat_direct(t("a.0"), Formula::weak_until(Formula::en(Action("a")), Formula::en(Action("b"))), kAB));
  CHECK(sat_direct(t("<X | X = a.X>"), Formula::weak_until(Formula::en(Action("a")), Formula::ff()), kA));
}

TEST_CASE("refinement-based satisfaction examples", "[actl]") {
  CHECK(sat_refine(t("a.0"), Formula::en(Action("a")), kA));
  testing::TermGen gen(53, ab_config());
  for (int i = 0; i < 60; ++i) {
    Term p = gen.closed(3);
    Lts lts = build_lts(p);
    const bool f = lts.inconsistent(lts.initial());
    INFO(to_string(p));
    CHECK(sat_refine(p, Formula::ff(), kAB) == f);
    if (!f) CHECK(sat_refine(p, Formula::tt(), kAB));
  }
}

TEST_CASE("the true encoding is consistent", "[actl]") {
  for (const char* alpha : {"a", "a,b", "a,b,c"}) {
    Lts lts = build_lts(encode_tt(Alphabet::parse(alpha)));
    CHECK_FALSE(lts.inconsistent(lts.initial()));
  }
}

TEST_CASE("both checkers agree", "[actl]") {
  testing::TermGen gen(54, ab_config());
  int checked = 0, holds = 0;
  for (int i = 0; i < 80; ++i) {
    Term p = gen.closed(gen.uniform(1, 3));
    Formula f = gen.formula(gen.uniform(1, 2));
    INFO(to_string(p) << "  |=  " << to_string(f));
    try {
      bool d = sat_direct(p, f, kAB, 20000);
      CHECK(d == sat_refine(p, f, kAB, 20000));
      holds += d;
      ++checked;
    } catch (const StateBoundExceeded&) {
    }
  }
  CHECK(checked >= 60);
  CHECK(holds > 10);
  CHECK(holds < checked);
}

TEST_CASE("conjunction is checked componentwise", "[actl]") {
  testing::TermGen gen(55, ab_config());
  int skipped = 0;
  for (int i = 0; i < 40; ++i) {
    Term p = gen.closed(3);
    Formula f = gen.formula(2), g = gen.formula(2);
    Formula both = Formula::land(f, g);
    INFO(to_string(p) << "  |=  " << to_string(both));
    CHECK(sat_direct(p, both, kAB) == (sat_direct(p, f, kAB) && sat_direct(p, g, kAB)));
    bool whole = false, parts = false;
    try {
      whole = sat_refine(p, both, kAB, 20000);
      parts = sat_refine(p, f, kAB, 20000) && sat_refine(p, g, kAB, 20000);
    } catch (const StateBoundExceeded&) {
      ++skipped;
      continue;
    }
    CHECK(whole == parts);
  }
  CHECK(skipped < 20);
}
