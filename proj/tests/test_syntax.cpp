#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <vector>

#include "modal/parser.hpp"
#include "modal/printer.hpp"
#include "modal/term.hpp"

using namespace modal::tt;
namespace b = modal::tt::build;

static void round_trips(const Term& t) {
  std::string s = print_term(t);
  CAPTURE(s);
  Term back = parse_term(s);
  CHECK(term_eq(t, back));
}

TEST_CASE("definition parsing") {
  SUBCASE("identity function") {
    SourceFile f = parse("def id : Unit -> Unit := fun x => x");
    REQUIRE(f.defs.size() == 1);
    CHECK(f.defs[0].name == "id");
    CHECK(term_eq(f.defs[0].body, b::lam(b::var(0))));
    CHECK(term_eq(f.defs[0].classifier, b::pi(b::unit(), b::unit())));
  }
  SUBCASE("truncated body") {
    CHECK_THROWS_WITH_AS(parse("def bad := fun x =>"),
                         doctest::Contains("end of input"), SyntaxError);
  }
  SUBCASE("unbound identifier") {
    CHECK_THROWS_AS(parse("def f : Unit := mystery"), ScopeError);
  }
  SUBCASE("duplicate names") {
    CHECK_THROWS_AS(parse("def a : Unit := star\ndef a : Unit := star"), DuplicateName);
  }
  SUBCASE("later definitions see earlier ones as closed terms") {
    SourceFile f = parse("def u : Unit := star\ndef v : Unit := u");
    REQUIRE(f.defs.size() == 2);
    CHECK(term_eq(f.defs[1].body, b::ann(b::star(), b::unit())));
  }
  SUBCASE("comments and layout are ignored") {
    SourceFile f = parse("# a comment\ndef u : Unit\n  := star  # trailing\n");
    REQUIRE(f.defs.size() == 1);
    CHECK(f.defs[0].line == 2);
  }
}

TEST_CASE("printer goldens") {
  CHECK(print_term(b::lam(b::var(0))) == "fun x0 => x0");
  CHECK(print_term(b::jalpha(b::star())) == "alpha(star)");
  CHECK(print_term(b::pi(b::unit(), b::unit())) == "Unit -> Unit");
  CHECK(print_term(b::pi(b::unit(), b::id(b::unit(), b::var(0), b::var(0)))) ==
        "(x0 : Unit) -> Id(Unit, x0, x0)");
  CHECK(print_term(b::type_kind()) == "Type");
}

TEST_CASE("surface sugar") {
  SUBCASE("star product is a non-dependent Sigma") {
    CHECK(term_eq(parse_term("Unit * Unit"), b::sigma(b::unit(), b::unit())));
  }
  SUBCASE("keyword forms accept commas or juxtaposed atoms") {
    Term commas = parse_term("Id(Unit, star, star)");
    Term spaces = parse_term("Id Unit star star");
    CHECK(term_eq(commas, spaces));
  }
  SUBCASE("annotation vs dependent arrow") {
    CHECK(term_eq(parse_term("((star : Unit))"), b::ann(b::star(), b::unit())));
    Term dep = parse_term("(x : Unit) -> Unit");
    CHECK(term_eq(dep, b::pi(b::unit(), b::unit())));
  }
}

TEST_CASE("round-trip on one term per constructor") {
  std::vector<Term> pinned = {
      b::lam(b::var(0)),
      b::pi(b::unit(), b::id(b::unit(), b::var(0), b::var(0))),
      b::lam(b::app(b::var(0), b::star())),
      b::sigma(b::unit(), b::sum(b::var(0), b::unit())),
      b::pair(b::star(), b::star()),
      b::fst(b::pair(b::star(), b::star())),
      b::snd(b::pair(b::star(), b::star())),
      b::id(b::unit(), b::star(), b::star()),
      b::refl(b::star()),
      b::j(b::lam(b::lam(b::unit())), b::star(), b::star(), b::refl(b::star())),
      b::unit(),
      b::star(),
      b::empty(),
      b::lam(b::absurd(b::lam(b::unit()), b::var(0))),
      b::sum(b::unit(), b::empty()),
      b::inl(b::star()),
      b::inr(b::star()),
      b::case_(b::lam(b::unit()), b::lam(b::star()), b::lam(b::star()),
               b::inl(b::star())),
      b::push(b::unit(), b::unit(), b::unit(), b::lam(b::var(0)), b::lam(b::var(0))),
      b::pinl(b::star()),
      b::pinr(b::star()),
      b::pglue(b::star()),
      b::pind(b::lam(b::unit()), b::lam(b::star()), b::lam(b::star()),
              b::lam(b::refl(b::star())), b::pinl(b::star())),
      b::jt(b::unit(), b::lam(b::empty()), b::lam(b::unit()),
            b::lam(b::lam(b::absurd(b::lam(b::unit()), b::var(0)))), b::unit()),
      b::jalpha(b::star()),
      b::jext(b::star(), b::lam(b::jalpha(b::var(0))), b::star()),
      b::jisext(b::star(), b::lam(b::jalpha(b::var(0))), b::star()),
      b::jind(b::lam(b::unit()), b::lam(b::star()), b::lam(b::star()),
              b::lam(b::star()), b::jalpha(b::star())),
      b::ann(b::app(b::constant("funext"), b::lam(b::refl(b::star()))),
             b::id(b::pi(b::unit(), b::unit()), b::lam(b::var(0)), b::lam(b::var(0)))),
      b::app(b::constant("pglue-beta"), b::star()),
      b::ann(b::star(), b::unit()),
      b::pi(b::unit(), b::type_kind()),
  };
  for (const Term& t : pinned) round_trips(t);
}

// Random well-scoped (not necessarily well-typed) terms; printing then
// parsing must reproduce them exactly.
namespace {

Term random_term(std::mt19937& rng, int depth, int fuel) {
  auto pick = [&](int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
  if (fuel <= 0) {
    switch (pick(depth > 0 ? 5 : 4)) {
      case 0: return b::star();
      case 1: return b::unit();
      case 2: return b::empty();
      case 3: return b::type_kind();
      default: return b::var(pick(depth));
    }
  }
  auto sub = [&](int d) { return random_term(rng, depth + d, fuel - 1 - pick(2)); };
  switch (pick(24)) {
    case 0: return b::pi(sub(0), sub(1));
    case 1: return b::lam(sub(1));
    case 2: return b::app(sub(0), sub(0));
    case 3: return b::sigma(sub(0), sub(1));
    case 4: return b::pair(sub(0), sub(0));
    case 5: return b::fst(sub(0));
    case 6: return b::snd(sub(0));
    case 7: return b::id(sub(0), sub(0), sub(0));
    case 8: return b::refl(sub(0));
    case 9: return b::j(sub(0), sub(0), sub(0), sub(0));
    case 10: return b::absurd(sub(0), sub(0));
    case 11: return b::sum(sub(0), sub(0));
    case 12: return b::inl(sub(0));
    case 13: return b::inr(sub(0));
    case 14: return b::case_(sub(0), sub(0), sub(0), sub(0));
    case 15: return b::push(sub(0), sub(0), sub(0), sub(0), sub(0));
    case 16: return b::pinl(sub(0));
    case 17: return b::pinr(sub(0));
    case 18: return b::pglue(sub(0));
    case 19: return b::pind(sub(0), sub(0), sub(0), sub(0), sub(0));
    case 20: return b::jt(sub(0), sub(0), sub(0), sub(0), sub(0));
    case 21: return b::jalpha(sub(0));
    case 22: return b::jext(sub(0), sub(0), sub(0));
    default: return b::ann(sub(0), sub(0));
  }
}

}  // namespace

TEST_CASE("round-trip on random well-scoped terms") {
  std::mt19937 rng(20260825);
  for (int i = 0; i < 500; ++i) {
    Term t = random_term(rng, 0, 5);
    round_trips(t);
  }
}

TEST_CASE("located errors") {
  try {
    parse("def f : Unit :=\n  fun x => (");
    FAIL("expected a SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.line == 2);
    CHECK(e.kind == "SyntaxError");
  }
  try {
    parse_term("fun x => y");
    FAIL("expected a ScopeError");
  } catch (const ScopeError& e) {
    CHECK(e.detail.find("y") != std::string::npos);
  }
}
