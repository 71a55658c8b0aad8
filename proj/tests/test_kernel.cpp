#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <string>
#include <vector>

#include "modal/kernel.hpp"
#include "modal/parser.hpp"
#include "modal/printer.hpp"
#include "modal/term.hpp"

using namespace modal::tt;
namespace b = modal::tt::build;

namespace {

Term pt(const std::string& s) { return parse_term(s); }

// The localization of Unit at the single family with empty domains:
// one index point, B = Empty, C = Unit, G the vacuous map.
const char* kJZeroSource = R"(
def gz : (a : Unit) -> Empty -> Unit := fun a => fun e => absurd(fun x => Unit, e)
def jzu : Type := JType(Unit, fun a => Empty, fun a => Unit, gz, Unit)
def point : jzu := alpha(star)
def elim : (z : jzu) -> Unit :=
  fun z => jind(fun w => Unit,
                fun x => star,
                fun a => fun f => fun f2 => fun c => star,
                fun a => fun f => fun f2 => fun e =>
                  absurd(fun x => Id(Unit,
                                     J(fun y => fun q => Unit, star, f e,
                                       (isext(a, f, e) : Id(jzu, ext(a, f, gz a e), f e))),
                                     f2 e),
                         e),
                z)
def comp : Id(Unit, elim point, star) := refl(star)
)";

// A pushout of Unit <- Unit -> Unit along identities, with an eliminator
// whose glue branch is proved by path induction over the glue path.
const char* kPushSource = R"(
def p1 : Type := Push(Unit, Unit, Unit, fun a => a, fun a => a)
def glue1 : (a : Unit) ->
            Id(Unit,
               J(fun y => fun q => Unit, star, pinr(a),
                 (pglue(a) : Id(p1, pinl(a), pinr(a)))),
               star) :=
  fun a => J(fun y => fun q => Id(Unit, J(fun y2 => fun q2 => Unit, star, y, q), star),
             refl(star), pinr(a),
             (pglue(a) : Id(p1, pinl(a), pinr(a))))
def melim : (w : p1) -> Unit :=
  fun w => pind(fun v => Unit, fun bb => star, fun cc => star, glue1, w)
def mcomp : Id(Unit, melim (pinl(star)), star) := refl(star)
def pbeta : Id(Id(Unit,
                  J(fun y => fun q => Unit, star, pinr(star),
                    (pglue(star) : Id(p1, pinl(star), pinr(star)))),
                  star),
               J(fun y => fun q =>
                   Id(Unit,
                      J(fun y2 => fun q2 => Unit, star, y, q),
                      pind(fun v => Unit, fun bb => star, fun cc => star, glue1, y)),
                 refl(star), pinr(star),
                 (pglue(star) : Id(p1, pinl(star), pinr(star)))),
               glue1 star) :=
  pglue-beta p1 (fun v => Unit) (fun bb => star) (fun cc => star) glue1 star
)";

// Large elimination: a family over Unit + Unit defined by cases.
const char* kFamSource = R"(
def two : Type := Sum Unit Unit
def fam : two -> Type := fun s => case(Type, fun u => Unit, fun u => Empty, s)
def u2 : fam (inl(star)) := star
def noleft : fam (inr(star)) -> Empty := fun v => v
def stuckfam : (s : two) -> fam s -> fam s := fun s => fun v => v
)";

FileCheckResult must_check(const char* src) {
  FileCheckResult r = check_file(parse(src));
  CAPTURE(r.message);
  REQUIRE(r.ok);
  return r;
}

}  // namespace

TEST_CASE("inference on core forms") {
  Context empty;
  SUBCASE("annotated identity") {
    Term t = pt("((fun x => x : Unit -> Unit))");
    CHECK(term_eq(infer(empty, t), pt("Unit -> Unit")));
  }
  SUBCASE("star") { CHECK(term_eq(infer(empty, b::star()), b::unit())); }
  SUBCASE("variables read their context entry") {
    Context ctx = {pt("Unit -> Unit")};
    CHECK(term_eq(infer(ctx, b::var(0)), pt("Unit -> Unit")));
  }
  SUBCASE("alpha at the localization of Unit") {
    std::string jz =
        "JType(Unit, fun a => Empty, fun a => Unit, "
        "fun a => fun e => absurd(fun x => Unit, e), Unit)";
    Term t = pt("((alpha(star) : " + jz + "))");
    CHECK(term_eq(infer(empty, t), pt(jz)));
  }
}

TEST_CASE("checking against expected types") {
  Context empty;
  CHECK_NOTHROW(check(empty, pt("fun x => x"), pt("Unit -> Unit")));
  CHECK_NOTHROW(check(empty, pt("(star, star)"), pt("Unit * Unit")));
  CHECK_NOTHROW(check(empty, pt("refl(star)"), pt("Id(Unit, star, star)")));
  CHECK_NOTHROW(check(empty, pt("funext (fun x => refl(x))"),
                      pt("Id(Unit -> Unit, fun x => x, fun y => y)")));
}

TEST_CASE("error taxonomy") {
  Context empty;
  auto kind_of = [&](auto thunk) {
    try {
      thunk();
    } catch (const TypeError& e) {
      return e.kind;
    }
    FAIL("expected a TypeError");
    return TypeError::Kind::Mismatch;
  };
  CHECK(kind_of([&] { infer(empty, b::app(b::star(), b::star())); }) ==
        TypeError::Kind::NotAFunction);
  CHECK(kind_of([&] { infer(empty, b::fst(b::star())); }) == TypeError::Kind::NotAPair);
  CHECK(kind_of([&] { infer(empty, b::var(0)); }) == TypeError::Kind::UnboundVariable);
  CHECK(kind_of([&] { check(empty, b::star(), b::empty()); }) == TypeError::Kind::Mismatch);
  CHECK(kind_of([&] {
          check(empty, pt("refl(inl(star))"),
                pt("Id(Sum Unit Unit, inl(star), inr(star))"));
        }) == TypeError::Kind::Mismatch);

  SUBCASE("ill-formed family parameters") {
    FileCheckResult r = check_file(
        parse("def bad : Type := JType(Unit, star, fun a => Unit, fun a => fun e => star, "
              "Unit)"));
    CHECK_FALSE(r.ok);
    CHECK(r.message.find("IllFormedFamily") != std::string::npos);
    CHECK(r.failed_def == "bad");
  }
  SUBCASE("coherence branch off the required boundary") {
    std::string src(kJZeroSource);
    // Replace the vacuous coherence branch with a plainly wrong one.
    FileCheckResult r = check_file(parse(
        "def gz : (a : Unit) -> Empty -> Unit := fun a => fun e => absurd(fun x => Unit, e)\n"
        "def jzu : Type := JType(Unit, fun a => Empty, fun a => Unit, gz, Unit)\n"
        "def elim : (z : jzu) -> Unit :=\n"
        "  fun z => jind(fun w => Unit, fun x => star,\n"
        "                fun a => fun f => fun f2 => fun c => star,\n"
        "                fun a => fun f => fun f2 => fun e => star,\n"
        "                z)"));
    CHECK_FALSE(r.ok);
    CHECK(r.message.find("BoundaryMismatch") != std::string::npos);
  }
  SUBCASE("pushout glue branch off the boundary") {
    FileCheckResult r = check_file(parse(
        "def p1 : Type := Push(Unit, Unit, Unit, fun a => a, fun a => a)\n"
        "def bad : (w : p1) -> Unit :=\n"
        "  fun w => pind(fun v => Unit, fun bb => star, fun cc => star, fun a => star, w)"));
    CHECK_FALSE(r.ok);
    CHECK(r.message.find("BoundaryMismatch") != std::string::npos);
  }
}

TEST_CASE("definitional equality") {
  Context empty;
  CHECK(defeq(empty, b::star(), b::star(), b::unit()));
  SUBCASE("eta for functions") {
    Context ctx = {pt("Unit -> Unit")};
    CHECK(defeq(ctx, b::lam(b::app(b::var(1), b::var(0))), b::var(0),
                pt("Unit -> Unit")));
  }
  SUBCASE("eta for pairs") {
    Context ctx = {pt("Unit * Unit")};
    CHECK(defeq(ctx, b::pair(b::fst(b::var(0)), b::snd(b::var(0))), b::var(0),
                pt("Unit * Unit")));
  }
  SUBCASE("no eta for Unit") {
    Context ctx = {pt("Unit")};
    CHECK_FALSE(defeq(ctx, b::var(0), b::star(), b::unit()));
  }
}

TEST_CASE("computation rules") {
  Context empty;
  SUBCASE("J on refl") {
    Term t = pt("J(fun y => fun q => Unit, star, star, refl(star))");
    CHECK(term_eq(normalize(empty, t, b::unit()), b::star()));
  }
  SUBCASE("case on injections") {
    Term t = pt("case(fun s => Unit, fun u => u, fun u => star, "
                "((inl(star) : Sum Unit Unit)))");
    CHECK(term_eq(normalize(empty, t, b::unit()), b::star()));
  }
  SUBCASE("type-level case computes") {
    must_check(kFamSource);
    Term fam = pt("fun s => case(Type, fun u => Unit, fun u => Empty, s)");
    Term at_inl = b::app(b::ann(fam, pt("(Sum Unit Unit) -> Type")),
                         b::inl(b::star()));
    CHECK(term_eq(normalize(empty, at_inl, b::type_kind()), b::unit()));
  }
}

TEST_CASE("localization corpus") {
  SourceFile f = parse(kJZeroSource);
  must_check(kJZeroSource);
  Context empty;

  // The eliminator computes judgmentally on alpha.
  Term elim;
  for (const auto& d : f.defs) {
    if (d.name == "elim") elim = b::ann(d.body, d.classifier);
  }
  REQUIRE(elim);
  Term applied = b::app(elim, b::jalpha(b::star()));
  CHECK(defeq(empty, applied, b::star(), b::unit()));
  CHECK(term_eq(normalize(empty, applied, b::unit()), b::star()));

  // On a neutral scrutinee it stays stuck but remains well-typed.
  Term stuck = normalize(empty, elim, pt("(z : "
      "JType(Unit, fun a => Empty, fun a => Unit, "
      "fun a => fun e => absurd(fun x => Unit, e), Unit)) -> Unit"));
  CHECK(print_term(stuck).find("jind") != std::string::npos);
}

TEST_CASE("pushout corpus with glue and its computation axiom") {
  must_check(kPushSource);
  Context empty;
  Term melim = pt(
      "((fun w => pind(fun v => Unit, fun bb => star, fun cc => star,"
      " fun a => J(fun y => fun q => Id(Unit, J(fun y2 => fun q2 => Unit, star, y, q),"
      " star), refl(star), pinr(a), (pglue(a) : Id(Push(Unit, Unit, Unit, fun x => x,"
      " fun x => x), pinl(a), pinr(a)))), w)"
      " : (w : Push(Unit, Unit, Unit, fun x => x, fun x => x)) -> Unit))");
  CHECK(term_eq(normalize(empty, b::app(melim, b::pinl(b::star())), b::unit()),
                b::star()));
  CHECK(term_eq(normalize(empty, b::app(melim, b::pinr(b::star())), b::unit()),
                b::star()));
}

TEST_CASE("normalization is idempotent and subject-reducing on the corpora") {
  Context empty;
  for (const char* src : {kJZeroSource, kPushSource, kFamSource}) {
    SourceFile f = parse(src);
    for (const auto& d : f.defs) {
      CAPTURE(d.name);
      Term n = normalize(empty, d.body, d.classifier);
      CHECK_NOTHROW(check(empty, n, d.classifier));
      Term n2 = normalize(empty, n, d.classifier);
      CHECK(term_eq(n, n2));
      // Normal forms are printable and re-parseable.
      CHECK(term_eq(parse_term(print_term(n)), n));
    }
  }
}
