// End-to-end coverage of the .mtt library shipped under stdlib/: the files
// parse with frozen definition counts, every definition checks, printing is
// stable under re-parsing, normalization is idempotent and type-preserving,
// and the eliminators' computation rules hold as definitional equalities on
// concrete instances.  The deliberately broken copies under tests/mutations/
// must each fail with a type mismatch located at the corrupted definition.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <sstream>
#include <string>

#include "modal/kernel.hpp"
#include "modal/parser.hpp"
#include "modal/printer.hpp"
#include "modal/term.hpp"

using namespace modal::tt;
namespace b = modal::tt::build;

static std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE_MESSAGE(in.good(), "cannot open " << path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

static SourceFile load(const char* dir, const std::string& stem) {
  return parse(slurp(std::string(MODAL_SOURCE_DIR) + "/" + dir + "/" + stem + ".mtt"));
}

static const Definition& find_def(const SourceFile& sf, const std::string& name) {
  for (const Definition& d : sf.defs)
    if (d.name == name) return d;
  REQUIRE_MESSAGE(false, "no definition named " << name);
  static Definition dummy;
  return dummy;
}

// A checked definition, spliced into a term as the parser would splice it.
static Term ref(const SourceFile& sf, const std::string& name) {
  const Definition& d = find_def(sf, name);
  return b::ann(d.body, d.classifier);
}

struct CorpusFile {
  const char* stem;
  int defs;
};

static const CorpusFile kCorpus[] = {
    {"prelude", 20},
    {"pathsplit", 13},
    {"dneg", 9},
    {"localize", 21},
};

TEST_CASE("library files parse with frozen definition counts and check") {
  for (const CorpusFile& f : kCorpus) {
    CAPTURE(f.stem);
    SourceFile sf = load("stdlib", f.stem);
    CHECK(static_cast<int>(sf.defs.size()) == f.defs);
    FileCheckResult r = check_file(sf);
    CHECK_MESSAGE(r.ok, r.message);
    CHECK(r.message == "ok (" + std::to_string(f.defs) + " definitions)");
  }
}

TEST_CASE("printing a library term re-parses to the same print") {
  for (const CorpusFile& f : kCorpus) {
    SourceFile sf = load("stdlib", f.stem);
    for (const Definition& d : sf.defs) {
      CAPTURE(f.stem);
      CAPTURE(d.name);
      for (const Term* t : {&d.classifier, &d.body}) {
        std::string s1 = print_term(*t);
        Term back = parse_term(s1);
        CHECK(print_term(back) == s1);
      }
    }
  }
}

TEST_CASE("normalization is idempotent and type-preserving on the library") {
  for (const CorpusFile& f : kCorpus) {
    SourceFile sf = load("stdlib", f.stem);
    for (const Definition& d : sf.defs) {
      CAPTURE(f.stem);
      CAPTURE(d.name);
      Term n1 = normalize({}, d.body, d.classifier);
      CHECK_NOTHROW(check({}, n1, d.classifier));  // subject reduction
      Term n2 = normalize({}, n1, d.classifier);
      CHECK(term_eq(n2, n1));                      // idempotence
      CHECK(defeq({}, d.body, n1, d.classifier));  // soundness of readback
    }
  }
}

TEST_CASE("each mutated library file fails with a located type mismatch") {
  struct Mutation {
    const char* stem;
    const char* def;
    int line;
  };
  static const Mutation kMutations[] = {
      {"prelude", "tt", 10},
      {"pathsplit", "pathsplit-to-isequiv", 41},
      {"dneg", "eta", 14},
      {"localize", "jzero-elim-alpha", 80},
  };
  for (const Mutation& m : kMutations) {
    CAPTURE(m.stem);
    SourceFile sf = load("tests/mutations", m.stem);
    FileCheckResult r = check_file(sf);
    CHECK_FALSE(r.ok);
    CHECK(r.failed_def == m.def);
    CHECK(r.line == m.line);
    CHECK(r.message.find("Mismatch") != std::string::npos);
  }
}

TEST_CASE("the nullification eliminator computes on alpha and only on alpha") {
  SourceFile sf = load("stdlib", "localize");
  Term twoTy = find_def(sf, "two").body;  // Sum(Unit, Unit)
  Term tt = find_def(sf, "tt").body;

  // On points: elim (alpha tt) is definitionally the point branch at tt.
  Term onPoint = b::app(ref(sf, "jzero-elim"), ref(sf, "jzero-point"));
  CHECK(defeq({}, onPoint, tt, twoTy));

  // On adjoined extensions the eliminator is stuck: the value at an ext
  // point is pinned down propositionally (by the isext path), never
  // definitionally, so this must not be a judgmental equality.
  Term onExt = b::app(ref(sf, "jzero-elim"), ref(sf, "jzero-ext-point"));
  CHECK_FALSE(defeq({}, onExt, tt, twoTy));

  // The in-language statement of the point rule is refl-checkable too.
  const Definition& law = find_def(sf, "jzero-elim-alpha");
  CHECK_NOTHROW(check({}, law.body, law.classifier));
}

TEST_CASE("pushout induction computes on both point constructors") {
  SourceFile sf = load("stdlib", "localize");
  Term elim = ref(sf, "ielim");
  Term interval = find_def(sf, "interval").body;
  Term left = b::ann(b::pinl(b::star()), interval);
  Term right = b::ann(b::pinr(b::star()), interval);
  CHECK(defeq({}, b::app(elim, left), b::star(), b::unit()));
  CHECK(defeq({}, b::app(elim, right), b::star(), b::unit()));
}

TEST_CASE("large elimination computes: the two-valued discriminator") {
  SourceFile sf = load("stdlib", "prelude");
  Term istt = ref(sf, "istt");
  Term tt = find_def(sf, "tt").body;
  Term ff = find_def(sf, "ff").body;
  CHECK(defeq({}, b::app(istt, tt), b::unit(), b::type_kind()));
  CHECK(defeq({}, b::app(istt, ff), b::empty(), b::type_kind()));
}
