// Oracle-backed tests for posets, down-set frames, and nuclei.  The
// enumeration oracle filters every self-map of the carrier, so agreement with
// the fixed-point-set search is meaningful evidence; golden values on the
// 3-element chain frame are frozen by hand computation.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdint>

#include "modal/nuclei.hpp"

using namespace modal::sem;

static FinitePoset chain2() {
  return make_poset({"a", "b"}, {{0, 1}});  // a <= b
}

static FinitePoset antichain2() { return make_poset({"a", "b"}, {}); }

// Frames from every labeled poset with at most n elements.
static std::vector<Frame> frames_up_to(int n) {
  std::vector<Frame> out;
  for (int k = 0; k <= n; ++k)
    for (const FinitePoset& p : all_posets(k)) out.push_back(downset_frame(p));
  return out;
}

TEST_CASE("poset construction closes covers and rejects bad input") {
  FinitePoset p = make_poset({"a", "b", "c"}, {{0, 1}, {1, 2}});
  CHECK(p.leq[0][2]);  // transitivity: a <= c through b
  CHECK_FALSE(p.leq[2][0]);
  CHECK_THROWS_WITH_AS(make_poset({"a", "b"}, {{0, 1}, {1, 0}}),
                       doctest::Contains("antisymmetry"), ModelError);
  CHECK_THROWS_AS(make_poset({"a", "a"}, {}), ModelError);
  CHECK_THROWS_AS(make_poset({"a"}, {{0, 3}}), ModelError);
}

TEST_CASE("poset JSON loader") {
  FinitePoset p = parse_poset(R"({"elements": ["a", "b"], "covers": [["a", "b"]]})");
  CHECK(p.n() == 2);
  CHECK(p.leq[0][1]);
  CHECK_FALSE(p.leq[1][0]);
  CHECK_THROWS_AS(parse_poset("not json"), ModelError);
  CHECK_THROWS_AS(parse_poset(R"({"elements": ["a"], "covers": [["a", "z"]]})"),
                  ModelError);
  CHECK_THROWS_AS(parse_poset(R"({"covers": []})"), ModelError);
}

TEST_CASE("labeled poset counts match the known sequence") {
  CHECK(all_posets(0).size() == 1);
  CHECK(all_posets(1).size() == 1);
  CHECK(all_posets(2).size() == 3);
  CHECK(all_posets(3).size() == 19);
  CHECK(all_posets(4).size() == 219);
  CHECK_THROWS_AS(all_posets(5), ModelError);
}

TEST_CASE("down-set basics and name round-trips") {
  FinitePoset p = chain2();
  CHECK(is_downset(p, 0b00));
  CHECK(is_downset(p, 0b01));   // {a}
  CHECK_FALSE(is_downset(p, 0b10));  // {b} misses a <= b
  CHECK(is_downset(p, 0b11));
  CHECK(principal_downset(p, 1) == 0b11);
  CHECK(downset_name(p, 0b11) == "{a,b}");
  CHECK(downset_name(p, 0) == "{}");
  CHECK(parse_downset(p, "{a,b}") == 0b11);
  CHECK(parse_downset(p, "a") == 0b01);
  CHECK(parse_downset(p, "{}") == 0);
  CHECK(parse_downset(p, "") == 0);
  CHECK_THROWS_AS(parse_downset(p, "b"), ModelError);   // not down-closed
  CHECK_THROWS_AS(parse_downset(p, "zz"), ModelError);  // unknown element
}

TEST_CASE("frame carriers are exactly the down-sets, with sound tables") {
  CHECK(downset_frame(make_poset({}, {})).size() == 1);
  CHECK(downset_frame(chain2()).size() == 3);
  CHECK(downset_frame(antichain2()).size() == 4);

  for (const Frame& f : frames_up_to(4)) {
    // Carrier oracle: every subset, filtered by down-closure.
    std::vector<DownSet> expect;
    for (DownSet s = 0; s < (1ull << f.poset.n()); ++s)
      if (is_downset(f.poset, s)) expect.push_back(s);
    CHECK(f.carrier == expect);
    CHECK(f.carrier[f.bottom] == 0);
    CHECK(f.carrier[f.top] == (1ull << f.poset.n()) - 1);
    CHECK(f.adjunction_ok());
  }
}

TEST_CASE("frame size guards trip instead of sampling") {
  std::vector<std::string> big;
  for (int i = 0; i < 17; ++i) big.push_back("e" + std::to_string(i));
  CHECK_THROWS_WITH_AS(downset_frame(make_poset(big, {})),
                       doctest::Contains("TooLarge"), ModelError);
  // An 11-element antichain has 2048 down-sets, over the carrier cap.
  std::vector<std::string> wide;
  for (int i = 0; i < 11; ++i) wide.push_back("w" + std::to_string(i));
  CHECK_THROWS_WITH_AS(downset_frame(make_poset(wide, {})),
                       doctest::Contains("TooLarge"), ModelError);
  // A 5-element antichain yields 32 down-sets: representable, but past the
  // exhaustive nucleus-search budget.
  Frame f = downset_frame(make_poset({"a", "b", "c", "d", "e"}, {}));
  CHECK_THROWS_AS(enumerate_nuclei(f), ModelError);
}

TEST_CASE("nucleus law checker with witnesses") {
  Frame f = downset_frame(chain2());  // carrier {} < {a} < {a,b}
  CHECK(is_nucleus(f, {0, 1, 2}));
  CHECK(is_nucleus(f, {2, 2, 2}));
  LawWitness w;
  CHECK_FALSE(is_nucleus(f, {1, 2, 2}, &w));  // inflationary but not idempotent
  CHECK(w.law == "idempotent");
  CHECK(w.a == 0);
  CHECK_FALSE(is_nucleus(f, {0, 0, 2}, &w));
  CHECK(w.law == "inflationary");
  CHECK_FALSE(is_nucleus(f, {0, 1}, &w));
  CHECK(w.law == "table arity");
}

TEST_CASE("closure operators strictly contain nuclei") {
  Frame f = downset_frame(antichain2());  // Boolean: {} {a} {b} {a,b}
  // Close {a} up to the top but leave {b} alone: monotone, inflationary,
  // idempotent, yet it breaks j({a} ∧ {b}) = j({a}) ∧ j({b}).
  std::vector<int> t = {0, 3, 2, 3};
  CHECK(is_closure_operator(f, t));
  LawWitness w;
  CHECK_FALSE(is_nucleus(f, t, &w));
  CHECK(w.law == "meet");
  // Conversely every nucleus is a closure operator (checked exhaustively).
  for (const Frame& g : frames_up_to(3))
    for (const Nucleus& j : enumerate_nuclei(g))
      CHECK(is_closure_operator(g, j.table));
}

TEST_CASE("constructor tables on the 3-element chain frame") {
  Frame f = downset_frame(chain2());
  int m = 1;  // the middle element {a}
  CHECK(mk_id(f).table == std::vector<int>{0, 1, 2});
  CHECK(mk_top(f).table == std::vector<int>{2, 2, 2});
  CHECK(mk_open(f, m).table == std::vector<int>{0, 2, 2});
  CHECK(mk_closed(f, m).table == std::vector<int>{1, 1, 2});
  CHECK(mk_dneg(f) == mk_open(f, m));  // double negation is open at the middle
}

TEST_CASE("degenerate constructors: open/closed at top and bottom") {
  for (const Frame& f : frames_up_to(3)) {
    CHECK(mk_open(f, f.top) == mk_id(f));
    CHECK(mk_closed(f, f.top) == mk_top(f));
    CHECK(mk_closed(f, f.bottom) == mk_id(f));
    CHECK(mk_open(f, f.bottom) == mk_top(f));
  }
}

TEST_CASE("enumeration agrees with the all-self-maps oracle (posets <= 3)") {
  for (const Frame& f : frames_up_to(3)) {
    CAPTURE(f.poset.n());
    CAPTURE(f.size());
    std::vector<Nucleus> fast = enumerate_nuclei(f);
    std::vector<Nucleus> slow = enumerate_nuclei_oracle(f);
    REQUIRE(fast.size() == slow.size());
    for (size_t i = 0; i < fast.size(); ++i) CHECK(fast[i] == slow[i]);
  }
}

TEST_CASE("the 3-element chain frame has exactly four nuclei") {
  Frame f = downset_frame(chain2());
  std::vector<Nucleus> ns = enumerate_nuclei(f);
  REQUIRE(ns.size() == 4);
  CHECK(ns[0] == mk_id(f));
  CHECK(ns[1] == mk_open(f, 1));
  CHECK(ns[2] == mk_closed(f, 1));
  CHECK(ns[3] == mk_top(f));
}

TEST_CASE("modality order is inclusion of fixed points = reversed pointwise order") {
  for (const Frame& f : frames_up_to(3)) {
    std::vector<Nucleus> ns = enumerate_nuclei(f);
    for (const Nucleus& j : ns)
      for (const Nucleus& k : ns) {
        bool pointwise_rev = true;
        for (int a = 0; a < f.size(); ++a)
          if (!f.leq(k(a), j(a))) pointwise_rev = false;
        CHECK(modality_leq(f, j, k) == pointwise_rev);
      }
  }
}

TEST_CASE("meet and join of modalities: algebraic identities") {
  for (const Frame& f : frames_up_to(3)) {
    std::vector<Nucleus> ns = enumerate_nuclei(f);
    Nucleus id = mk_id(f);
    for (int p = 0; p < f.size(); ++p)
      for (int q = 0; q < f.size(); ++q) {
        CHECK(modality_meet(f, mk_open(f, p), mk_open(f, q)) ==
              mk_open(f, f.meet(p, q)));
        CHECK(modality_meet(f, mk_closed(f, p), mk_closed(f, q)) ==
              mk_closed(f, f.join(p, q)));
        CHECK(modality_join(f, mk_open(f, p), mk_open(f, q)) ==
              mk_open(f, f.join(p, q)));
        CHECK(modality_join(f, mk_closed(f, p), mk_closed(f, q)) ==
              mk_closed(f, f.meet(p, q)));
      }
    for (const Nucleus& j : ns) {
      CHECK(modality_meet(f, j, id) == j);
      CHECK(modality_join(f, j, id) == id);
    }
    // Complementary open/closed pairs join to the trivial modality.
    for (int q = 0; q < f.size(); ++q)
      CHECK(modality_join(f, mk_open(f, q), mk_closed(f, q)) == id);
  }
}

TEST_CASE("meet and join are the lattice operations for the modality order") {
  for (const Frame& f : frames_up_to(3)) {
    std::vector<Nucleus> ns = enumerate_nuclei(f);
    for (const Nucleus& j : ns)
      for (const Nucleus& k : ns) {
        Nucleus m = modality_meet(f, j, k);
        CHECK(modality_leq(f, m, j));
        CHECK(modality_leq(f, m, k));
        Nucleus s = modality_join(f, j, k);
        CHECK(modality_leq(f, j, s));
        CHECK(modality_leq(f, k, s));
        for (const Nucleus& u : ns) {
          if (modality_leq(f, u, j) && modality_leq(f, u, k))
            CHECK(modality_leq(f, u, m));
          if (modality_leq(f, j, u) && modality_leq(f, k, u))
            CHECK(modality_leq(f, s, u));
        }
      }
  }
}

TEST_CASE("fixed points form a Heyting algebra; double negation gives a Boolean one") {
  for (const Frame& f : frames_up_to(3)) {
    for (const Nucleus& j : enumerate_nuclei(f)) {
      FixedAlgebra alg = fixed_points_algebra(f, j);
      CHECK(alg.heyting_ok);
    }
    CHECK(fixed_points_algebra(f, mk_id(f)).size() == f.size());
    CHECK(fixed_points_algebra(f, mk_top(f)).size() == 1);
    FixedAlgebra dn = fixed_points_algebra(f, mk_dneg(f));
    for (int x = 0; x < dn.size(); ++x) {
      int nx = dn.impl_[x][dn.bottom];
      CHECK(dn.join_[x][nx] == dn.top);  // excluded middle inside Fix(¬¬)
    }
  }
}

TEST_CASE("join distributes over arbitrary meets of nuclei (posets <= 3)") {
  for (const Frame& f : frames_up_to(3)) CHECK(coframe_check(f));
}

TEST_CASE("fracture tautology a = (q∨a)∧(q⇒a) (posets <= 4)") {
  for (const Frame& f : frames_up_to(4))
    for (int q = 0; q < f.size(); ++q) CHECK(fracture_taut(f, q));
}
