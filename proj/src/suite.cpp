#include "modal/suite.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "modal/kernel.hpp"
#include "modal/nuclei.hpp"
#include "modal/parser.hpp"
#include "modal/sheaves.hpp"
#include "modal/term.hpp"

namespace modal {

namespace {

using namespace modal::tt;
using namespace modal::sem;
namespace b = modal::tt::build;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// One criterion's running tally: check count plus the first few failure
// witnesses (everything still counts, so the summary stays honest).
struct Crit {
  long long checks = 0;
  long long failed = 0;
  std::vector<std::string> failures;

  bool ok() const { return failed == 0; }
  void expect(bool cond, const std::string& what) {
    ++checks;
    if (!cond) {
      ++failed;
      if (failures.size() < 6) failures.push_back(what);
    }
  }
};

// Guard sizes for the exhaustive suites; a small MODAL_SUITE_BUDGET shrinks
// them (never silently: the driver prints the note).
struct Guards {
  int fracture_posets = 4;  // criterion 5: posets up to this many elements
  int sheaf_stalks = 3;     // criterion 6: presheaf stalk bound
  int glue_stalks = 3;      // criterion 9: stalk bound on the 2-point poset
  std::string note;
};

Guards read_guards() {
  Guards g;
  if (const char* env = std::getenv("MODAL_SUITE_BUDGET")) {
    int seconds = std::atoi(env);
    if (seconds > 0 && seconds < 120) {
      g.fracture_posets = 3;
      g.sheaf_stalks = 2;
      g.glue_stalks = 2;
      std::ostringstream ss;
      ss << "note: MODAL_SUITE_BUDGET=" << seconds
         << " shrinks guards: fracture posets <=3 elements, sheaf and gluing "
            "suites <=2-element stalks";
      g.note = ss.str();
    }
  }
  return g;
}

const std::pair<const char*, int> kCorpus[] = {
    {"prelude", 20}, {"pathsplit", 13}, {"dneg", 9}, {"localize", 21}};

Term def_ref(const SourceFile& sf, const std::string& name) {
  for (const Definition& d : sf.defs)
    if (d.name == name) return b::ann(d.body, d.classifier);
  throw std::runtime_error("missing definition " + name);
}

// --- criterion 1: the proof corpus checks; corrupted copies are rejected ---

void crit_corpus(const std::string& root, Crit& c, const Guards&) {
  for (auto [name, count] : kCorpus) {
    std::string base = std::string(name);
    SourceFile sf = parse(slurp(root + "/stdlib/" + base + ".mtt"));
    c.expect(static_cast<int>(sf.defs.size()) == count,
             base + ": expected " + std::to_string(count) + " definitions, got " +
                 std::to_string(sf.defs.size()));
    FileCheckResult r = check_file(sf);
    c.expect(r.ok, base + ": " + r.message);

    SourceFile mut = parse(slurp(root + "/tests/mutations/" + base + ".mtt"));
    FileCheckResult m = check_file(mut);
    c.expect(!m.ok, base + " mutation unexpectedly typechecks");
    if (!m.ok) {
      c.expect(!m.failed_def.empty() && m.line > 0,
               base + " mutation error is not located");
      c.expect(m.message.find("Mismatch") != std::string::npos,
               base + " mutation did not fail with a Mismatch: " + m.message);
    }
  }
}

// --- criterion 2: judgmental computation and normalization laws ---

void crit_judgmental(const std::string& root, Crit& c, const Guards&) {
  for (auto [name, count] : kCorpus) {
    (void)count;
    SourceFile sf = parse(slurp(root + "/stdlib/" + std::string(name) + ".mtt"));
    for (const Definition& d : sf.defs) {
      Term n1 = normalize({}, d.body, d.classifier);
      Term n2 = normalize({}, n1, d.classifier);
      c.expect(term_eq(n2, n1), d.name + ": normalize is not idempotent");
      bool subject = true;
      try {
        modal::tt::check({}, n1, d.classifier);
      } catch (const TypeError&) {
        subject = false;
      }
      c.expect(subject, d.name + ": normal form fails its own classifier");
      c.expect(defeq({}, d.body, n1, d.classifier),
               d.name + ": body is not convertible with its normal form");
    }
  }

  // The localization eliminator computes judgmentally on generator points
  // and deliberately not on extension points (those are pinned by a
  // propositional path instead).
  SourceFile loc = parse(slurp(root + "/stdlib/localize.mtt"));
  Term twoTy = def_ref(loc, "two");
  Term tt = def_ref(loc, "tt");
  Term onPoint = b::app(def_ref(loc, "jzero-elim"), def_ref(loc, "jzero-point"));
  c.expect(defeq({}, onPoint, tt, twoTy),
           "eliminator did not compute on the generator point");
  Term onExt = b::app(def_ref(loc, "jzero-elim"), def_ref(loc, "jzero-ext-point"));
  c.expect(!defeq({}, onExt, tt, twoTy),
           "eliminator unexpectedly computed on an extension point");
  // The corpus records the computation law as a reflexivity proof.
  bool has_law = false;
  for (const Definition& d : loc.defs)
    if (d.name == "jzero-elim-alpha") has_law = true;
  c.expect(has_law, "missing the recorded computation law jzero-elim-alpha");
}

// --- criterion 3: nucleus enumeration against the all-self-maps oracle ---

void crit_nuclei_oracle(const std::string&, Crit& c, const Guards&) {
  for (int n = 0; n <= 3; ++n)
    for (const FinitePoset& po : all_posets(n)) {
      Frame f = downset_frame(po);
      std::vector<Nucleus> fast = enumerate_nuclei(f);
      std::vector<Nucleus> slow = enumerate_nuclei_oracle(f);
      bool same = fast.size() == slow.size();
      for (size_t i = 0; same && i < fast.size(); ++i)
        if (!(fast[i] == slow[i])) same = false;
      c.expect(same, "enumeration disagrees with the oracle on a " +
                         std::to_string(n) + "-element poset frame");
    }

  // Golden values on the 3-element chain frame (down-sets of a 2-chain).
  Frame f = downset_frame(make_poset({"a", "b"}, {{0, 1}}));
  std::vector<Nucleus> nuclei = enumerate_nuclei(f);
  c.expect(nuclei.size() == 4, "3-chain frame must carry exactly 4 nuclei");
  if (nuclei.size() == 4) {
    c.expect(nuclei[0].table == std::vector<int>{0, 1, 2}, "3-chain: identity");
    c.expect(nuclei[1].table == std::vector<int>{0, 2, 2}, "3-chain: open at m");
    c.expect(nuclei[2].table == std::vector<int>{1, 1, 2}, "3-chain: closed at m");
    c.expect(nuclei[3].table == std::vector<int>{2, 2, 2}, "3-chain: top");
    c.expect(mk_dneg(f) == nuclei[1], "3-chain: double negation must be open-at-m");
  }
}

// --- criterion 4: modality lattice laws and coframe distributivity ---

void crit_lattice(const std::string&, Crit& c, const Guards&) {
  for (int n = 0; n <= 3; ++n)
    for (const FinitePoset& po : all_posets(n)) {
      Frame f = downset_frame(po);
      for (int u = 0; u < f.size(); ++u) {
        for (int v = 0; v < f.size(); ++v) {
          c.expect(modality_meet(f, mk_open(f, u), mk_open(f, v)) ==
                       mk_open(f, f.meet(u, v)),
                   "open(u) ∧ open(v) != open(u∧v)");
          c.expect(modality_join(f, mk_open(f, u), mk_open(f, v)) ==
                       mk_open(f, f.join(u, v)),
                   "open(u) ∨ open(v) != open(u∨v)");
          c.expect(mk_closed(f, f.join(u, v)) ==
                       modality_meet(f, mk_closed(f, u), mk_closed(f, v)),
                   "closed(u∨v) != closed(u) ∧ closed(v)");
        }
        c.expect(modality_join(f, mk_open(f, u), mk_closed(f, u)) == mk_id(f),
                 "open(q) ∨ closed(q) != identity");
      }
      c.expect(coframe_check(f), "coframe distributivity failed");
    }
}

// --- criterion 5: the propositional fracture tautology ---

void crit_fracture_taut(const std::string&, Crit& c, const Guards& g) {
  for (int n = 0; n <= g.fracture_posets; ++n)
    for (const FinitePoset& po : all_posets(n)) {
      Frame f = downset_frame(po);
      for (int q = 0; q < f.size(); ++q)
        c.expect(fracture_taut(f, q),
                 "a = (q∨a)∧(q⇒a) failed on a " + std::to_string(n) +
                     "-element poset at q = " + f.name(q));
    }
}

// --- criterion 6: sheafification laws ---

// Canonical form of a presheaf under independent relabeling of each stalk:
// the lexicographically least encoding over all per-point permutations.
// Only used on suites with small stalks, where each orbit is tiny.
std::vector<int> canonical_key(const Presheaf& x) {
  int n = x.points();
  std::vector<std::vector<std::vector<int>>> perms(n);
  for (int p = 0; p < n; ++p) {
    std::vector<int> idx(x.stalk(p));
    for (int i = 0; i < x.stalk(p); ++i) idx[i] = i;
    do perms[p].push_back(idx);
    while (std::next_permutation(idx.begin(), idx.end()));
  }
  std::vector<int> best;
  std::vector<int> choice(n, 0);
  for (;;) {
    std::vector<int> key;
    for (int p = 0; p < n; ++p) key.push_back(x.stalk(p));
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) {
        if (q == p || !x.poset.leq[q][p]) continue;
        std::vector<int> table(x.stalk(p));
        for (int e = 0; e < x.stalk(p); ++e)
          table[perms[p][choice[p]][e]] = perms[q][choice[q]][x.restrict(p, e, q)];
        key.insert(key.end(), table.begin(), table.end());
      }
    if (best.empty() || key < best) best = std::move(key);
    int p = 0;
    while (p < n && ++choice[p] == static_cast<int>(perms[p].size()))
      choice[p++] = 0;
    if (p == n) break;
  }
  return best;
}

// Deduplicate a suite up to isomorphism.  The universal-property sweep
// quantifies only over class representatives: the property checked there is
// invariant under isomorphism of either argument.
std::vector<int> iso_reps(const std::vector<Presheaf>& suite) {
  std::set<std::vector<int>> seen;
  std::vector<int> reps;
  for (int i = 0; i < static_cast<int>(suite.size()); ++i)
    if (seen.insert(canonical_key(suite[i])).second) reps.push_back(i);
  return reps;
}

void crit_sheafify(const std::string&, Crit& c, const Guards& g) {
  for (int n = 0; n <= 3; ++n)
    for (const FinitePoset& po : poset_iso_classes(n)) {
      Frame f = downset_frame(po);
      std::vector<Presheaf> suite = all_presheaves(po, g.sheaf_stalks);
      std::vector<int> reps = iso_reps(suite);
      // |Hom(x, t)| is nucleus-independent; cache it across the nuclei loop.
      std::map<std::pair<int, int>, size_t> hom_count;
      auto count_maps = [&](int xr, int sr) {
        auto it = hom_count.find({xr, sr});
        if (it != hom_count.end()) return it->second;
        size_t k = all_maps(suite[xr], suite[sr]).size();
        hom_count.emplace(std::make_pair(xr, sr), k);
        return k;
      };
      for (const Nucleus& j : enumerate_nuclei(f)) {
        // Restriction to subterminals is exactly the nucleus.
        for (int s = 0; s < f.size(); ++s) {
          Sheafified sh = sheafify(f, j, subterminal_presheaf(po, f.carrier[s]));
          bool thin = true;
          for (int p = 0; p < po.n(); ++p)
            if (sh.sheaf.stalk(p) > 1) thin = false;
          c.expect(thin && support(sh.sheaf).support == f.carrier[j(s)],
                   "sheafified subterminal " + f.name(s) +
                       " does not reproduce the nucleus value " + f.name(j(s)));
        }
        // Idempotence and unit-iso-on-sheaves over the whole labeled suite.
        for (const Presheaf& x : suite) {
          Sheafified s1 = sheafify(f, j, x);
          c.expect(is_sheaf(f, j, s1.sheaf), "sheafification is not a sheaf");
          Sheafified s2 = sheafify(f, j, s1.sheaf);
          c.expect(is_iso(s1.sheaf, s2.sheaf, s2.unit),
                   "sheafification is not idempotent");
          if (is_sheaf(f, j, x))
            c.expect(is_iso(x, s1.sheaf, s1.unit),
                     "unit of a sheaf is not an isomorphism");
        }
        // Universal property by brute force over class representatives.
        std::vector<int> sheaf_reps;
        for (int sr : reps)
          if (is_sheaf(f, j, suite[sr])) sheaf_reps.push_back(sr);
        for (int xr : reps) {
          Sheafified s = sheafify(f, j, suite[xr]);
          for (int sr : sheaf_reps) {
            const Presheaf& target = suite[sr];
            std::vector<PresheafMap> from_w = all_maps(s.sheaf, target);
            bool bijective = from_w.size() == count_maps(xr, sr);
            std::set<std::vector<std::vector<int>>> seen;
            for (const PresheafMap& k : from_w) {
              std::vector<std::vector<int>> comp(suite[xr].points());
              for (int p = 0; p < suite[xr].points(); ++p) {
                comp[p].resize(suite[xr].stalk(p));
                for (int e = 0; e < suite[xr].stalk(p); ++e)
                  comp[p][e] = k.comp[p][s.unit.comp[p][e]];
              }
              if (!seen.insert(comp).second) bijective = false;
            }
            c.expect(bijective,
                     "precomposition with the unit is not a bijection of hom-sets");
          }
        }
      }
    }
}

// --- criterion 7: lexness of sheafification; non-lexness of support ---

void crit_lex(const std::string&, Crit& c, const Guards&) {
  const std::vector<FinitePoset> posets = {
      make_poset({"a", "b"}, {{0, 1}}),  // Sierpinski
      make_poset({"a", "b"}, {}),        // two-point antichain
      make_poset({"p"}, {}),             // point
  };
  for (const FinitePoset& po : posets) {
    Frame f = downset_frame(po);
    std::vector<Presheaf> suite = all_presheaves(po, 2);
    for (const Nucleus& j : enumerate_nuclei(f))
      for (const Presheaf& d : suite)
        for (const Presheaf& bb : suite)
          for (const PresheafMap& fb : all_maps(bb, d))
            for (const Presheaf& cc : suite)
              for (const PresheafMap& gc : all_maps(cc, d))
                c.expect(lex_probe_sheafify(f, j, Cospan{bb, cc, d, fb, gc}),
                         "sheafification failed to preserve a pullback");
  }

  // Support is a modality but not lex: 1 → 2 ← 1 over one point.
  FinitePoset pt = make_poset({"p"}, {});
  Presheaf one = terminal_presheaf(pt);
  Presheaf two = make_presheaf(pt, {{"u", "v"}}, {{{}}});
  PresheafMap hit0 = make_presheaf_map(one, two, {{0}});
  PresheafMap hit1 = make_presheaf_map(one, two, {{1}});
  c.expect(!lex_probe_support(Cospan{one, one, two, hit0, hit1}),
           "support wrongly claimed to preserve the 1→2←1 pullback");
  c.expect(lex_probe_support(Cospan{one, one, two, hit0, hit0}),
           "support should preserve the agreeing-cospan pullback");
}

// --- criterion 8: the connected/sheaf factorization ---

void crit_factorize(const std::string&, Crit& c, const Guards&) {
  const std::vector<FinitePoset> posets = {
      make_poset({"a", "b"}, {{0, 1}}),
      make_poset({"a", "b"}, {}),
      make_poset({"p"}, {}),
  };
  for (const FinitePoset& po : posets) {
    Frame f = downset_frame(po);
    std::vector<Presheaf> suite = all_presheaves(po, 2);
    for (const Nucleus& j : enumerate_nuclei(f))
      for (const Presheaf& x : suite)
        for (const Presheaf& y : suite)
          for (const PresheafMap& m : all_maps(x, y)) {
            Factorization fac = factorize(f, j, x, y, m);
            bool legs = true;
            for (int p = 0; legs && p < x.points(); ++p)
              for (int e = 0; legs && e < x.stalk(p); ++e)
                if (fac.pR.comp[p][fac.pL.comp[p][e]] != m.comp[p][e]) legs = false;
            c.expect(legs, "pR ∘ pL differs from the factored map");
            c.expect(fibers_are_sheaves(f, j, fac.Z, y, fac.pR),
                     "a right-leg fiber is not a sheaf");
            c.expect(fibers_are_connected(f, j, x, fac.Z, fac.pL),
                     "a left-leg fiber is not connected");
          }
  }

  // Uniqueness up to isomorphism over the endpoints, brute-forced on tiny
  // instances: every alternative factorization with the right fiber
  // properties (searched over all presheaves with <=3-element stalks) is
  // isomorphic to the canonical one compatibly with both legs.
  FinitePoset sp = make_poset({"a", "b"}, {{0, 1}});
  Frame f = downset_frame(sp);
  Presheaf x = make_presheaf(sp, {{"a0", "a1"}, {"b0", "b1"}},
                             {{{}, {}}, {{0, 0}, {}}});
  Presheaf y = terminal_presheaf(sp);
  PresheafMap m = make_presheaf_map(x, y, {{0, 0}, {0, 0}});
  for (const Nucleus& j : enumerate_nuclei(f)) {
    Factorization canon = factorize(f, j, x, y, m);
    int alternatives = 0;
    for (const Presheaf& z : all_presheaves(sp, 3))
      for (const PresheafMap& l : all_maps(x, z))
        for (const PresheafMap& r : all_maps(z, y)) {
          bool legs = true;
          for (int p = 0; legs && p < x.points(); ++p)
            for (int e = 0; legs && e < x.stalk(p); ++e)
              if (r.comp[p][l.comp[p][e]] != m.comp[p][e]) legs = false;
          if (!legs) continue;
          if (!fibers_are_connected(f, j, x, z, l)) continue;
          if (!fibers_are_sheaves(f, j, z, y, r)) continue;
          ++alternatives;
          bool found = false;
          for (const PresheafMap& phi : all_maps(canon.Z, z)) {
            if (!is_iso(canon.Z, z, phi)) continue;
            bool commutes = true;
            for (int p = 0; commutes && p < x.points(); ++p)
              for (int e = 0; commutes && e < x.stalk(p); ++e)
                if (phi.comp[p][canon.pL.comp[p][e]] != l.comp[p][e])
                  commutes = false;
            for (int p = 0; commutes && p < canon.Z.points(); ++p)
              for (int e = 0; commutes && e < canon.Z.stalk(p); ++e)
                if (r.comp[p][phi.comp[p][e]] != canon.pR.comp[p][e])
                  commutes = false;
            if (commutes) {
              found = true;
              break;
            }
          }
          c.expect(found, "an alternative factorization is not isomorphic to "
                          "the canonical one");
        }
    c.expect(alternatives > 0, "brute force found no factorization at all");
  }
}

// --- criterion 9: fracture squares and Artin gluing round trips ---

void crit_fracture_glue(const std::string&, Crit& c, const Guards& g) {
  // The 2-point chain with the larger stalk bound, then every 3-element
  // poset shape with stalks <= 2; every down-set of each.
  std::vector<std::pair<FinitePoset, int>> sites;
  sites.push_back({make_poset({"a", "b"}, {{0, 1}}), g.glue_stalks});
  for (const FinitePoset& po : poset_iso_classes(3)) sites.push_back({po, 2});

  for (auto& [po, stalks] : sites) {
    Frame f = downset_frame(po);
    std::vector<Presheaf> suite = all_presheaves(po, stalks);
    for (int s = 0; s < f.size(); ++s) {
      DownSet q = f.carrier[s];
      for (const Presheaf& x : suite) {
        FractureReport rep = fracture_check(q, x);
        c.expect(rep.verdict, "fracture square is not a pullback: " + rep.witness);
        Unglued u = unglue(q, x);
        c.expect(presheaf_iso(glue(q, u.B, u.C, u.g), x),
                 "glue(unglue(X)) is not isomorphic to X");
      }
    }
  }

  // unglue(glue(B,C,g)) recovers the triple, over all valid triples on the
  // 2-point chain with <=2-element stalks.
  FinitePoset sp = make_poset({"a", "b"}, {{0, 1}});
  Frame f = downset_frame(sp);
  std::vector<Presheaf> suite = all_presheaves(sp, 2);
  for (int s = 0; s < f.size(); ++s) {
    DownSet q = f.carrier[s];
    for (const Presheaf& open_part : suite) {
      OpenApplied ob = apply_open(q, open_part);
      if (!is_iso(open_part, ob.result, ob.unit)) continue;  // not open-modal
      ClosedApplied cb = apply_closed(q, open_part);
      for (const Presheaf& closed_part : suite) {
        bool closed_modal = true;
        for (int p = 0; p < sp.n(); ++p)
          if ((q >> p & 1) && closed_part.stalk(p) != 1) closed_modal = false;
        if (!closed_modal) continue;
        for (const PresheafMap& gm : all_maps(closed_part, cb.result)) {
          Presheaf glued = glue(q, open_part, closed_part, gm);
          Unglued u = unglue(q, glued);
          c.expect(presheaf_iso(u.B, open_part) && presheaf_iso(u.C, closed_part),
                   "unglue(glue) changed a corner");
          // The comparison maps must also match under some pair of
          // isomorphisms compatible with g.
          bool found = false;
          for (const PresheafMap& phiB : all_maps(open_part, u.B)) {
            if (!is_iso(open_part, u.B, phiB)) continue;
            ClosedApplied cuB = apply_closed(q, u.B);
            PresheafMap closedPhiB =
                apply_closed_map(q, open_part, u.B, phiB, cb, cuB);
            for (const PresheafMap& phiC : all_maps(closed_part, u.C)) {
              if (!is_iso(closed_part, u.C, phiC)) continue;
              bool commutes = true;
              for (int p = 0; commutes && p < sp.n(); ++p)
                for (int e = 0; commutes && e < closed_part.stalk(p); ++e)
                  if (u.g.comp[p][phiC.comp[p][e]] !=
                      closedPhiB.comp[p][gm.comp[p][e]])
                    commutes = false;
              if (commutes) {
                found = true;
                break;
              }
            }
            if (found) break;
          }
          c.expect(found, "unglue(glue) does not recover the gluing map");
        }
      }
    }
  }
}

struct Criterion {
  const char* title;
  double bound_seconds;
  void (*run)(const std::string&, Crit&, const Guards&);
};

const Criterion kCriteria[] = {
    {"corpus typechecks; corrupted copies rejected with located mismatches",
     10.0, crit_corpus},
    {"judgmental localization computation; normalization idempotent and "
     "subject-reducing",
     10.0, crit_judgmental},
    {"nucleus enumeration matches the all-self-maps oracle; 3-chain goldens",
     30.0, crit_nuclei_oracle},
    {"modality lattice laws and coframe distributivity", 60.0, crit_lattice},
    {"propositional fracture tautology", 30.0, crit_fracture_taut},
    {"sheafification idempotence, unit-iso, universal property, nucleus "
     "restriction",
     120.0, crit_sheafify},
    {"sheafification preserves pullbacks; support does not", 30.0, crit_lex},
    {"connected/sheaf factorization laws and uniqueness", 60.0, crit_factorize},
    {"fracture squares are pullbacks; gluing round trips", 60.0,
     crit_fracture_glue},
};

}  // namespace

int run_acceptance(const std::string& root, std::ostream& out, bool verbose) {
  Guards g = read_guards();
  if (!g.note.empty()) out << g.note << "\n";
  int failed_criteria = 0;
  int index = 0;
  for (const Criterion& crit : kCriteria) {
    ++index;
    Crit c;
    auto t0 = std::chrono::steady_clock::now();
    std::string abort_reason;
    try {
      crit.run(root, c, g);
    } catch (const std::exception& e) {
      abort_reason = e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                      .count();
    bool in_time = secs < crit.bound_seconds;
    bool ok = c.ok() && abort_reason.empty() && in_time;
    out << (ok ? "PASS" : "FAIL") << " [" << index << "/9] " << crit.title;
    if (verbose) {
      out << "  (" << c.checks << " checks, " << std::fixed << std::setprecision(2)
          << secs << " s)";
    }
    out << "\n";
    if (!ok) {
      ++failed_criteria;
      if (!abort_reason.empty()) out << "    - aborted: " << abort_reason << "\n";
      for (const std::string& w : c.failures) out << "    - " << w << "\n";
      if (c.failed > static_cast<long long>(c.failures.size()))
        out << "    - (" << c.failed << " failing checks in total)\n";
      if (!in_time)
        out << "    - exceeded the " << crit.bound_seconds << " s time bound\n";
    }
  }
  out << (failed_criteria == 0 ? "PASS" : "FAIL") << ": "
      << (9 - failed_criteria) << "/9 criteria passed\n";
  return failed_criteria;
}

}  // namespace modal
