#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "modal/nuclei.hpp"

// Finite-set presheaves on finite posets, with sheafification for a nucleus,
// the open/closed modalities at a subterminal, support ((-1)-truncation),
// the fiberwise factorization of a map, lexness probes, and fracture/gluing.
//
// Variance: a presheaf assigns a finite set X(p) to each poset element and a
// restriction X(p) -> X(q) to each q <= p, so subterminal presheaves are
// literally down-sets.  All (co)limits are computed pointwise.

namespace modal::sem {

// ---------------------------------------------------------------------------
// Presheaves and maps

struct Presheaf {
  FinitePoset poset;
  std::vector<std::vector<std::string>> ids;      // stalk element names per point
  // res[p][q] is defined iff q <= p and maps stalk indices at p to indices
  // at q; res[p][p] is the identity.
  std::vector<std::vector<std::vector<int>>> res;

  int points() const { return poset.n(); }
  int stalk(int p) const { return static_cast<int>(ids[p].size()); }
  int restrict(int p, int x, int q) const { return res[p][q][x]; }
};

// Validates identity and composition of the given restriction tables;
// missing tables for comparable pairs are derived by composing along covers.
// Throws BadInput when underivable or inconsistent.
Presheaf make_presheaf(const FinitePoset& poset,
                       std::vector<std::vector<std::string>> ids,
                       std::vector<std::vector<std::vector<int>>> res);

// JSON loader: {"sets": {"p": ["x", ...]}, "restrictions": {"p>q": {"x": "y"}}}.
// Restrictions must be given at least on cover pairs with nonempty source.
Presheaf parse_presheaf(const FinitePoset& poset, const std::string& json_text);

struct PresheafMap {
  std::vector<std::vector<int>> comp;  // comp[p][x] = target index at p
};

// Validates pointwise totality and naturality; throws BadInput otherwise.
PresheafMap make_presheaf_map(const Presheaf& X, const Presheaf& Y,
                              std::vector<std::vector<int>> comp);
PresheafMap identity_map(const Presheaf& X);
PresheafMap compose(const Presheaf& X, const Presheaf& Y, const Presheaf& Z,
                    const PresheafMap& f /*X→Y*/, const PresheafMap& g /*Y→Z*/);

bool same_poset(const FinitePoset& a, const FinitePoset& b);

// The subterminal presheaf of a down-set: a singleton stalk on members of Q,
// empty elsewhere.
Presheaf subterminal_presheaf(const FinitePoset& poset, DownSet q);
Presheaf terminal_presheaf(const FinitePoset& poset);

// Natural isomorphism by exhaustive search for a family of bijections
// (backtracking; guarded to stalks <= 6).  iso_witness returns the bijections
// or an empty vector when none exist.
bool presheaf_iso(const Presheaf& X, const Presheaf& Y);
std::vector<std::vector<int>> iso_witness(const Presheaf& X, const Presheaf& Y);
// Is the given map an isomorphism (all components bijective)?
bool is_iso(const Presheaf& X, const Presheaf& Y, const PresheafMap& m);

// ---------------------------------------------------------------------------
// Matching families and sheaves

// All families over the down-set S that are compatible with restriction:
// each returned vector is indexed by poset point, -1 off S.  Deterministic
// order (choices on the maximal elements of S enumerated lexicographically).
std::vector<std::vector<int>> families_over(const Presheaf& X, DownSet S);

// A presheaf is a j-sheaf when, for every point p and every sieve S ⊆ ↓p
// with p ∈ j(S), restriction is a bijection from X(p) onto the compatible
// families over S.
bool is_sheaf(const Frame& f, const Nucleus& j, const Presheaf& X);

struct Sheafified {
  Presheaf sheaf;
  PresheafMap unit;  // X → sheaf
};

// Sheafification by two plus-construction passes.  Stalks of the result are
// equivalence classes of (covering sieve, compatible family) pairs, where two
// pairs agree when their agreement locus is again covering.
Sheafified sheafify(const Frame& f, const Nucleus& j, const Presheaf& X);

// Functorial action: the induced map sheafify(X) → sheafify(Y) of m: X → Y.
// sx and sy must be the results of sheafify on X and Y for the same nucleus.
PresheafMap sheafify_map(const Frame& f, const Nucleus& j, const Presheaf& X,
                         const Presheaf& Y, const PresheafMap& m,
                         const Sheafified& sx, const Sheafified& sy);

// ---------------------------------------------------------------------------
// Open and closed modalities at a subterminal, and support

struct OpenApplied {
  Presheaf result;   // p ↦ compatible families over Q ∩ ↓p
  PresheafMap unit;  // X → result
};
OpenApplied apply_open(DownSet q, const Presheaf& X);
// Induced map on open parts of m : X → Y.
PresheafMap apply_open_map(DownSet q, const Presheaf& X, const Presheaf& Y,
                           const PresheafMap& m, const OpenApplied& ox,
                           const OpenApplied& oy);

struct ClosedApplied {
  Presheaf result;   // X(p) off Q, a singleton on Q
  PresheafMap unit;  // X → result
};
ClosedApplied apply_closed(DownSet q, const Presheaf& X);
PresheafMap apply_closed_map(DownSet q, const Presheaf& X, const Presheaf& Y,
                             const PresheafMap& m, const ClosedApplied& cx,
                             const ClosedApplied& cy);

struct Supported {
  DownSet support;   // points with nonempty stalk (always down-closed)
  PresheafMap unit;  // X → subterminal_presheaf(support)
};
Supported support(const Presheaf& X);

// ---------------------------------------------------------------------------
// Pullbacks, cospans, lexness

struct Cospan {
  Presheaf B, C, D;
  PresheafMap f;  // B → D
  PresheafMap g;  // C → D
};

struct Pullback {
  Presheaf P;
  PresheafMap toB, toC;
};
Pullback pullback(const Cospan& s);

// Does sheafification preserve this pullback?  Computes sheafify(B ×_D C)
// and the pullback of the sheafified cospan and compares them along the
// canonical comparison map.
bool lex_probe_sheafify(const Frame& f, const Nucleus& j, const Cospan& s);

// Same probe for the support modality (images in the subterminal lattice).
bool lex_probe_support(const Cospan& s);

// ---------------------------------------------------------------------------
// Factorization

struct Factorization {
  Presheaf Z;
  PresheafMap pL;  // X → Z, fiberwise j-connected
  PresheafMap pR;  // Z → Y, fiberwise a j-sheaf
};

// Z(p) = pairs (y ∈ Y(p), class in the sheafification at p of the fiber of f
// over y, taken on the sub-site ↓p with the restricted nucleus).
Factorization factorize(const Frame& f, const Nucleus& j, const Presheaf& X,
                        const Presheaf& Y, const PresheafMap& m);

// The fiber condition probes used to validate a factorization (also used by
// the brute-force uniqueness search): over each point p and each y in the
// top stalk, the fiber presheaf on ↓p with the restricted nucleus.
bool fibers_are_sheaves(const Frame& f, const Nucleus& j, const Presheaf& Z,
                        const Presheaf& Y, const PresheafMap& pR);
bool fibers_are_connected(const Frame& f, const Nucleus& j, const Presheaf& X,
                          const Presheaf& Z, const PresheafMap& pL);

// Sub-site plumbing (exposed for tests): the full subposet on a down-set,
// the restriction of a presheaf to it, and the induced nucleus S ↦ j(S) ∩ D
// on its down-set frame.
FinitePoset subposet(const FinitePoset& p, DownSet d, std::vector<int>* orig = nullptr);
Presheaf restrict_presheaf(const Presheaf& X, DownSet d);
Nucleus restrict_nucleus(const Frame& f, const Nucleus& j, DownSet d,
                         const Frame& subframe);

// ---------------------------------------------------------------------------
// Fracture and gluing

struct FractureReport {
  Presheaf X, openCorner, closedCorner, mixedCorner;
  PresheafMap toOpen;         // X → openCorner (open unit)
  PresheafMap toClosed;       // X → closedCorner (closed unit)
  PresheafMap openToMixed;    // openCorner → mixedCorner (closed unit at the open part)
  PresheafMap closedToMixed;  // closedCorner → mixedCorner (closed image of the open unit)
  bool verdict = false;
  int witness_point = -1;     // point where the comparison fails, if any
  std::string witness;
};

// The square X → open corner, X → closed corner, both into the mixed corner;
// verdict is whether X is its pointwise pullback.
FractureReport fracture_check(DownSet q, const Presheaf& X);

struct Unglued {
  Presheaf B;      // open part
  Presheaf C;      // closed part
  PresheafMap g;   // C → apply_closed(q, B)
};
Unglued unglue(DownSet q, const Presheaf& X);

// Pointwise pullback of g against the closed unit of B.  Requires B
// open-modal (NotOpenModal) and C closed-modal (NotClosedModal).
Presheaf glue(DownSet q, const Presheaf& B, const Presheaf& C, const PresheafMap& g);

// ---------------------------------------------------------------------------
// Exhaustive suite generators

// Every presheaf on the poset with stalk sizes <= max_stalk (restriction
// tables enumerated on cover pairs, composites derived; inconsistent
// combinations on multi-path posets are skipped).
std::vector<Presheaf> all_presheaves(const FinitePoset& p, int max_stalk);

// Every natural map X → Y.
std::vector<PresheafMap> all_maps(const Presheaf& X, const Presheaf& Y);

// Representatives of poset isomorphism classes with exactly n elements.
std::vector<FinitePoset> poset_iso_classes(int n);

}  // namespace modal::sem
