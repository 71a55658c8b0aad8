#pragma once

#include <cstdint>
#include <exception>
#include <string>
#include <utility>
#include <vector>

// Finite frames of down-sets and the closure operators (nuclei) on them.
//
// A finite poset presents a frame: the lattice of its down-closed subsets,
// with intersection as meet, union as join, and the induced Heyting
// implication.  A nucleus on that frame is an inflationary, idempotent,
// meet-preserving endo-map; nuclei classify the ways of declaring some
// elements "covered" coherently, and each one cuts out a sub-Heyting-algebra
// of fixed points.  Everything here is exhaustively checkable, and the
// expensive operations carry explicit size guards instead of sampling.

namespace modal::sem {

struct ModelError : std::exception {
  std::string kind;  // PosetInvalid | TooLarge | BadInput | NotOpenModal | NotClosedModal
  std::string detail;
  std::string rendered;
  ModelError(std::string k, std::string d)
      : kind(std::move(k)), detail(std::move(d)), rendered(kind + ": " + detail) {}
  const char* what() const noexcept override { return rendered.c_str(); }
};

// ---------------------------------------------------------------------------
// Posets and down-sets

// A finite poset with named elements.  leq is the full order relation
// (reflexive, transitive, antisymmetric), not just the covers.
struct FinitePoset {
  std::vector<std::string> elements;
  std::vector<std::vector<bool>> leq;  // leq[i][j]: element i <= element j

  int n() const { return static_cast<int>(elements.size()); }
  int index_of(const std::string& name) const;  // -1 if absent
};

// Build a poset from cover pairs (lower, upper); the order is the
// reflexive-transitive closure.  Throws PosetInvalid on duplicate names,
// unknown cover endpoints, more than 64 elements, or a cycle (which would
// break antisymmetry).
FinitePoset make_poset(std::vector<std::string> elements,
                       const std::vector<std::pair<int, int>>& covers);

// JSON loader: {"elements": ["a", ...], "covers": [["lower","upper"], ...]}.
FinitePoset parse_poset(const std::string& json_text);

// All posets on n labeled elements "a","b",... (exhaustive, so n <= 4).
std::vector<FinitePoset> all_posets(int n);

// A down-closed subset of a poset, as a bitset over element indices.
using DownSet = std::uint64_t;

bool is_downset(const FinitePoset& p, DownSet s);
DownSet principal_downset(const FinitePoset& p, int elem);  // all q <= elem
std::string downset_name(const FinitePoset& p, DownSet s);  // "{a,b}" (sorted)
// Parse "{a,b}", "a,b", or "{}"/"" back to a bitset; BadInput if unknown
// element or not down-closed.
DownSet parse_downset(const FinitePoset& p, const std::string& text);

// ---------------------------------------------------------------------------
// Frames

// The Heyting algebra of all down-sets of a poset, with total operation
// tables.  Frame elements are indices into `carrier` (ascending bitmask
// order, so bottom is first and top is last).
struct Frame {
  FinitePoset poset;
  std::vector<DownSet> carrier;
  int bottom = 0, top = 0;
  std::vector<std::vector<int>> meet_, join_, impl_;

  int size() const { return static_cast<int>(carrier.size()); }
  int index_of(DownSet s) const;  // -1 if absent (i.e. not a down-set)
  int meet(int a, int b) const { return meet_[a][b]; }
  int join(int a, int b) const { return join_[a][b]; }
  int impl(int a, int b) const { return impl_[a][b]; }
  int neg(int a) const { return impl_[a][bottom]; }
  bool leq(int a, int b) const { return meet_[a][b] == a; }
  std::string name(int a) const { return downset_name(poset, carrier[a]); }

  // The defining adjunction c∧a <= b iff c <= a⇒b, checked exhaustively.
  bool adjunction_ok() const;
};

Frame downset_frame(const FinitePoset& p);

// ---------------------------------------------------------------------------
// Nuclei

struct Nucleus {
  std::vector<int> table;  // frame element -> frame element

  int operator()(int a) const { return table[a]; }
  bool operator==(const Nucleus& o) const { return table == o.table; }
};

// On failure, which law broke and at which element(s).
struct LawWitness {
  std::string law;  // "inflationary" | "idempotent" | "meet" | arity/range text
  int a = -1, b = -1;
};

// The three nucleus laws: a <= j(a), j(j(a)) = j(a), j(a∧b) = j(a)∧j(b).
bool is_nucleus(const Frame& f, const std::vector<int>& table, LawWitness* w = nullptr);

// The weaker closure-operator laws (monotone + inflationary + idempotent).
// Every nucleus is one; the converse fails on non-chain frames.
bool is_closure_operator(const Frame& f, const std::vector<int>& table);

Nucleus mk_id(const Frame& f);
Nucleus mk_top(const Frame& f);                // constantly the top element
Nucleus mk_open(const Frame& f, int u);        // a ↦ u ⇒ a
Nucleus mk_closed(const Frame& f, int u);      // a ↦ u ∨ a
Nucleus mk_dneg(const Frame& f);               // a ↦ ¬¬a

// All nuclei on the frame, deduplicated, sorted lexicographically by table.
// Computed by enumerating candidate fixed-point sets (subsets containing top,
// closed under meet and under implication from arbitrary elements), each of
// which determines one nucleus.  Guard: |carrier| <= 64, else TooLarge.
std::vector<Nucleus> enumerate_nuclei(const Frame& f);

// Independent oracle: filter every |carrier|^|carrier| self-map through
// is_nucleus.  Same order.  Only viable on very small carriers.
std::vector<Nucleus> enumerate_nuclei_oracle(const Frame& f);

// Frame elements fixed by j, ascending.
std::vector<int> fixed_points(const Frame& f, const Nucleus& j);

// The sub-Heyting-algebra of j-fixed elements: meet and implication are
// inherited from the frame, join is j applied to the frame join, bottom is
// j(⊥).  Tables are indexed by positions in `carrier`.
struct FixedAlgebra {
  std::vector<int> carrier;  // frame element indices, ascending
  int bottom = 0, top = 0;
  std::vector<std::vector<int>> meet_, join_, impl_;
  bool heyting_ok = false;   // the ∧ ⊣ ⇒ adjunction inside the subalgebra

  int size() const { return static_cast<int>(carrier.size()); }
};
FixedAlgebra fixed_points_algebra(const Frame& f, const Nucleus& j);

// The modality order: j ⊑ k iff every j-fixed element is k-fixed.  (This is
// the reverse of the pointwise order on tables; the equivalence is tested,
// not assumed.)
bool modality_leq(const Frame& f, const Nucleus& j, const Nucleus& k);

// Meet in the modality order: the least nucleus pointwise above both,
// computed by iterating a ↦ k(j(a)) to a fixpoint.  Its fixed points are
// Fix(j) ∩ Fix(k); both that and is_nucleus are re-checked on construction.
Nucleus modality_meet(const Frame& f, const Nucleus& j, const Nucleus& k);

// Join in the modality order: the pointwise meet of the two tables (again a
// nucleus, re-checked on construction).
Nucleus modality_join(const Frame& f, const Nucleus& j, const Nucleus& k);

// Distributivity of join over arbitrary meets of nuclei: for every nucleus j
// and every subset K of all nuclei, join(j, ⋀K) = ⋀{join(j,k) : k ∈ K},
// where ⋀ folds modality_meet starting from the identity (the top modality).
// Exhaustive; guard as in enumerate_nuclei.
bool coframe_check(const Frame& f);

// The propositional fracture identity at q: every a equals (q∨a) ∧ (q⇒a).
bool fracture_taut(const Frame& f, int q);

}  // namespace modal::sem
