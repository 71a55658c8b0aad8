#pragma once

// Abstract syntax for the object theory: a small dependent type theory with
// Pi/Sigma/Id, finite types, binary sums, pushouts, and a localization HIT.
// Terms are immutable shared trees; binders use de Bruijn indices and every
// binding construct (Pi, Sigma, Lam) binds exactly one variable.  Eliminator
// motives and branches are ordinary terms of function type, not binders.

#include <memory>
#include <string>
#include <variant>

namespace modal::tt {

struct TermNode;
using Term = std::shared_ptr<const TermNode>;

// --- variables, functions, pairs ---
struct Var   { int index = 0; };          // de Bruijn index, 0 = innermost
struct Pi    { Term dom, cod; };          // cod binds one variable
struct Lam   { Term body; };              // body binds one variable
struct App   { Term fn, arg; };
struct Sigma { Term fst, snd; };          // snd binds one variable
struct Pair  { Term fst, snd; };
struct Fst   { Term pair; };
struct Snd   { Term pair; };

// --- identity types ---
struct IdT  { Term type, lhs, rhs; };
struct Refl { Term point; };
// Based path induction: motive is a two-argument family (endpoint, path),
// base inhabits the motive at (lhs, refl), target is the right endpoint.
struct J { Term motive, base, target, path; };

// --- finite types and sums ---
struct UnitT  {};
struct Star   {};
struct EmptyT {};
struct Absurd { Term motive, scrutinee; };
struct SumT   { Term left, right; };
struct Inl    { Term value; };
struct Inr    { Term value; };
// motive is either a one-argument family over the sum, or the literal
// Type kind for a (non-dependent) case landing in types.
struct Case { Term motive, onLeft, onRight, scrutinee; };

// --- pushouts ---
// PushT(apex, left, right, f, g) is the pushout of  left <-f- apex -g-> right.
struct PushT { Term apex, left, right, toLeft, toRight; };
struct PInl  { Term value; };
struct PInr  { Term value; };
struct PGlue { Term point; };            // path PInl(f a) = PInr(g a)
struct PInd  { Term motive, onInl, onInr, onGlue, scrutinee; };

// --- localization HIT ---
// JT(index, dom, cod, family, base): the free type on `base` in which every
// map  dom(a) -> JT  extends along  family(a) : dom(a) -> cod(a).
struct JT     { Term index, dom, cod, family, base; };
struct JAlpha { Term value; };           // inclusion of the base type
struct JExt   { Term point, fn, arg; };  // extension of fn : dom(a) -> JT at arg : cod(a)
struct JIsExt { Term point, fn, dom; };  // path JExt(a, fn, family a dom) = fn dom
// Induction: onAlpha gives the section on base points (the only judgmental
// computation rule), onExt handles extensions, onCoh ties the two together
// over each JIsExt path.
struct JInd { Term motive, onAlpha, onExt, onCoh, scrutinee; };

// --- axioms, annotations, kinds ---
struct Const { std::string name; };      // "funext" | "pglue-beta"
struct Ann   { Term term, type; };       // type may also be a kind
struct TypeK {};                         // the kind of types (classifiers only)

using TermVariant = std::variant<
    Var, Pi, Lam, App, Sigma, Pair, Fst, Snd,
    IdT, Refl, J,
    UnitT, Star, EmptyT, Absurd, SumT, Inl, Inr, Case,
    PushT, PInl, PInr, PGlue, PInd,
    JT, JAlpha, JExt, JIsExt, JInd,
    Const, Ann, TypeK>;

struct TermNode {
  TermVariant data;
};

template <typename T>
Term make(T&& node) {
  return std::make_shared<TermNode>(TermNode{std::forward<T>(node)});
}

template <typename T>
const T* as(const Term& t) {
  return t ? std::get_if<T>(&t->data) : nullptr;
}

// Structural equality (de Bruijn representation, so this is alpha-equality).
bool term_eq(const Term& a, const Term& b);

// True if the variable with the given index occurs free in t.
bool occurs(const Term& t, int index);

// Convenience constructors.
namespace build {
inline Term var(int i) { return make(Var{i}); }
inline Term pi(Term d, Term c) { return make(Pi{std::move(d), std::move(c)}); }
inline Term arrow(Term d, Term c);  // non-dependent Pi; defined after shift
inline Term lam(Term b) { return make(Lam{std::move(b)}); }
inline Term app(Term f, Term a) { return make(App{std::move(f), std::move(a)}); }
inline Term sigma(Term a, Term b) { return make(Sigma{std::move(a), std::move(b)}); }
inline Term pair(Term a, Term b) { return make(Pair{std::move(a), std::move(b)}); }
inline Term fst(Term p) { return make(Fst{std::move(p)}); }
inline Term snd(Term p) { return make(Snd{std::move(p)}); }
inline Term id(Term ty, Term l, Term r) {
  return make(IdT{std::move(ty), std::move(l), std::move(r)});
}
inline Term refl(Term p) { return make(Refl{std::move(p)}); }
inline Term j(Term m, Term b, Term t, Term p) {
  return make(J{std::move(m), std::move(b), std::move(t), std::move(p)});
}
inline Term unit() { return make(UnitT{}); }
inline Term star() { return make(Star{}); }
inline Term empty() { return make(EmptyT{}); }
inline Term absurd(Term m, Term s) { return make(Absurd{std::move(m), std::move(s)}); }
inline Term sum(Term l, Term r) { return make(SumT{std::move(l), std::move(r)}); }
inline Term inl(Term v) { return make(Inl{std::move(v)}); }
inline Term inr(Term v) { return make(Inr{std::move(v)}); }
inline Term case_(Term m, Term l, Term r, Term s) {
  return make(Case{std::move(m), std::move(l), std::move(r), std::move(s)});
}
inline Term push(Term a, Term b, Term c, Term f, Term g) {
  return make(PushT{std::move(a), std::move(b), std::move(c), std::move(f), std::move(g)});
}
inline Term pinl(Term v) { return make(PInl{std::move(v)}); }
inline Term pinr(Term v) { return make(PInr{std::move(v)}); }
inline Term pglue(Term a) { return make(PGlue{std::move(a)}); }
inline Term pind(Term m, Term l, Term r, Term g, Term s) {
  return make(PInd{std::move(m), std::move(l), std::move(r), std::move(g), std::move(s)});
}
inline Term jt(Term a, Term b, Term c, Term g, Term x) {
  return make(JT{std::move(a), std::move(b), std::move(c), std::move(g), std::move(x)});
}
inline Term jalpha(Term v) { return make(JAlpha{std::move(v)}); }
inline Term jext(Term a, Term f, Term c) {
  return make(JExt{std::move(a), std::move(f), std::move(c)});
}
inline Term jisext(Term a, Term f, Term b) {
  return make(JIsExt{std::move(a), std::move(f), std::move(b)});
}
inline Term jind(Term p, Term n, Term r, Term s, Term z) {
  return make(JInd{std::move(p), std::move(n), std::move(r), std::move(s), std::move(z)});
}
inline Term constant(std::string name) { return make(Const{std::move(name)}); }
inline Term ann(Term t, Term ty) { return make(Ann{std::move(t), std::move(ty)}); }
inline Term type_kind() { return make(TypeK{}); }
}  // namespace build

// Shift free variables with index >= cutoff by delta.
Term shift(const Term& t, int delta, int cutoff = 0);

namespace build {
inline Term arrow(Term d, Term c) { return pi(std::move(d), shift(c, 1)); }
}

// A classifier is a *kind* when it is a Pi tower ending in the Type kind;
// otherwise it classifies terms.  Kinds may appear only as definition or
// annotation classifiers and as eliminator-motive targets.
bool is_kind_syntax(const Term& t);

}  // namespace modal::tt
