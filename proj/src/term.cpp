#include "modal/term.hpp"

#include <type_traits>

namespace modal::tt {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

bool term_eq(const Term& a, const Term& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  if (a->data.index() != b->data.index()) return false;
  return std::visit(
      overloaded{
          [&](const Var& x) { return x.index == as<Var>(b)->index; },
          [&](const Pi& x) {
            const auto* y = as<Pi>(b);
            return term_eq(x.dom, y->dom) && term_eq(x.cod, y->cod);
          },
          [&](const Lam& x) { return term_eq(x.body, as<Lam>(b)->body); },
          [&](const App& x) {
            const auto* y = as<App>(b);
            return term_eq(x.fn, y->fn) && term_eq(x.arg, y->arg);
          },
          [&](const Sigma& x) {
            const auto* y = as<Sigma>(b);
            return term_eq(x.fst, y->fst) && term_eq(x.snd, y->snd);
          },
          [&](const Pair& x) {
            const auto* y = as<Pair>(b);
            return term_eq(x.fst, y->fst) && term_eq(x.snd, y->snd);
          },
          [&](const Fst& x) { return term_eq(x.pair, as<Fst>(b)->pair); },
          [&](const Snd& x) { return term_eq(x.pair, as<Snd>(b)->pair); },
          [&](const IdT& x) {
            const auto* y = as<IdT>(b);
            return term_eq(x.type, y->type) && term_eq(x.lhs, y->lhs) &&
                   term_eq(x.rhs, y->rhs);
          },
          [&](const Refl& x) { return term_eq(x.point, as<Refl>(b)->point); },
          [&](const J& x) {
            const auto* y = as<J>(b);
            return term_eq(x.motive, y->motive) && term_eq(x.base, y->base) &&
                   term_eq(x.target, y->target) && term_eq(x.path, y->path);
          },
          [&](const UnitT&) { return true; },
          [&](const Star&) { return true; },
          [&](const EmptyT&) { return true; },
          [&](const Absurd& x) {
            const auto* y = as<Absurd>(b);
            return term_eq(x.motive, y->motive) && term_eq(x.scrutinee, y->scrutinee);
          },
          [&](const SumT& x) {
            const auto* y = as<SumT>(b);
            return term_eq(x.left, y->left) && term_eq(x.right, y->right);
          },
          [&](const Inl& x) { return term_eq(x.value, as<Inl>(b)->value); },
          [&](const Inr& x) { return term_eq(x.value, as<Inr>(b)->value); },
          [&](const Case& x) {
            const auto* y = as<Case>(b);
            return term_eq(x.motive, y->motive) && term_eq(x.onLeft, y->onLeft) &&
                   term_eq(x.onRight, y->onRight) && term_eq(x.scrutinee, y->scrutinee);
          },
          [&](const PushT& x) {
            const auto* y = as<PushT>(b);
            return term_eq(x.apex, y->apex) && term_eq(x.left, y->left) &&
                   term_eq(x.right, y->right) && term_eq(x.toLeft, y->toLeft) &&
                   term_eq(x.toRight, y->toRight);
          },
          [&](const PInl& x) { return term_eq(x.value, as<PInl>(b)->value); },
          [&](const PInr& x) { return term_eq(x.value, as<PInr>(b)->value); },
          [&](const PGlue& x) { return term_eq(x.point, as<PGlue>(b)->point); },
          [&](const PInd& x) {
            const auto* y = as<PInd>(b);
            return term_eq(x.motive, y->motive) && term_eq(x.onInl, y->onInl) &&
                   term_eq(x.onInr, y->onInr) && term_eq(x.onGlue, y->onGlue) &&
                   term_eq(x.scrutinee, y->scrutinee);
          },
          [&](const JT& x) {
            const auto* y = as<JT>(b);
            return term_eq(x.index, y->index) && term_eq(x.dom, y->dom) &&
                   term_eq(x.cod, y->cod) && term_eq(x.family, y->family) &&
                   term_eq(x.base, y->base);
          },
          [&](const JAlpha& x) { return term_eq(x.value, as<JAlpha>(b)->value); },
          [&](const JExt& x) {
            const auto* y = as<JExt>(b);
            return term_eq(x.point, y->point) && term_eq(x.fn, y->fn) &&
                   term_eq(x.arg, y->arg);
          },
          [&](const JIsExt& x) {
            const auto* y = as<JIsExt>(b);
            return term_eq(x.point, y->point) && term_eq(x.fn, y->fn) &&
                   term_eq(x.dom, y->dom);
          },
          [&](const JInd& x) {
            const auto* y = as<JInd>(b);
            return term_eq(x.motive, y->motive) && term_eq(x.onAlpha, y->onAlpha) &&
                   term_eq(x.onExt, y->onExt) && term_eq(x.onCoh, y->onCoh) &&
                   term_eq(x.scrutinee, y->scrutinee);
          },
          [&](const Const& x) { return x.name == as<Const>(b)->name; },
          [&](const Ann& x) {
            const auto* y = as<Ann>(b);
            return term_eq(x.term, y->term) && term_eq(x.type, y->type);
          },
          [&](const TypeK&) { return true; },
      },
      a->data);
}

namespace {

// Generic fold over immediate subterms, tracking how many binders each
// subterm sits under (0 or 1 here; only Pi/Sigma/Lam bind).
template <typename F>
void each_child(const Term& t, F&& f) {
  std::visit(
      overloaded{
          [&](const Var&) {},
          [&](const Pi& x) { f(x.dom, 0); f(x.cod, 1); },
          [&](const Lam& x) { f(x.body, 1); },
          [&](const App& x) { f(x.fn, 0); f(x.arg, 0); },
          [&](const Sigma& x) { f(x.fst, 0); f(x.snd, 1); },
          [&](const Pair& x) { f(x.fst, 0); f(x.snd, 0); },
          [&](const Fst& x) { f(x.pair, 0); },
          [&](const Snd& x) { f(x.pair, 0); },
          [&](const IdT& x) { f(x.type, 0); f(x.lhs, 0); f(x.rhs, 0); },
          [&](const Refl& x) { f(x.point, 0); },
          [&](const J& x) { f(x.motive, 0); f(x.base, 0); f(x.target, 0); f(x.path, 0); },
          [&](const UnitT&) {},
          [&](const Star&) {},
          [&](const EmptyT&) {},
          [&](const Absurd& x) { f(x.motive, 0); f(x.scrutinee, 0); },
          [&](const SumT& x) { f(x.left, 0); f(x.right, 0); },
          [&](const Inl& x) { f(x.value, 0); },
          [&](const Inr& x) { f(x.value, 0); },
          [&](const Case& x) {
            f(x.motive, 0); f(x.onLeft, 0); f(x.onRight, 0); f(x.scrutinee, 0);
          },
          [&](const PushT& x) {
            f(x.apex, 0); f(x.left, 0); f(x.right, 0); f(x.toLeft, 0); f(x.toRight, 0);
          },
          [&](const PInl& x) { f(x.value, 0); },
          [&](const PInr& x) { f(x.value, 0); },
          [&](const PGlue& x) { f(x.point, 0); },
          [&](const PInd& x) {
            f(x.motive, 0); f(x.onInl, 0); f(x.onInr, 0); f(x.onGlue, 0); f(x.scrutinee, 0);
          },
          [&](const JT& x) {
            f(x.index, 0); f(x.dom, 0); f(x.cod, 0); f(x.family, 0); f(x.base, 0);
          },
          [&](const JAlpha& x) { f(x.value, 0); },
          [&](const JExt& x) { f(x.point, 0); f(x.fn, 0); f(x.arg, 0); },
          [&](const JIsExt& x) { f(x.point, 0); f(x.fn, 0); f(x.dom, 0); },
          [&](const JInd& x) {
            f(x.motive, 0); f(x.onAlpha, 0); f(x.onExt, 0); f(x.onCoh, 0); f(x.scrutinee, 0);
          },
          [&](const Const&) {},
          [&](const Ann& x) { f(x.term, 0); f(x.type, 0); },
          [&](const TypeK&) {},
      },
      t->data);
}

}  // namespace

bool occurs(const Term& t, int index) {
  if (const auto* v = as<Var>(t)) return v->index == index;
  bool found = false;
  each_child(t, [&](const Term& c, int binders) {
    if (!found && occurs(c, index + binders)) found = true;
  });
  return found;
}

namespace {

// Rebuild a node with children transformed by f (which receives the binder
// offset).  Used by shift; substitution lives in the evaluator instead.
template <typename F>
Term map_children(const Term& t, F&& f) {
  return std::visit(
      overloaded{
          [&](const Var& x) -> Term { return make(Var{x.index}); },
          [&](const Pi& x) -> Term { return make(Pi{f(x.dom, 0), f(x.cod, 1)}); },
          [&](const Lam& x) -> Term { return make(Lam{f(x.body, 1)}); },
          [&](const App& x) -> Term { return make(App{f(x.fn, 0), f(x.arg, 0)}); },
          [&](const Sigma& x) -> Term { return make(Sigma{f(x.fst, 0), f(x.snd, 1)}); },
          [&](const Pair& x) -> Term { return make(Pair{f(x.fst, 0), f(x.snd, 0)}); },
          [&](const Fst& x) -> Term { return make(Fst{f(x.pair, 0)}); },
          [&](const Snd& x) -> Term { return make(Snd{f(x.pair, 0)}); },
          [&](const IdT& x) -> Term {
            return make(IdT{f(x.type, 0), f(x.lhs, 0), f(x.rhs, 0)});
          },
          [&](const Refl& x) -> Term { return make(Refl{f(x.point, 0)}); },
          [&](const J& x) -> Term {
            return make(J{f(x.motive, 0), f(x.base, 0), f(x.target, 0), f(x.path, 0)});
          },
          [&](const UnitT&) -> Term { return make(UnitT{}); },
          [&](const Star&) -> Term { return make(Star{}); },
          [&](const EmptyT&) -> Term { return make(EmptyT{}); },
          [&](const Absurd& x) -> Term {
            return make(Absurd{f(x.motive, 0), f(x.scrutinee, 0)});
          },
          [&](const SumT& x) -> Term { return make(SumT{f(x.left, 0), f(x.right, 0)}); },
          [&](const Inl& x) -> Term { return make(Inl{f(x.value, 0)}); },
          [&](const Inr& x) -> Term { return make(Inr{f(x.value, 0)}); },
          [&](const Case& x) -> Term {
            return make(Case{f(x.motive, 0), f(x.onLeft, 0), f(x.onRight, 0),
                             f(x.scrutinee, 0)});
          },
          [&](const PushT& x) -> Term {
            return make(PushT{f(x.apex, 0), f(x.left, 0), f(x.right, 0), f(x.toLeft, 0),
                              f(x.toRight, 0)});
          },
          [&](const PInl& x) -> Term { return make(PInl{f(x.value, 0)}); },
          [&](const PInr& x) -> Term { return make(PInr{f(x.value, 0)}); },
          [&](const PGlue& x) -> Term { return make(PGlue{f(x.point, 0)}); },
          [&](const PInd& x) -> Term {
            return make(PInd{f(x.motive, 0), f(x.onInl, 0), f(x.onInr, 0), f(x.onGlue, 0),
                             f(x.scrutinee, 0)});
          },
          [&](const JT& x) -> Term {
            return make(JT{f(x.index, 0), f(x.dom, 0), f(x.cod, 0), f(x.family, 0),
                           f(x.base, 0)});
          },
          [&](const JAlpha& x) -> Term { return make(JAlpha{f(x.value, 0)}); },
          [&](const JExt& x) -> Term {
            return make(JExt{f(x.point, 0), f(x.fn, 0), f(x.arg, 0)});
          },
          [&](const JIsExt& x) -> Term {
            return make(JIsExt{f(x.point, 0), f(x.fn, 0), f(x.dom, 0)});
          },
          [&](const JInd& x) -> Term {
            return make(JInd{f(x.motive, 0), f(x.onAlpha, 0), f(x.onExt, 0), f(x.onCoh, 0),
                             f(x.scrutinee, 0)});
          },
          [&](const Const& x) -> Term { return make(Const{x.name}); },
          [&](const Ann& x) -> Term { return make(Ann{f(x.term, 0), f(x.type, 0)}); },
          [&](const TypeK&) -> Term { return make(TypeK{}); },
      },
      t->data);
}

}  // namespace

Term shift(const Term& t, int delta, int cutoff) {
  if (delta == 0) return t;
  if (const auto* v = as<Var>(t)) {
    return v->index >= cutoff ? build::var(v->index + delta) : t;
  }
  bool closed_enough = true;  // shift is the identity on subtrees with no free vars
  each_child(t, [&](const Term&, int) { closed_enough = false; });
  if (closed_enough) return t;
  return map_children(t, [&](const Term& c, int binders) {
    return shift(c, delta, cutoff + binders);
  });
}

bool is_kind_syntax(const Term& t) {
  if (as<TypeK>(t)) return true;
  if (const auto* p = as<Pi>(t)) return is_kind_syntax(p->cod);
  return false;
}

}  // namespace modal::tt
