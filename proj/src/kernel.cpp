#include "modal/kernel.hpp"

#include <algorithm>
#include <functional>
#include <memory>
#include <stdexcept>
#include <utility>
#include <variant>

#include "modal/printer.hpp"

// Normalization by evaluation.  Terms evaluate into a semantic domain with
// closures; types direct read-back, which produces beta-normal, eta-long
// terms (eta for Pi and Sigma).  Neutral values carry their types so that
// read-back and stuck elimination never need a typing context.
//
// The checker elaborates as it goes: eliminations whose stuck forms need a
// type that their principal argument does not carry (the path of J, the
// scrutinee of the localization eliminator, axiom-constant spines) get an
// annotation inserted, and evaluation relies on those annotations.

namespace modal::tt {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void ice(const std::string& msg) {
  throw std::logic_error("kernel invariant violated: " + msg);
}

// ---------------------------------------------------------------------------
// Semantic domain
// ---------------------------------------------------------------------------

struct ValueNode;
using Value = std::shared_ptr<const ValueNode>;

struct EnvNode {
  Value v;
  std::shared_ptr<const EnvNode> next;
};
using Env = std::shared_ptr<const EnvNode>;

Env env_push(const Env& e, Value v) {
  return std::make_shared<const EnvNode>(EnvNode{std::move(v), e});
}

const Value& env_get(const Env& e, int index) {
  const EnvNode* n = e.get();
  while (index-- > 0 && n) n = n->next.get();
  if (!n) ice("environment lookup out of range");
  return n->v;
}

Value eval(const Term& t, const Env& env);

// A closure is either a suspended term or a host function; the latter is used
// when the checker manufactures types (eliminator argument types and the like).
struct Closure {
  std::variant<std::pair<Env, Term>, std::function<Value(const Value&)>> impl;
  Value operator()(const Value& v) const {
    if (const auto* tc = std::get_if<std::pair<Env, Term>>(&impl)) {
      return eval(tc->second, env_push(tc->first, v));
    }
    return std::get<std::function<Value(const Value&)>>(impl)(v);
  }
};

Closure term_closure(Env env, Term body) {
  return Closure{std::make_pair(std::move(env), std::move(body))};
}
Closure fn_closure(std::function<Value(const Value&)> f) { return Closure{std::move(f)}; }

struct NeutNode;
using Neut = std::shared_ptr<const NeutNode>;

struct VPi { Value dom; Closure cod; };
struct VLam { Closure body; };
struct VSigma { Value fst; Closure snd; };
struct VPair { Value fst, snd; };
struct VId { Value type, lhs, rhs; };
struct VRefl { Value point; };
struct VUnit {};
struct VStar {};
struct VEmpty {};
struct VSum { Value left, right; };
struct VInl { Value v; };
struct VInr { Value v; };
struct VPush { Value apex, left, right, toLeft, toRight; };
struct VPInl { Value v; };
struct VPInr { Value v; };
// The canonical path/extension constructors carry their type when it is
// known (from an annotation or a semantic construction site), because J and
// the localization eliminator block on them and the stuck form needs it.
// A null type means the value arose from an unannotated term; the evaluator
// falls back to the enclosing annotation in that case.
struct VPGlue { Value point; Value type; };
struct VJT { Value index, dom, cod, family, base; };
struct VJAlpha { Value v; };
struct VJExt { Value point, fn, arg; Value type; };
struct VJIsExt { Value point, fn, dom; Value type; };
struct VTypeK {};
struct VNeutral { Value type; Neut neut; };

struct ValueNode {
  std::variant<VPi, VLam, VSigma, VPair, VId, VRefl, VUnit, VStar, VEmpty, VSum, VInl,
               VInr, VPush, VPInl, VPInr, VPGlue, VJT, VJAlpha, VJExt, VJIsExt, VTypeK,
               VNeutral>
      data;
};

template <typename T>
Value mkv(T&& node) {
  return std::make_shared<ValueNode>(ValueNode{std::forward<T>(node)});
}

template <typename T>
const T* asv(const Value& v) {
  return v ? std::get_if<T>(&v->data) : nullptr;
}

// Stuck eliminations.  Heads that are themselves neutral are stored as the
// enclosing VNeutral value so their types travel with them.  J and the
// localization eliminator can also be stuck on canonical path/extension
// values; their nodes record the path/scrutinee type explicitly.
struct NVar { int level; };
struct NApp { Value fn, arg; };                       // fn: neutral of Pi type
struct NFst { Value pair; };                          // pair: neutral of Sigma type
struct NSnd { Value pair; };
struct NJ { Value motive, base, pathType, path; };    // pathType: VId
struct NCase { Value motive, onLeft, onRight, scrut; };  // motive VTypeK => type-level
struct NAbsurd { Value motive, scrut; };
struct NPInd { Value motive, onInl, onInr, onGlue, scrut; };
struct NJInd { Value motive, onAlpha, onExt, onCoh, scrutType, scrut; };
struct NConst { std::string name; std::vector<std::pair<Value, Value>> args; };  // (arg, its type)

struct NeutNode {
  std::variant<NVar, NApp, NFst, NSnd, NJ, NCase, NAbsurd, NPInd, NJInd, NConst> data;
};

template <typename T>
Neut mkn(T&& node) {
  return std::make_shared<NeutNode>(NeutNode{std::forward<T>(node)});
}

template <typename T>
const T* asn(const Neut& n) {
  return n ? std::get_if<T>(&n->data) : nullptr;
}

Value neutral(Value type, Neut n) { return mkv(VNeutral{std::move(type), std::move(n)}); }

Value fresh_var(const Value& type, int level) {
  return neutral(type, mkn(NVar{level}));
}

// Convenience builders for manufactured types.
Value vpi(Value dom, std::function<Value(const Value&)> cod) {
  return mkv(VPi{std::move(dom), fn_closure(std::move(cod))});
}
Value vtype() {
  static const Value t = mkv(VTypeK{});
  return t;
}
Value vlam(std::function<Value(const Value&)> f) { return mkv(VLam{fn_closure(std::move(f))}); }

// ---------------------------------------------------------------------------
// Eliminators on values
// ---------------------------------------------------------------------------

Value vapp(const Value& f, const Value& a) {
  if (const auto* l = asv<VLam>(f)) return l->body(a);
  if (const auto* n = asv<VNeutral>(f)) {
    const auto* pi = asv<VPi>(n->type);
    if (!pi) ice("application head is neutral but not of function type");
    return neutral(pi->cod(a), mkn(NApp{f, a}));
  }
  ice("application of a non-function value");
}

Value vapp2(const Value& f, const Value& a, const Value& b) { return vapp(vapp(f, a), b); }

Value vfst(const Value& p) {
  if (const auto* pr = asv<VPair>(p)) return pr->fst;
  if (const auto* n = asv<VNeutral>(p)) {
    const auto* sg = asv<VSigma>(n->type);
    if (!sg) ice("projection from neutral non-pair");
    return neutral(sg->fst, mkn(NFst{p}));
  }
  ice("projection from non-pair value");
}

Value vsnd(const Value& p) {
  if (const auto* pr = asv<VPair>(p)) return pr->snd;
  if (const auto* n = asv<VNeutral>(p)) {
    const auto* sg = asv<VSigma>(n->type);
    if (!sg) ice("projection from neutral non-pair");
    return neutral(sg->snd(vfst(p)), mkn(NSnd{p}));
  }
  ice("projection from non-pair value");
}

// J computes on refl and is stuck on every other path value (a neutral, a
// pushout glue path, a localization coherence path, or an axiom application).
Value vj(const Value& motive, const Value& base, const Value& pathType, const Value& path) {
  if (asv<VRefl>(path)) return base;
  const auto* idv = asv<VId>(pathType);
  if (!idv) ice("J path type is not an identity type");
  // Back-fill the type on a canonical path before it flows into the motive
  // closure or the stuck node, so later eliminations on it stay well-typed.
  Value p = path;
  if (const auto* g = asv<VPGlue>(path); g && !g->type) {
    p = mkv(VPGlue{g->point, pathType});
  } else if (const auto* ie = asv<VJIsExt>(path); ie && !ie->type) {
    p = mkv(VJIsExt{ie->point, ie->fn, ie->dom, pathType});
  }
  Value resultTy = vapp2(motive, idv->rhs, p);
  return neutral(resultTy, mkn(NJ{motive, base, pathType, p}));
}

// transport along a path in a family: J with the family-weakened motive.
Value vtransport(const Value& family, const Value& pathType, const Value& path,
                 const Value& u) {
  Value motive = vlam([family](const Value& y) {
    return vlam([family, y](const Value&) { return vapp(family, y); });
  });
  return vj(motive, u, pathType, path);
}

Value vcase(const Value& motive, const Value& l, const Value& r, const Value& s) {
  if (const auto* x = asv<VInl>(s)) return vapp(l, x->v);
  if (const auto* x = asv<VInr>(s)) return vapp(r, x->v);
  if (asv<VNeutral>(s)) {
    Value ty = asv<VTypeK>(motive) ? vtype() : vapp(motive, s);
    return neutral(ty, mkn(NCase{motive, l, r, s}));
  }
  ice("case scrutinee is not a sum value");
}

Value vabsurd(const Value& motive, const Value& s) {
  if (asv<VNeutral>(s)) return neutral(vapp(motive, s), mkn(NAbsurd{motive, s}));
  ice("absurd scrutinee is not neutral");
}

Value vpind(const Value& m, const Value& l, const Value& r, const Value& g, const Value& s) {
  if (const auto* x = asv<VPInl>(s)) return vapp(l, x->v);
  if (const auto* x = asv<VPInr>(s)) return vapp(r, x->v);
  if (asv<VNeutral>(s)) return neutral(vapp(m, s), mkn(NPInd{m, l, r, g, s}));
  ice("pushout eliminator scrutinee is not a pushout value");
}

// The localization eliminator computes judgmentally only on alpha; on an
// extension point (or a neutral) it is stuck.
Value vjind(const Value& p, const Value& n, const Value& r, const Value& s,
            const Value& scrutType, const Value& scrut) {
  if (const auto* x = asv<VJAlpha>(scrut)) return vapp(n, x->v);
  if (const auto* e = asv<VJExt>(scrut)) {
    Value z = e->type ? scrut : mkv(VJExt{e->point, e->fn, e->arg, scrutType});
    return neutral(vapp(p, z), mkn(NJInd{p, n, r, s, scrutType, z}));
  }
  if (asv<VNeutral>(scrut)) {
    return neutral(vapp(p, scrut), mkn(NJInd{p, n, r, s, scrutType, scrut}));
  }
  ice("localization eliminator scrutinee has unexpected shape");
}

// Argument types of an axiom-constant spine, recovered from the argument
// values and the overall type of the application.
std::vector<Value> axiom_arg_types(const std::string& name, const std::vector<Value>& args,
                                   const Value& resultType) {
  if (name == "funext") {
    const auto* idv = asv<VId>(resultType);
    const auto* pi = idv ? asv<VPi>(idv->type) : nullptr;
    if (!pi) ice("funext application whose type is not an identity of functions");
    Value f = idv->lhs, g = idv->rhs;
    Value dom = pi->dom;
    Closure cod = pi->cod;
    return {vpi(dom, [cod, f, g](const Value& x) {
      return mkv(VId{cod(x), vapp(f, x), vapp(g, x)});
    })};
  }
  if (name == "pglue-beta") {
    if (args.size() != 6) ice("pglue-beta spine arity");
    const Value& P = args[0];
    const Value& M = args[1];
    const auto* push = asv<VPush>(P);
    if (!push) ice("pglue-beta first argument is not a pushout type");
    Value A = push->apex, B = push->left, C = push->right, f = push->toLeft,
          g = push->toRight;
    Value tyP = vtype();
    Value tyM = vpi(P, [](const Value&) { return vtype(); });
    Value tyL = vpi(B, [M](const Value& b) { return vapp(M, mkv(VPInl{b})); });
    Value tyR = vpi(C, [M](const Value& c) { return vapp(M, mkv(VPInr{c})); });
    const Value& l = args[2];
    const Value& r = args[3];
    Value tyGlue = vpi(A, [P, M, l, r, f, g](const Value& a) {
      Value fa = vapp(f, a), ga = vapp(g, a);
      Value pathTy = mkv(VId{P, mkv(VPInl{fa}), mkv(VPInr{ga})});
      Value lhs = vtransport(M, pathTy, mkv(VPGlue{a, pathTy}), vapp(l, fa));
      return mkv(VId{vapp(M, mkv(VPInr{ga})), lhs, vapp(r, ga)});
    });
    Value tyA = A;
    return {tyP, tyM, tyL, tyR, tyGlue, tyA};
  }
  ice("unknown axiom constant " + name);
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

// Splits nested applications into head and arguments (outermost last).
void spine_of(const Term& t, Term& head, std::vector<Term>& args) {
  const Term* cur = &t;
  while (const auto* ap = as<App>(*cur)) {
    args.push_back(ap->arg);
    cur = &ap->fn;
  }
  head = *cur;
  std::reverse(args.begin(), args.end());
}

Value eval(const Term& t, const Env& env) {
  return std::visit(
      overloaded{
          [&](const Var& x) -> Value { return env_get(env, x.index); },
          [&](const Pi& x) -> Value {
            return mkv(VPi{eval(x.dom, env), term_closure(env, x.cod)});
          },
          [&](const Lam& x) -> Value { return mkv(VLam{term_closure(env, x.body)}); },
          [&](const App& x) -> Value { return vapp(eval(x.fn, env), eval(x.arg, env)); },
          [&](const Sigma& x) -> Value {
            return mkv(VSigma{eval(x.fst, env), term_closure(env, x.snd)});
          },
          [&](const Pair& x) -> Value {
            return mkv(VPair{eval(x.fst, env), eval(x.snd, env)});
          },
          [&](const Fst& x) -> Value { return vfst(eval(x.pair, env)); },
          [&](const Snd& x) -> Value { return vsnd(eval(x.pair, env)); },
          [&](const IdT& x) -> Value {
            return mkv(VId{eval(x.type, env), eval(x.lhs, env), eval(x.rhs, env)});
          },
          [&](const Refl& x) -> Value { return mkv(VRefl{eval(x.point, env)}); },
          [&](const J& x) -> Value {
            Value pv = eval(x.path, env);
            if (asv<VRefl>(pv)) return eval(x.base, env);
            // A stuck path is a neutral or a canonical path constructor; both
            // carry their type, with the term's annotation as a fallback.
            Value pathTy;
            if (const auto* n = asv<VNeutral>(pv)) {
              pathTy = n->type;
            } else if (const auto* g = asv<VPGlue>(pv); g && g->type) {
              pathTy = g->type;
            } else if (const auto* ie = asv<VJIsExt>(pv); ie && ie->type) {
              pathTy = ie->type;
            } else if (const auto* ann = as<Ann>(x.path)) {
              pathTy = eval(ann->type, env);
            } else {
              ice("unannotated stuck J path; term was not elaborated");
            }
            return vj(eval(x.motive, env), eval(x.base, env), pathTy, pv);
          },
          [&](const UnitT&) -> Value { return mkv(VUnit{}); },
          [&](const Star&) -> Value { return mkv(VStar{}); },
          [&](const EmptyT&) -> Value { return mkv(VEmpty{}); },
          [&](const Absurd& x) -> Value {
            return vabsurd(eval(x.motive, env), eval(x.scrutinee, env));
          },
          [&](const SumT& x) -> Value {
            return mkv(VSum{eval(x.left, env), eval(x.right, env)});
          },
          [&](const Inl& x) -> Value { return mkv(VInl{eval(x.value, env)}); },
          [&](const Inr& x) -> Value { return mkv(VInr{eval(x.value, env)}); },
          [&](const Case& x) -> Value {
            return vcase(eval(x.motive, env), eval(x.onLeft, env), eval(x.onRight, env),
                         eval(x.scrutinee, env));
          },
          [&](const PushT& x) -> Value {
            return mkv(VPush{eval(x.apex, env), eval(x.left, env), eval(x.right, env),
                             eval(x.toLeft, env), eval(x.toRight, env)});
          },
          [&](const PInl& x) -> Value { return mkv(VPInl{eval(x.value, env)}); },
          [&](const PInr& x) -> Value { return mkv(VPInr{eval(x.value, env)}); },
          [&](const PGlue& x) -> Value { return mkv(VPGlue{eval(x.point, env)}); },
          [&](const PInd& x) -> Value {
            return vpind(eval(x.motive, env), eval(x.onInl, env), eval(x.onInr, env),
                         eval(x.onGlue, env), eval(x.scrutinee, env));
          },
          [&](const JT& x) -> Value {
            return mkv(VJT{eval(x.index, env), eval(x.dom, env), eval(x.cod, env),
                           eval(x.family, env), eval(x.base, env)});
          },
          [&](const JAlpha& x) -> Value { return mkv(VJAlpha{eval(x.value, env)}); },
          [&](const JExt& x) -> Value {
            return mkv(VJExt{eval(x.point, env), eval(x.fn, env), eval(x.arg, env)});
          },
          [&](const JIsExt& x) -> Value {
            return mkv(VJIsExt{eval(x.point, env), eval(x.fn, env), eval(x.dom, env)});
          },
          [&](const JInd& x) -> Value {
            Value zv = eval(x.scrutinee, env);
            if (const auto* a = asv<VJAlpha>(zv)) return vapp(eval(x.onAlpha, env), a->v);
            Value zty;
            if (const auto* n = asv<VNeutral>(zv)) {
              zty = n->type;
            } else if (const auto* e = asv<VJExt>(zv); e && e->type) {
              zty = e->type;
            } else if (const auto* ann = as<Ann>(x.scrutinee)) {
              zty = eval(ann->type, env);
            } else {
              ice("unannotated stuck localization eliminator scrutinee");
            }
            return vjind(eval(x.motive, env), eval(x.onAlpha, env), eval(x.onExt, env),
                         eval(x.onCoh, env), zty, zv);
          },
          [&](const Const&) -> Value {
            ice("axiom constant evaluated outside an annotated spine");
          },
          [&](const Ann& x) -> Value {
            Term head;
            std::vector<Term> argTerms;
            spine_of(x.term, head, argTerms);
            if (const auto* c = as<Const>(head)) {
              std::vector<Value> args;
              args.reserve(argTerms.size());
              for (const auto& a : argTerms) args.push_back(eval(a, env));
              Value resultTy = eval(x.type, env);
              std::vector<Value> tys = axiom_arg_types(c->name, args, resultTy);
              std::vector<std::pair<Value, Value>> zipped;
              for (size_t i = 0; i < args.size(); ++i) zipped.emplace_back(args[i], tys[i]);
              return neutral(resultTy, mkn(NConst{c->name, std::move(zipped)}));
            }
            // Annotated canonical path/extension constructors keep their type
            // in the value, so eliminators stuck on them stay well-typed even
            // after the value is substituted into a closure body.
            if (const auto* pg = as<PGlue>(x.term)) {
              return mkv(VPGlue{eval(pg->point, env), eval(x.type, env)});
            }
            if (const auto* je = as<JExt>(x.term)) {
              return mkv(VJExt{eval(je->point, env), eval(je->fn, env),
                               eval(je->arg, env), eval(x.type, env)});
            }
            if (const auto* ji = as<JIsExt>(x.term)) {
              return mkv(VJIsExt{eval(ji->point, env), eval(ji->fn, env),
                                 eval(ji->dom, env), eval(x.type, env)});
            }
            return eval(x.term, env);
          },
          [&](const TypeK&) -> Value { return vtype(); },
      },
      t->data);
}

// ---------------------------------------------------------------------------
// Shared type constructions for the higher eliminators
// ---------------------------------------------------------------------------

// dpath family P p u v  :=  Id(P(rhs), transport P p u, v)
Value dpath_type(const Value& family, const Value& pathType, const Value& path,
                 const Value& u, const Value& v) {
  const auto* idv = asv<VId>(pathType);
  if (!idv) ice("dpath over a non-identity path type");
  return mkv(VId{vapp(family, idv->rhs), vtransport(family, pathType, path, u), v});
}

// Pi(a : apex) dpath M (pglue a) (onInl (f a)) (onInr (g a))
Value pind_glue_type(const VPush& push, const Value& pushV, const Value& M, const Value& l,
                     const Value& r) {
  Value f = push.toLeft, g = push.toRight;
  return vpi(push.apex, [pushV, M, l, r, f, g](const Value& a) {
    Value fa = vapp(f, a), ga = vapp(g, a);
    Value pathTy = mkv(VId{pushV, mkv(VPInl{fa}), mkv(VPInr{ga})});
    return dpath_type(M, pathTy, mkv(VPGlue{a, pathTy}), vapp(l, fa), vapp(r, ga));
  });
}

// Pi(a) Pi(f : dom a -> JT) Pi(f' : Pi(b) P (f b)) Pi(c : cod a) P (ext a f c)
Value jind_ext_type(const VJT& jt, const Value& jtV, const Value& P) {
  Value dom = jt.dom, cod = jt.cod;
  return vpi(jt.index, [jtV, P, dom, cod](const Value& a) {
    Value Ba = vapp(dom, a), Ca = vapp(cod, a);
    return vpi(vpi(Ba, [jtV](const Value&) { return jtV; }),
               [jtV, P, Ba, Ca, a](const Value& f) {
                 return vpi(vpi(Ba, [P, f](const Value& b) { return vapp(P, vapp(f, b)); }),
                            [jtV, P, Ca, a, f](const Value&) {
                              return vpi(Ca, [jtV, P, a, f](const Value& c) {
                                return vapp(P, mkv(VJExt{a, f, c, jtV}));
                              });
                            });
               });
  });
}

// Pi(a) Pi(f) Pi(f') Pi(b) dpath P (isext a f b) (R a f f' (G a b)) (f' b)
Value jind_coh_type(const VJT& jt, const Value& jtV, const Value& P, const Value& R) {
  Value dom = jt.dom, cod = jt.cod, fam = jt.family;
  return vpi(jt.index, [jtV, P, R, dom, cod, fam](const Value& a) {
    Value Ba = vapp(dom, a);
    return vpi(vpi(Ba, [jtV](const Value&) { return jtV; }),
               [jtV, P, R, Ba, fam, a](const Value& f) {
                 return vpi(vpi(Ba, [P, f](const Value& b) { return vapp(P, vapp(f, b)); }),
                            [jtV, P, R, Ba, fam, a, f](const Value& f2) {
                              return vpi(Ba, [jtV, P, R, fam, a, f, f2](const Value& b) {
                                Value gab = vapp2(fam, a, b);
                                Value pathTy =
                                    mkv(VId{jtV, mkv(VJExt{a, f, gab, jtV}), vapp(f, b)});
                                Value u = vapp2(vapp2(R, a, f), f2, gab);
                                return dpath_type(P, pathTy, mkv(VJIsExt{a, f, b, pathTy}),
                                                  u, vapp(f2, b));
                              });
                            });
               });
  });
}

// ---------------------------------------------------------------------------
// Read-back
// ---------------------------------------------------------------------------

Term rb(const Value& v, const Value& ty, int depth);
Term rb_type(const Value& ty, int depth);
Term rb_neut(const Neut& n, int depth);

// Read-back for positions whose term must be re-inferable (a J path or a
// localization-eliminator scrutinee).  Canonical constructors annotate
// themselves in `rb`; a neutral is re-inferable from its spine unless it is
// headed by an axiom constant, which needs the annotation spelled out.
Term rb_with_type_if_needed(const Value& v, const Value& ty, int depth) {
  Term t = rb(v, ty, depth);
  if (const auto* n = asv<VNeutral>(v); n && asn<NConst>(n->neut)) {
    return build::ann(t, rb_type(ty, depth));
  }
  return t;
}

Term rb(const Value& v, const Value& ty, int depth) {
  if (const auto* pi = asv<VPi>(ty)) {
    Value x = fresh_var(pi->dom, depth);
    return build::lam(rb(vapp(v, x), pi->cod(x), depth + 1));
  }
  if (const auto* sg = asv<VSigma>(ty)) {
    Value f = vfst(v);
    return build::pair(rb(f, sg->fst, depth), rb(vsnd(v), sg->snd(f), depth));
  }
  if (asv<VTypeK>(ty)) return rb_type(v, depth);
  if (const auto* idv = asv<VId>(ty)) {
    if (const auto* r = asv<VRefl>(v)) return build::refl(rb(r->point, idv->type, depth));
    // Canonical paths read back annotated: they are not inferable, and any
    // later evaluation of the read-back term must recover their type.
    if (const auto* g = asv<VPGlue>(v)) {
      const auto* push = asv<VPush>(idv->type);
      if (!push) ice("glue path at a non-pushout identity type");
      return build::ann(build::pglue(rb(g->point, push->apex, depth)),
                        rb_type(ty, depth));
    }
    if (const auto* ie = asv<VJIsExt>(v)) {
      const auto* jt = asv<VJT>(idv->type);
      if (!jt) ice("extension coherence path at a non-localization identity type");
      Value Ba = vapp(jt->dom, ie->point);
      Value fnTy = vpi(Ba, [T = idv->type](const Value&) { return T; });
      return build::ann(
          build::jisext(rb(ie->point, jt->index, depth), rb(ie->fn, fnTy, depth),
                        rb(ie->dom, Ba, depth)),
          rb_type(ty, depth));
    }
    if (const auto* n = asv<VNeutral>(v)) return rb_neut(n->neut, depth);
    ice("unexpected value at identity type");
  }
  if (asv<VUnit>(ty)) {
    if (asv<VStar>(v)) return build::star();
    if (const auto* n = asv<VNeutral>(v)) return rb_neut(n->neut, depth);
    ice("unexpected value at unit type");
  }
  if (asv<VEmpty>(ty)) {
    if (const auto* n = asv<VNeutral>(v)) return rb_neut(n->neut, depth);
    ice("unexpected value at empty type");
  }
  if (const auto* sm = asv<VSum>(ty)) {
    if (const auto* x = asv<VInl>(v)) return build::inl(rb(x->v, sm->left, depth));
    if (const auto* x = asv<VInr>(v)) return build::inr(rb(x->v, sm->right, depth));
    if (const auto* n = asv<VNeutral>(v)) return rb_neut(n->neut, depth);
    ice("unexpected value at sum type");
  }
  if (const auto* push = asv<VPush>(ty)) {
    if (const auto* x = asv<VPInl>(v)) return build::pinl(rb(x->v, push->left, depth));
    if (const auto* x = asv<VPInr>(v)) return build::pinr(rb(x->v, push->right, depth));
    if (const auto* n = asv<VNeutral>(v)) return rb_neut(n->neut, depth);
    ice("unexpected value at pushout type");
  }
  if (const auto* jt = asv<VJT>(ty)) {
    if (const auto* x = asv<VJAlpha>(v)) return build::jalpha(rb(x->v, jt->base, depth));
    if (const auto* x = asv<VJExt>(v)) {
      Value Ba = vapp(jt->dom, x->point);
      Value fnTy = vpi(Ba, [T = ty](const Value&) { return T; });
      return build::ann(
          build::jext(rb(x->point, jt->index, depth), rb(x->fn, fnTy, depth),
                      rb(x->arg, vapp(jt->cod, x->point), depth)),
          rb_type(ty, depth));
    }
    if (const auto* n = asv<VNeutral>(v)) return rb_neut(n->neut, depth);
    ice("unexpected value at localization type");
  }
  if (asv<VNeutral>(ty)) {
    // Stuck type (a type-level case on a neutral): inhabitants are neutral.
    if (const auto* n = asv<VNeutral>(v)) return rb_neut(n->neut, depth);
    ice("canonical value at a stuck type");
  }
  ice("read-back at a non-type value");
}

Term rb_type(const Value& ty, int depth) {
  if (const auto* pi = asv<VPi>(ty)) {
    Value x = fresh_var(pi->dom, depth);
    return build::pi(rb_type(pi->dom, depth), rb_type(pi->cod(x), depth + 1));
  }
  if (const auto* sg = asv<VSigma>(ty)) {
    Value x = fresh_var(sg->fst, depth);
    return build::sigma(rb_type(sg->fst, depth), rb_type(sg->snd(x), depth + 1));
  }
  if (const auto* idv = asv<VId>(ty)) {
    return build::id(rb_type(idv->type, depth), rb(idv->lhs, idv->type, depth),
                     rb(idv->rhs, idv->type, depth));
  }
  if (asv<VUnit>(ty)) return build::unit();
  if (asv<VEmpty>(ty)) return build::empty();
  if (asv<VTypeK>(ty)) return build::type_kind();
  if (const auto* sm = asv<VSum>(ty)) {
    return build::sum(rb_type(sm->left, depth), rb_type(sm->right, depth));
  }
  if (const auto* push = asv<VPush>(ty)) {
    Value fTy = vpi(push->apex, [B = push->left](const Value&) { return B; });
    Value gTy = vpi(push->apex, [C = push->right](const Value&) { return C; });
    return build::push(rb_type(push->apex, depth), rb_type(push->left, depth),
                       rb_type(push->right, depth), rb(push->toLeft, fTy, depth),
                       rb(push->toRight, gTy, depth));
  }
  if (const auto* jt = asv<VJT>(ty)) {
    Value famKind = vpi(jt->index, [](const Value&) { return vtype(); });
    Value gTy = vpi(jt->index, [B = jt->dom, C = jt->cod](const Value& a) {
      return vpi(vapp(B, a), [C, a](const Value&) { return vapp(C, a); });
    });
    return build::jt(rb_type(jt->index, depth), rb(jt->dom, famKind, depth),
                     rb(jt->cod, famKind, depth), rb(jt->family, gTy, depth),
                     rb_type(jt->base, depth));
  }
  if (const auto* n = asv<VNeutral>(ty)) return rb_neut(n->neut, depth);
  ice("read-back of a non-type value as a type");
}

Term rb_neut(const Neut& n, int depth) {
  return std::visit(
      overloaded{
          [&](const NVar& x) -> Term {
            int index = depth - 1 - x.level;
            if (index < 0) ice("variable escaped its scope during read-back");
            return build::var(index);
          },
          [&](const NApp& x) -> Term {
            const auto* fn = asv<VNeutral>(x.fn);
            const auto* pi = fn ? asv<VPi>(fn->type) : nullptr;
            if (!pi) ice("stuck application head is not a neutral function");
            return build::app(rb_neut(fn->neut, depth), rb(x.arg, pi->dom, depth));
          },
          [&](const NFst& x) -> Term {
            const auto* p = asv<VNeutral>(x.pair);
            if (!p) ice("stuck projection head is not neutral");
            return build::fst(rb_neut(p->neut, depth));
          },
          [&](const NSnd& x) -> Term {
            const auto* p = asv<VNeutral>(x.pair);
            if (!p) ice("stuck projection head is not neutral");
            return build::snd(rb_neut(p->neut, depth));
          },
          [&](const NJ& x) -> Term {
            const auto* idv = asv<VId>(x.pathType);
            if (!idv) ice("stuck J path type is not an identity");
            Value A = idv->type, lhs = idv->lhs;
            Value motiveKind = vpi(A, [A, lhs](const Value& y) {
              return vpi(mkv(VId{A, lhs, y}), [](const Value&) { return vtype(); });
            });
            Value baseTy = vapp2(x.motive, lhs, mkv(VRefl{lhs}));
            return build::j(rb(x.motive, motiveKind, depth), rb(x.base, baseTy, depth),
                            rb(idv->rhs, A, depth),
                            rb_with_type_if_needed(x.path, x.pathType, depth));
          },
          [&](const NCase& x) -> Term {
            const auto* sn = asv<VNeutral>(x.scrut);
            const auto* sm = sn ? asv<VSum>(sn->type) : nullptr;
            if (!sm) ice("stuck case scrutinee is not a neutral sum");
            Value L = sm->left, R = sm->right;
            if (asv<VTypeK>(x.motive)) {
              Value famL = vpi(L, [](const Value&) { return vtype(); });
              Value famR = vpi(R, [](const Value&) { return vtype(); });
              return build::case_(build::type_kind(), rb(x.onLeft, famL, depth),
                                  rb(x.onRight, famR, depth), rb_neut(sn->neut, depth));
            }
            Value motiveKind = vpi(sn->type, [](const Value&) { return vtype(); });
            Value lTy = vpi(L, [m = x.motive](const Value& v) {
              return vapp(m, mkv(VInl{v}));
            });
            Value rTy = vpi(R, [m = x.motive](const Value& v) {
              return vapp(m, mkv(VInr{v}));
            });
            return build::case_(rb(x.motive, motiveKind, depth), rb(x.onLeft, lTy, depth),
                                rb(x.onRight, rTy, depth), rb_neut(sn->neut, depth));
          },
          [&](const NAbsurd& x) -> Term {
            const auto* sn = asv<VNeutral>(x.scrut);
            if (!sn) ice("stuck absurd scrutinee is not neutral");
            Value motiveKind = vpi(mkv(VEmpty{}), [](const Value&) { return vtype(); });
            return build::absurd(rb(x.motive, motiveKind, depth), rb_neut(sn->neut, depth));
          },
          [&](const NPInd& x) -> Term {
            const auto* sn = asv<VNeutral>(x.scrut);
            const auto* push = sn ? asv<VPush>(sn->type) : nullptr;
            if (!push) ice("stuck pushout eliminator scrutinee is not neutral");
            Value motiveKind = vpi(sn->type, [](const Value&) { return vtype(); });
            Value lTy = vpi(push->left, [m = x.motive](const Value& b) {
              return vapp(m, mkv(VPInl{b}));
            });
            Value rTy = vpi(push->right, [m = x.motive](const Value& c) {
              return vapp(m, mkv(VPInr{c}));
            });
            Value gTy = pind_glue_type(*push, sn->type, x.motive, x.onInl, x.onInr);
            return build::pind(rb(x.motive, motiveKind, depth), rb(x.onInl, lTy, depth),
                               rb(x.onInr, rTy, depth), rb(x.onGlue, gTy, depth),
                               rb_neut(sn->neut, depth));
          },
          [&](const NJInd& x) -> Term {
            const auto* jt = asv<VJT>(x.scrutType);
            if (!jt) ice("stuck localization eliminator scrutinee type");
            Value motiveKind = vpi(x.scrutType, [](const Value&) { return vtype(); });
            Value nTy = vpi(jt->base, [p = x.motive](const Value& v) {
              return vapp(p, mkv(VJAlpha{v}));
            });
            Value rTy = jind_ext_type(*jt, x.scrutType, x.motive);
            Value sTy = jind_coh_type(*jt, x.scrutType, x.motive, x.onExt);
            return build::jind(rb(x.motive, motiveKind, depth), rb(x.onAlpha, nTy, depth),
                               rb(x.onExt, rTy, depth), rb(x.onCoh, sTy, depth),
                               rb_with_type_if_needed(x.scrut, x.scrutType, depth));
          },
          [&](const NConst& x) -> Term {
            Term t = build::constant(x.name);
            for (const auto& [arg, ty] : x.args) t = build::app(t, rb(arg, ty, depth));
            return t;
          },
      },
      n->data);
}

bool conv(const Value& a, const Value& b, const Value& ty, int depth) {
  return term_eq(rb(a, ty, depth), rb(b, ty, depth));
}

bool conv_type(const Value& a, const Value& b, int depth) {
  return term_eq(rb_type(a, depth), rb_type(b, depth));
}

// ---------------------------------------------------------------------------
// Checking contexts and errors
// ---------------------------------------------------------------------------

struct Sem {
  std::vector<Value> types;  // by level (outermost first)
  Env env;                   // by index (innermost first)
  int depth() const { return static_cast<int>(types.size()); }
  Sem extended(const Value& ty) const {
    Sem out = *this;
    out.env = env_push(env, fresh_var(ty, depth()));
    out.types.push_back(ty);
    return out;
  }
};

[[noreturn]] void fail(const Sem& sem, TypeError::Kind kind, std::string detail, Term at,
                       Term expected = nullptr, Term actual = nullptr) {
  TypeError err;
  err.kind = kind;
  err.detail = std::move(detail);
  err.at = std::move(at);
  err.expected = std::move(expected);
  err.actual = std::move(actual);
  for (int i = 0; i < sem.depth(); ++i) err.context.push_back(rb_type(sem.types[i], i));
  std::string msg = std::string(type_error_kind_name(kind)) + ": " + err.detail;
  if (err.expected) msg += "\n  expected: " + print_term(err.expected, sem.depth());
  if (err.actual) msg += "\n  actual:   " + print_term(err.actual, sem.depth());
  if (err.at) msg += "\n  in:       " + print_term(err.at, sem.depth());
  for (int i = 0; i < sem.depth(); ++i) {
    msg += "\n  where x" + std::to_string(i) + " : " + print_term(err.context[i], i);
  }
  err.rendered = std::move(msg);
  throw err;
}

std::pair<Value, Term> infer_t(const Sem& sem, const Term& t);
Term check_t(const Sem& sem, const Term& t, const Value& ty);

Term check_type_t(const Sem& sem, const Term& t) {
  if (is_kind_syntax(t)) {
    fail(sem, TypeError::Kind::Mismatch, "a kind cannot be used as a type here", t);
  }
  auto [tv, te] = infer_t(sem, t);
  if (!asv<VTypeK>(tv)) {
    fail(sem, TypeError::Kind::Mismatch, "expected a type", t, build::type_kind(),
         rb_type(tv, sem.depth()));
  }
  return te;
}

Term check_kind_t(const Sem& sem, const Term& t) {
  if (as<TypeK>(t)) return t;
  if (const auto* p = as<Pi>(t)) {
    Term de = check_type_t(sem, p->dom);
    Term ce = check_kind_t(sem.extended(eval(de, sem.env)), p->cod);
    return build::pi(de, ce);
  }
  fail(sem, TypeError::Kind::Mismatch, "expected a kind (a Pi tower ending in Type)", t);
}

// Family positions (eliminator motives, the two type families of a
// localization type) report their failures as ill-formed families.
Term check_family_t(const Sem& sem, const Term& t, const Value& kind) {
  try {
    return check_t(sem, t, kind);
  } catch (TypeError& e) {
    if (e.kind == TypeError::Kind::Mismatch) {
      TypeError out = e;
      out.kind = TypeError::Kind::IllFormedFamily;
      out.rendered = std::string(type_error_kind_name(out.kind)) + ": " + out.rendered;
      throw out;
    }
    throw;
  }
}

// Induction data over path constructors reports mismatches as boundary errors.
Term check_boundary_t(const Sem& sem, const Term& t, const Value& ty) {
  try {
    return check_t(sem, t, ty);
  } catch (TypeError& e) {
    if (e.kind == TypeError::Kind::Mismatch) {
      TypeError out = e;
      out.kind = TypeError::Kind::BoundaryMismatch;
      out.rendered = std::string(type_error_kind_name(out.kind)) + ": " + out.rendered;
      throw out;
    }
    throw;
  }
}

Value kind_family_over(const Value& ty) {
  return vpi(ty, [](const Value&) { return vtype(); });
}

// ---------------------------------------------------------------------------
// Inference
// ---------------------------------------------------------------------------

std::pair<Value, Term> infer_axiom_spine(const Sem& sem, const Term& t, const Const& head,
                                         const std::vector<Term>& args) {
  if (head.name == "funext") {
    fail(sem, TypeError::Kind::Mismatch,
         "funext cannot be inferred; annotate it with its identity type", t);
  }
  if (head.name != "pglue-beta") {
    fail(sem, TypeError::Kind::Mismatch, "unknown constant '" + head.name + "'", t);
  }
  if (args.size() < 6) {
    fail(sem, TypeError::Kind::Mismatch,
         "pglue-beta expects 6 arguments (pushout type, motive, left, right, glue, point)",
         t);
  }
  Term Pe = check_type_t(sem, args[0]);
  Value Pv = eval(Pe, sem.env);
  const auto* push = asv<VPush>(Pv);
  if (!push) {
    fail(sem, TypeError::Kind::Mismatch, "pglue-beta needs a pushout type", args[0],
         nullptr, rb_type(Pv, sem.depth()));
  }
  Term Me = check_family_t(sem, args[1], kind_family_over(Pv));
  Value Mv = eval(Me, sem.env);
  Value lTy = vpi(push->left, [Mv](const Value& b) { return vapp(Mv, mkv(VPInl{b})); });
  Term le = check_t(sem, args[2], lTy);
  Value lv = eval(le, sem.env);
  Value rTy = vpi(push->right, [Mv](const Value& c) { return vapp(Mv, mkv(VPInr{c})); });
  Term re = check_t(sem, args[3], rTy);
  Value rv = eval(re, sem.env);
  Value gTy = pind_glue_type(*push, Pv, Mv, lv, rv);
  Term ge = check_boundary_t(sem, args[4], gTy);
  Value gv = eval(ge, sem.env);
  Term ae = check_t(sem, args[5], push->apex);
  Value av = eval(ae, sem.env);

  // The computed type: the dependent action of the eliminator on the glue
  // path at `a` is propositionally the supplied glue branch at `a`.
  Value fa = vapp(push->toLeft, av), ga = vapp(push->toRight, av);
  Value x0 = mkv(VPInl{fa}), y0 = mkv(VPInr{ga});
  Value pathTy = mkv(VId{Pv, x0, y0});
  Value pathV = mkv(VPGlue{av, pathTy});
  Value elim = vlam([Mv, lv, rv, gv](const Value& z) { return vpind(Mv, lv, rv, gv, z); });
  Value ex0 = vapp(elim, x0);
  Value apdMotive = vlam([Mv, Pv, x0, ex0, elim](const Value& y) {
    return vlam([Mv, Pv, x0, ex0, elim, y](const Value& q) {
      Value qTy = mkv(VId{Pv, x0, y});
      return mkv(VId{vapp(Mv, y), vtransport(Mv, qTy, q, ex0), vapp(elim, y)});
    });
  });
  Value apd = vj(apdMotive, mkv(VRefl{ex0}), pathTy, pathV);
  Value dTy = dpath_type(Mv, pathTy, pathV, vapp(lv, fa), vapp(rv, ga));
  Value resultTy = mkv(VId{dTy, apd, vapp(gv, av)});

  Term spine = build::constant(head.name);
  const Term elabArgs[6] = {Pe, Me, le, re, ge, ae};
  for (const auto& a : elabArgs) spine = build::app(spine, a);
  Term elab = build::ann(spine, rb_type(resultTy, sem.depth()));

  // Extra arguments beyond the six: keep applying.
  Value ty = resultTy;
  for (size_t i = 6; i < args.size(); ++i) {
    const auto* pi = asv<VPi>(ty);
    if (!pi) {
      fail(sem, TypeError::Kind::NotAFunction, "application of a non-function", t, nullptr,
           rb_type(ty, sem.depth()));
    }
    Term ae2 = check_t(sem, args[i], pi->dom);
    ty = pi->cod(eval(ae2, sem.env));
    elab = build::app(elab, ae2);
  }
  return {ty, elab};
}

std::pair<Value, Term> infer_t(const Sem& sem, const Term& t) {
  return std::visit(
      overloaded{
          [&](const Var& x) -> std::pair<Value, Term> {
            if (x.index < 0 || x.index >= sem.depth()) {
              fail(sem, TypeError::Kind::UnboundVariable,
                   "variable index " + std::to_string(x.index) + " exceeds context depth " +
                       std::to_string(sem.depth()),
                   t);
            }
            return {sem.types[sem.depth() - 1 - x.index], t};
          },
          [&](const App&) -> std::pair<Value, Term> {
            Term head;
            std::vector<Term> args;
            spine_of(t, head, args);
            if (const auto* c = as<Const>(head)) {
              return infer_axiom_spine(sem, t, *c, args);
            }
            const auto* ap = as<App>(t);
            auto [fty, fe] = infer_t(sem, ap->fn);
            const auto* pi = asv<VPi>(fty);
            if (!pi) {
              fail(sem, TypeError::Kind::NotAFunction, "application of a non-function",
                   ap->fn, nullptr, rb_type(fty, sem.depth()));
            }
            Term ae = check_t(sem, ap->arg, pi->dom);
            return {pi->cod(eval(ae, sem.env)), build::app(fe, ae)};
          },
          [&](const Fst& x) -> std::pair<Value, Term> {
            auto [pty, pe] = infer_t(sem, x.pair);
            const auto* sg = asv<VSigma>(pty);
            if (!sg) {
              fail(sem, TypeError::Kind::NotAPair, "first projection of a non-pair", x.pair,
                   nullptr, rb_type(pty, sem.depth()));
            }
            return {sg->fst, build::fst(pe)};
          },
          [&](const Snd& x) -> std::pair<Value, Term> {
            auto [pty, pe] = infer_t(sem, x.pair);
            const auto* sg = asv<VSigma>(pty);
            if (!sg) {
              fail(sem, TypeError::Kind::NotAPair, "second projection of a non-pair",
                   x.pair, nullptr, rb_type(pty, sem.depth()));
            }
            return {sg->snd(vfst(eval(pe, sem.env))), build::snd(pe)};
          },
          [&](const Ann& x) -> std::pair<Value, Term> {
            Term ce = is_kind_syntax(x.type) ? check_kind_t(sem, x.type)
                                             : check_type_t(sem, x.type);
            Value cv = eval(ce, sem.env);
            Term te = check_t(sem, x.term, cv);
            return {cv, build::ann(te, ce)};
          },
          [&](const Pi& x) -> std::pair<Value, Term> {
            Term de = check_type_t(sem, x.dom);
            Term ce = check_type_t(sem.extended(eval(de, sem.env)), x.cod);
            return {vtype(), build::pi(de, ce)};
          },
          [&](const Sigma& x) -> std::pair<Value, Term> {
            Term fe = check_type_t(sem, x.fst);
            Term se = check_type_t(sem.extended(eval(fe, sem.env)), x.snd);
            return {vtype(), build::sigma(fe, se)};
          },
          [&](const IdT& x) -> std::pair<Value, Term> {
            Term Ae = check_type_t(sem, x.type);
            Value Av = eval(Ae, sem.env);
            Term le = check_t(sem, x.lhs, Av);
            Term re = check_t(sem, x.rhs, Av);
            return {vtype(), build::id(Ae, le, re)};
          },
          [&](const UnitT&) -> std::pair<Value, Term> { return {vtype(), t}; },
          [&](const EmptyT&) -> std::pair<Value, Term> { return {vtype(), t}; },
          [&](const SumT& x) -> std::pair<Value, Term> {
            Term le = check_type_t(sem, x.left);
            Term re = check_type_t(sem, x.right);
            return {vtype(), build::sum(le, re)};
          },
          [&](const PushT& x) -> std::pair<Value, Term> {
            Term Ae = check_type_t(sem, x.apex);
            Value Av = eval(Ae, sem.env);
            Term Be = check_type_t(sem, x.left);
            Value Bv = eval(Be, sem.env);
            Term Ce = check_type_t(sem, x.right);
            Value Cv = eval(Ce, sem.env);
            Term fe = check_t(sem, x.toLeft, vpi(Av, [Bv](const Value&) { return Bv; }));
            Term ge = check_t(sem, x.toRight, vpi(Av, [Cv](const Value&) { return Cv; }));
            return {vtype(), build::push(Ae, Be, Ce, fe, ge)};
          },
          [&](const JT& x) -> std::pair<Value, Term> {
            Term Ae = check_type_t(sem, x.index);
            Value Av = eval(Ae, sem.env);
            Term Be = check_family_t(sem, x.dom, kind_family_over(Av));
            Value Bv = eval(Be, sem.env);
            Term Ce = check_family_t(sem, x.cod, kind_family_over(Av));
            Value Cv = eval(Ce, sem.env);
            Value gTy = vpi(Av, [Bv, Cv](const Value& a) {
              return vpi(vapp(Bv, a), [Cv, a](const Value&) { return vapp(Cv, a); });
            });
            Term Ge = check_t(sem, x.family, gTy);
            Term Xe = check_type_t(sem, x.base);
            return {vtype(), build::jt(Ae, Be, Ce, Ge, Xe)};
          },
          [&](const Star&) -> std::pair<Value, Term> { return {mkv(VUnit{}), t}; },
          [&](const Refl& x) -> std::pair<Value, Term> {
            // refl(p) : Id(A, p, p) is the most general type, so it infers.
            auto [pty, pe] = infer_t(sem, x.point);
            Value pv = eval(pe, sem.env);
            return {mkv(VId{pty, pv, pv}), build::refl(pe)};
          },
          [&](const J& x) -> std::pair<Value, Term> {
            auto [pty, pe] = infer_t(sem, x.path);
            const auto* idv = asv<VId>(pty);
            if (!idv) {
              fail(sem, TypeError::Kind::Mismatch, "J needs a path of identity type",
                   x.path, nullptr, rb_type(pty, sem.depth()));
            }
            Value A = idv->type, a = idv->lhs, b = idv->rhs;
            Term te = check_t(sem, x.target, A);
            Value tv = eval(te, sem.env);
            if (!conv(tv, b, A, sem.depth())) {
              fail(sem, TypeError::Kind::Mismatch,
                   "J target differs from the path's right endpoint", x.target,
                   rb(b, A, sem.depth()), rb(tv, A, sem.depth()));
            }
            Value motiveKind = vpi(A, [A, a](const Value& y) {
              return vpi(mkv(VId{A, a, y}), [](const Value&) { return vtype(); });
            });
            Term me = check_family_t(sem, x.motive, motiveKind);
            Value mv = eval(me, sem.env);
            Term be = check_t(sem, x.base, vapp2(mv, a, mkv(VRefl{a})));
            Value pv = eval(pe, sem.env);
            Term pathAnn = build::ann(pe, rb_type(pty, sem.depth()));
            return {vapp2(mv, b, pv), build::j(me, be, te, pathAnn)};
          },
          [&](const Absurd& x) -> std::pair<Value, Term> {
            auto [ety, ee] = infer_t(sem, x.scrutinee);
            if (!asv<VEmpty>(ety)) {
              fail(sem, TypeError::Kind::Mismatch, "absurd needs a proof of Empty",
                   x.scrutinee, build::empty(), rb_type(ety, sem.depth()));
            }
            Term me = check_family_t(sem, x.motive, kind_family_over(mkv(VEmpty{})));
            Value mv = eval(me, sem.env);
            return {vapp(mv, eval(ee, sem.env)), build::absurd(me, ee)};
          },
          [&](const Case& x) -> std::pair<Value, Term> {
            auto [sty, se] = infer_t(sem, x.scrutinee);
            const auto* sm = asv<VSum>(sty);
            if (!sm) {
              fail(sem, TypeError::Kind::Mismatch, "case needs a scrutinee of sum type",
                   x.scrutinee, nullptr, rb_type(sty, sem.depth()));
            }
            Value sv = eval(se, sem.env);
            if (as<TypeK>(x.motive)) {
              // Large elimination into types, used for families over sums.
              Term le = check_family_t(sem, x.onLeft, kind_family_over(sm->left));
              Term re = check_family_t(sem, x.onRight, kind_family_over(sm->right));
              return {vtype(), build::case_(build::type_kind(), le, re, se)};
            }
            Term me = check_family_t(sem, x.motive, kind_family_over(sty));
            Value mv = eval(me, sem.env);
            Term le = check_t(sem, x.onLeft, vpi(sm->left, [mv](const Value& v) {
                                return vapp(mv, mkv(VInl{v}));
                              }));
            Term re = check_t(sem, x.onRight, vpi(sm->right, [mv](const Value& v) {
                                return vapp(mv, mkv(VInr{v}));
                              }));
            return {vapp(mv, sv), build::case_(me, le, re, se)};
          },
          [&](const PInd& x) -> std::pair<Value, Term> {
            auto [sty, se] = infer_t(sem, x.scrutinee);
            const auto* push = asv<VPush>(sty);
            if (!push) {
              fail(sem, TypeError::Kind::Mismatch,
                   "pushout eliminator needs a pushout scrutinee", x.scrutinee, nullptr,
                   rb_type(sty, sem.depth()));
            }
            Term me = check_family_t(sem, x.motive, kind_family_over(sty));
            Value mv = eval(me, sem.env);
            Term le = check_t(sem, x.onInl, vpi(push->left, [mv](const Value& b) {
                                return vapp(mv, mkv(VPInl{b}));
                              }));
            Value lv = eval(le, sem.env);
            Term re = check_t(sem, x.onInr, vpi(push->right, [mv](const Value& c) {
                                return vapp(mv, mkv(VPInr{c}));
                              }));
            Value rv = eval(re, sem.env);
            Value gTy = pind_glue_type(*push, sty, mv, lv, rv);
            Term ge = check_boundary_t(sem, x.onGlue, gTy);
            return {vapp(mv, eval(se, sem.env)), build::pind(me, le, re, ge, se)};
          },
          [&](const JInd& x) -> std::pair<Value, Term> {
            auto [zty, ze] = infer_t(sem, x.scrutinee);
            const auto* jt = asv<VJT>(zty);
            if (!jt) {
              fail(sem, TypeError::Kind::Mismatch,
                   "localization eliminator needs a localization scrutinee", x.scrutinee,
                   nullptr, rb_type(zty, sem.depth()));
            }
            Term pe = check_family_t(sem, x.motive, kind_family_over(zty));
            Value pv = eval(pe, sem.env);
            Term ne = check_t(sem, x.onAlpha, vpi(jt->base, [pv](const Value& v) {
                                return vapp(pv, mkv(VJAlpha{v}));
                              }));
            Term re = check_t(sem, x.onExt, jind_ext_type(*jt, zty, pv));
            Value rv = eval(re, sem.env);
            Term se2 = check_boundary_t(sem, x.onCoh, jind_coh_type(*jt, zty, pv, rv));
            Term zAnn = build::ann(ze, rb_type(zty, sem.depth()));
            return {vapp(pv, eval(ze, sem.env)),
                    build::jind(pe, ne, re, se2, zAnn)};
          },
          [&](const Const&) -> std::pair<Value, Term> {
            Term head;
            std::vector<Term> args;
            spine_of(t, head, args);
            return infer_axiom_spine(sem, t, *as<Const>(head), args);
          },
          [&](const TypeK&) -> std::pair<Value, Term> {
            fail(sem, TypeError::Kind::Mismatch,
                 "Type is a kind and cannot appear as a term", t);
          },
          [&](const auto&) -> std::pair<Value, Term> {
            fail(sem, TypeError::Kind::Mismatch,
                 "cannot infer a type for this term; add an annotation", t);
          },
      },
      t->data);
}

// ---------------------------------------------------------------------------
// Checking
// ---------------------------------------------------------------------------

Term check_t(const Sem& sem, const Term& t, const Value& ty) {
  // Checking against the Type kind means checking that t is a type.
  if (asv<VTypeK>(ty)) return check_type_t(sem, t);

  if (const auto* lam = as<Lam>(t)) {
    const auto* pi = asv<VPi>(ty);
    if (!pi) {
      fail(sem, TypeError::Kind::Mismatch, "lambda against a non-function type", t,
           rb_type(ty, sem.depth()));
    }
    Sem inner = sem.extended(pi->dom);
    Value x = fresh_var(pi->dom, sem.depth());
    Term body = check_t(inner, lam->body, pi->cod(x));
    return build::lam(body);
  }
  if (const auto* pr = as<Pair>(t)) {
    const auto* sg = asv<VSigma>(ty);
    if (!sg) {
      fail(sem, TypeError::Kind::Mismatch, "pair against a non-pair type", t,
           rb_type(ty, sem.depth()));
    }
    Term fe = check_t(sem, pr->fst, sg->fst);
    Term se = check_t(sem, pr->snd, sg->snd(eval(fe, sem.env)));
    return build::pair(fe, se);
  }
  if (const auto* r = as<Refl>(t)) {
    const auto* idv = asv<VId>(ty);
    if (!idv) {
      fail(sem, TypeError::Kind::Mismatch, "refl against a non-identity type", t,
           rb_type(ty, sem.depth()));
    }
    Term pe = check_t(sem, r->point, idv->type);
    Value pv = eval(pe, sem.env);
    if (!conv(pv, idv->lhs, idv->type, sem.depth()) ||
        !conv(pv, idv->rhs, idv->type, sem.depth())) {
      fail(sem, TypeError::Kind::Mismatch,
           "refl point does not match both endpoints definitionally", t,
           rb_type(ty, sem.depth()), rb(pv, idv->type, sem.depth()));
    }
    return build::refl(pe);
  }
  if (const auto* il = as<Inl>(t)) {
    const auto* sm = asv<VSum>(ty);
    if (!sm) {
      fail(sem, TypeError::Kind::Mismatch, "inl against a non-sum type", t,
           rb_type(ty, sem.depth()));
    }
    return build::inl(check_t(sem, il->value, sm->left));
  }
  if (const auto* ir = as<Inr>(t)) {
    const auto* sm = asv<VSum>(ty);
    if (!sm) {
      fail(sem, TypeError::Kind::Mismatch, "inr against a non-sum type", t,
           rb_type(ty, sem.depth()));
    }
    return build::inr(check_t(sem, ir->value, sm->right));
  }
  if (const auto* pl = as<PInl>(t)) {
    const auto* push = asv<VPush>(ty);
    if (!push) {
      fail(sem, TypeError::Kind::Mismatch, "pinl against a non-pushout type", t,
           rb_type(ty, sem.depth()));
    }
    return build::pinl(check_t(sem, pl->value, push->left));
  }
  if (const auto* prr = as<PInr>(t)) {
    const auto* push = asv<VPush>(ty);
    if (!push) {
      fail(sem, TypeError::Kind::Mismatch, "pinr against a non-pushout type", t,
           rb_type(ty, sem.depth()));
    }
    return build::pinr(check_t(sem, prr->value, push->right));
  }
  if (const auto* pg = as<PGlue>(t)) {
    const auto* idv = asv<VId>(ty);
    const auto* push = idv ? asv<VPush>(idv->type) : nullptr;
    if (!push) {
      fail(sem, TypeError::Kind::Mismatch,
           "pglue against something other than an identity in a pushout", t,
           rb_type(ty, sem.depth()));
    }
    Term ae = check_t(sem, pg->point, push->apex);
    Value av = eval(ae, sem.env);
    Value wantL = mkv(VPInl{vapp(push->toLeft, av)});
    Value wantR = mkv(VPInr{vapp(push->toRight, av)});
    if (!conv(idv->lhs, wantL, idv->type, sem.depth()) ||
        !conv(idv->rhs, wantR, idv->type, sem.depth())) {
      fail(sem, TypeError::Kind::Mismatch, "pglue endpoints do not match the pushout maps",
           t, rb_type(ty, sem.depth()));
    }
    return build::ann(build::pglue(ae), rb_type(ty, sem.depth()));
  }
  if (const auto* ja = as<JAlpha>(t)) {
    const auto* jt = asv<VJT>(ty);
    if (!jt) {
      fail(sem, TypeError::Kind::Mismatch, "alpha against a non-localization type", t,
           rb_type(ty, sem.depth()));
    }
    return build::jalpha(check_t(sem, ja->value, jt->base));
  }
  if (const auto* je = as<JExt>(t)) {
    const auto* jt = asv<VJT>(ty);
    if (!jt) {
      fail(sem, TypeError::Kind::Mismatch, "ext against a non-localization type", t,
           rb_type(ty, sem.depth()));
    }
    Term ae = check_t(sem, je->point, jt->index);
    Value av = eval(ae, sem.env);
    Term fe = check_t(sem, je->fn,
                      vpi(vapp(jt->dom, av), [T = ty](const Value&) { return T; }));
    Term ce = check_t(sem, je->arg, vapp(jt->cod, av));
    return build::ann(build::jext(ae, fe, ce), rb_type(ty, sem.depth()));
  }
  if (const auto* ji = as<JIsExt>(t)) {
    const auto* idv = asv<VId>(ty);
    const auto* jt = idv ? asv<VJT>(idv->type) : nullptr;
    if (!jt) {
      fail(sem, TypeError::Kind::Mismatch,
           "isext against something other than an identity in a localization type", t,
           rb_type(ty, sem.depth()));
    }
    Term ae = check_t(sem, ji->point, jt->index);
    Value av = eval(ae, sem.env);
    Term fe = check_t(sem, ji->fn,
                      vpi(vapp(jt->dom, av), [T = idv->type](const Value&) { return T; }));
    Value fv = eval(fe, sem.env);
    Term be = check_t(sem, ji->dom, vapp(jt->dom, av));
    Value bv = eval(be, sem.env);
    Value wantL = mkv(VJExt{av, fv, vapp2(jt->family, av, bv), idv->type});
    Value wantR = vapp(fv, bv);
    if (!conv(idv->lhs, wantL, idv->type, sem.depth()) ||
        !conv(idv->rhs, wantR, idv->type, sem.depth())) {
      fail(sem, TypeError::Kind::Mismatch,
           "isext endpoints do not match the extension and the extended map", t,
           rb_type(ty, sem.depth()));
    }
    return build::ann(build::jisext(ae, fe, be), rb_type(ty, sem.depth()));
  }

  // funext is checkable only, against an identity of functions.
  {
    Term head;
    std::vector<Term> args;
    spine_of(t, head, args);
    if (const auto* c = as<Const>(head); c && c->name == "funext") {
      const auto* idv = asv<VId>(ty);
      const auto* pi = idv ? asv<VPi>(idv->type) : nullptr;
      if (!pi || args.size() != 1) {
        fail(sem, TypeError::Kind::Mismatch,
             "funext takes one argument and proves an identity of functions", t,
             rb_type(ty, sem.depth()));
      }
      Value f = idv->lhs, g = idv->rhs;
      Closure cod = pi->cod;
      Value hTy = vpi(pi->dom, [cod, f, g](const Value& x) {
        return mkv(VId{cod(x), vapp(f, x), vapp(g, x)});
      });
      Term he = check_t(sem, args[0], hTy);
      Term spine = build::app(build::constant("funext"), he);
      return build::ann(spine, rb_type(ty, sem.depth()));
    }
  }

  auto [tv, te] = infer_t(sem, t);
  if (!conv_type(tv, ty, sem.depth())) {
    fail(sem, TypeError::Kind::Mismatch, "type mismatch", t, rb_type(ty, sem.depth()),
         rb_type(tv, sem.depth()));
  }
  return te;
}

Sem sem_of(const Context& ctx) {
  Sem sem;
  for (const Term& ty : ctx) {
    Term te = check_type_t(sem, ty);
    sem = sem.extended(eval(te, sem.env));
  }
  return sem;
}

}  // namespace

const char* type_error_kind_name(TypeError::Kind k) {
  switch (k) {
    case TypeError::Kind::UnboundVariable: return "UnboundVariable";
    case TypeError::Kind::NotAFunction: return "NotAFunction";
    case TypeError::Kind::NotAPair: return "NotAPair";
    case TypeError::Kind::Mismatch: return "Mismatch";
    case TypeError::Kind::IllFormedFamily: return "IllFormedFamily";
    case TypeError::Kind::BoundaryMismatch: return "BoundaryMismatch";
  }
  return "TypeError";
}

Term infer(const Context& ctx, const Term& t) {
  Sem sem = sem_of(ctx);
  auto [ty, te] = infer_t(sem, t);
  (void)te;
  return rb_type(ty, sem.depth());
}

void check(const Context& ctx, const Term& t, const Term& type) {
  Sem sem = sem_of(ctx);
  Term ce = is_kind_syntax(type) ? check_kind_t(sem, type) : check_type_t(sem, type);
  check_t(sem, t, eval(ce, sem.env));
}

bool defeq(const Context& ctx, const Term& a, const Term& b, const Term& ty) {
  Sem sem = sem_of(ctx);
  Term ce = is_kind_syntax(ty) ? check_kind_t(sem, ty) : check_type_t(sem, ty);
  Value tyV = eval(ce, sem.env);
  Term ae = check_t(sem, a, tyV);
  Term be = check_t(sem, b, tyV);
  return conv(eval(ae, sem.env), eval(be, sem.env), tyV, sem.depth());
}

Term normalize(const Context& ctx, const Term& t, const Term& ty) {
  Sem sem = sem_of(ctx);
  Term ce = is_kind_syntax(ty) ? check_kind_t(sem, ty) : check_type_t(sem, ty);
  Value tyV = eval(ce, sem.env);
  Term te = check_t(sem, t, tyV);
  return rb(eval(te, sem.env), tyV, sem.depth());
}

FileCheckResult check_file(const SourceFile& file) {
  FileCheckResult result;
  Sem sem;  // definitions are closed, so every check runs in the empty context
  for (const auto& def : file.defs) {
    try {
      Term ce = is_kind_syntax(def.classifier) ? check_kind_t(sem, def.classifier)
                                               : check_type_t(sem, def.classifier);
      check_t(sem, def.body, eval(ce, sem.env));
    } catch (const TypeError& e) {
      result.ok = false;
      result.failed_def = def.name;
      result.line = def.line;
      result.message = "definition '" + def.name + "' (line " + std::to_string(def.line) +
                       "): " + e.rendered;
      return result;
    }
  }
  result.ok = true;
  result.message = "ok (" + std::to_string(file.defs.size()) + " definitions)";
  return result;
}

}  // namespace modal::tt
