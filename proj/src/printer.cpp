#include "modal/printer.hpp"

#include <string>
#include <vector>

namespace modal::tt {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Precedence levels: arrow/fun/Sig bodies extend to the right and bind
// loosest; application binds tighter; everything else is self-delimiting.
enum Prec { LOW = 0, APP = 1, ATOM = 2 };

std::string binder_name(int level) { return "x" + std::to_string(level); }

std::string go(const Term& t, int depth, int prec);

std::string parens_if(bool b, std::string s) {
  return b ? "(" + std::move(s) + ")" : std::move(s);
}

// kw(a1, ..., an) — self-delimiting, so always an atom.
std::string call(const char* kw, int depth, std::initializer_list<Term> args) {
  std::string out(kw);
  out += "(";
  bool first = true;
  for (const auto& a : args) {
    if (!first) out += ", ";
    first = false;
    out += go(a, depth, LOW);
  }
  out += ")";
  return out;
}

std::string go(const Term& t, int depth, int prec) {
  return std::visit(
      overloaded{
          [&](const Var& x) -> std::string {
            int level = depth - 1 - x.index;
            if (level < 0) return "_v" + std::to_string(x.index);  // ill-scoped fallback
            return binder_name(level);
          },
          [&](const Pi& x) -> std::string {
            std::string s;
            if (occurs(x.cod, 0)) {
              s = "(" + binder_name(depth) + " : " + go(x.dom, depth, LOW) + ") -> " +
                  go(x.cod, depth + 1, LOW);
            } else {
              s = go(x.dom, depth, APP) + " -> " + go(x.cod, depth + 1, LOW);
            }
            return parens_if(prec > LOW, std::move(s));
          },
          [&](const Lam& x) -> std::string {
            std::string s =
                "fun " + binder_name(depth) + " => " + go(x.body, depth + 1, LOW);
            return parens_if(prec > LOW, std::move(s));
          },
          [&](const App& x) -> std::string {
            std::string s = go(x.fn, depth, APP) + " " + go(x.arg, depth, ATOM);
            return parens_if(prec > APP, std::move(s));
          },
          [&](const Sigma& x) -> std::string {
            std::string s = "Sig (" + binder_name(depth) + " : " + go(x.fst, depth, LOW) +
                            ") " + go(x.snd, depth + 1, LOW);
            return parens_if(prec > LOW, std::move(s));
          },
          [&](const Pair& x) -> std::string {
            return "(" + go(x.fst, depth, LOW) + ", " + go(x.snd, depth, LOW) + ")";
          },
          [&](const Fst& x) -> std::string { return call("fst", depth, {x.pair}); },
          [&](const Snd& x) -> std::string { return call("snd", depth, {x.pair}); },
          [&](const IdT& x) -> std::string {
            return call("Id", depth, {x.type, x.lhs, x.rhs});
          },
          [&](const Refl& x) -> std::string { return call("refl", depth, {x.point}); },
          [&](const J& x) -> std::string {
            return call("J", depth, {x.motive, x.base, x.target, x.path});
          },
          [&](const UnitT&) -> std::string { return "Unit"; },
          [&](const Star&) -> std::string { return "star"; },
          [&](const EmptyT&) -> std::string { return "Empty"; },
          [&](const Absurd& x) -> std::string {
            return call("absurd", depth, {x.motive, x.scrutinee});
          },
          [&](const SumT& x) -> std::string {
            return call("Sum", depth, {x.left, x.right});
          },
          [&](const Inl& x) -> std::string { return call("inl", depth, {x.value}); },
          [&](const Inr& x) -> std::string { return call("inr", depth, {x.value}); },
          [&](const Case& x) -> std::string {
            return call("case", depth, {x.motive, x.onLeft, x.onRight, x.scrutinee});
          },
          [&](const PushT& x) -> std::string {
            return call("Push", depth, {x.apex, x.left, x.right, x.toLeft, x.toRight});
          },
          [&](const PInl& x) -> std::string { return call("pinl", depth, {x.value}); },
          [&](const PInr& x) -> std::string { return call("pinr", depth, {x.value}); },
          [&](const PGlue& x) -> std::string { return call("pglue", depth, {x.point}); },
          [&](const PInd& x) -> std::string {
            return call("pind", depth,
                        {x.motive, x.onInl, x.onInr, x.onGlue, x.scrutinee});
          },
          [&](const JT& x) -> std::string {
            return call("JType", depth, {x.index, x.dom, x.cod, x.family, x.base});
          },
          [&](const JAlpha& x) -> std::string { return call("alpha", depth, {x.value}); },
          [&](const JExt& x) -> std::string {
            return call("ext", depth, {x.point, x.fn, x.arg});
          },
          [&](const JIsExt& x) -> std::string {
            return call("isext", depth, {x.point, x.fn, x.dom});
          },
          [&](const JInd& x) -> std::string {
            return call("jind", depth,
                        {x.motive, x.onAlpha, x.onExt, x.onCoh, x.scrutinee});
          },
          [&](const Const& x) -> std::string { return x.name; },
          [&](const Ann& x) -> std::string {
            // Double parens keep an annotation in domain position from being
            // read back as a dependent arrow binder.
            return "((" + go(x.term, depth, LOW) + " : " + go(x.type, depth, LOW) + "))";
          },
          [&](const TypeK&) -> std::string { return "Type"; },
      },
      t->data);
}

}  // namespace

std::string print_term(const Term& t, int ambient_binders) {
  return go(t, ambient_binders, LOW);
}

}  // namespace modal::tt
