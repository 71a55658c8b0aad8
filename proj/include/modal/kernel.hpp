#pragma once

#include <exception>
#include <string>
#include <vector>

#include "modal/parser.hpp"
#include "modal/term.hpp"

namespace modal::tt {

// Typing context: a telescope of types, outermost entry first.  Var(0) refers
// to the innermost (last) entry; each entry may mention the variables bound
// before it.  Entries are types, never kinds: there are no type variables.
using Context = std::vector<Term>;

struct TypeError : std::exception {
  enum class Kind {
    UnboundVariable,
    NotAFunction,
    NotAPair,
    Mismatch,
    IllFormedFamily,
    BoundaryMismatch,
  };
  Kind kind;
  std::string detail;           // human-readable summary
  Term at;                      // subterm where the error arose
  Term expected, actual;        // normal forms, when meaningful (else null)
  std::vector<Term> context;    // context types at the error site (normal forms)
  std::string rendered;
  const char* what() const noexcept override { return rendered.c_str(); }
};

const char* type_error_kind_name(TypeError::Kind k);

// Bidirectional checking.  infer returns the type (or kind, for annotated
// type families) of t in normal form; check validates t against an expected
// type, which is itself validated first.  Both throw TypeError.
Term infer(const Context& ctx, const Term& t);
void check(const Context& ctx, const Term& t, const Term& type);

// Definitional equality at a type: both sides are checked against ty, then
// convertibility is decided by comparing read-back normal forms, which bakes
// in beta for all eliminators and eta for Pi and Sigma.
bool defeq(const Context& ctx, const Term& a, const Term& b, const Term& ty);

// Normalization by evaluation: beta-normal, eta-long for Pi and Sigma.
// t must check against ty (which may be a kind, for normalizing families).
Term normalize(const Context& ctx, const Term& t, const Term& ty);

// Batch entry point: check every definition of a parsed file, reporting the
// first failure (if any) with its definition name and source line.
struct FileCheckResult {
  bool ok = false;
  std::string failed_def;  // empty when ok
  int line = 0;
  std::string message;     // "ok (N definitions)" or the rendered error
};
FileCheckResult check_file(const SourceFile& file);

}  // namespace modal::tt
