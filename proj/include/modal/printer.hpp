#pragma once

#include <string>

#include "modal/term.hpp"

namespace modal::tt {

// Render a term as concrete syntax.  Binder names are generated
// deterministically from binder depth (x0, x1, ...), so printing is a pure
// function of the term; parsing the result yields the identical term.
// `ambient_binders` names the free variables of an open term: a free Var(i)
// prints as the name the (ambient_binders - 1 - i)-th enclosing binder would
// have been given.
std::string print_term(const Term& t, int ambient_binders = 0);

}  // namespace modal::tt
