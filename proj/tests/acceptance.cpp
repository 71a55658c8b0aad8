// Acceptance gate: runs the full suite against the source tree and prints
// one PASS/FAIL line per criterion.  Exit status 0 iff every criterion holds.

#include <cstdlib>
#include <iostream>

#include "modal/suite.hpp"

int main() {
  int failed = modal::run_acceptance(MODAL_SOURCE_DIR, std::cout, /*verbose=*/true);
  return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
