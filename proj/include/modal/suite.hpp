#pragma once

#include <iosfwd>
#include <string>

namespace modal {

// Runs the full acceptance suite against the repository rooted at `root`
// (which must contain stdlib/ and tests/mutations/).  Prints one PASS/FAIL
// line per criterion to `out`; under `verbose` each line carries the check
// count and elapsed time, and failures list their first witnesses.  Honors
// the MODAL_SUITE_BUDGET environment variable (seconds): a low budget
// shrinks the exhaustive-suite guards and says so on the first line.
// Returns the number of failed criteria (0 = all passed).
int run_acceptance(const std::string& root, std::ostream& out, bool verbose);

}  // namespace modal
