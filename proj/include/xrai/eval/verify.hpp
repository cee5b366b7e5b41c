#pragma once

#include <iosfwd>

namespace xrai::eval {

/// Fast self-checks against brute-force and analytic oracles: encoding
/// anchors, exhaustive boolean round trips, monomial counts, finite-difference
/// gradients, least-squares recovery and truth-table distillation. Prints one
/// PASS/FAIL line per check; returns true if all pass.
bool run_oracle_suite(std::ostream& out);

}  // namespace xrai::eval
