#pragma once

#include <string>
#include <vector>

namespace qpesim {

/// Outcome of one acceptance check.
struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail; ///< worst margins, counts, wall time
    double seconds = 0.0;
};

/// The pinned acceptance suite: ten checks covering kernel completeness,
/// analytic/statevector agreement, exact-phase recovery, good-set bounds,
/// register sizing, the failure inequality across the full configuration
/// grid, convergence order, threshold stability under grid refinement, the
/// sampled end-to-end success rate, and the closed-form eigensolver oracle.
/// Criterion failures are reported in the results, not thrown; only
/// environment-level errors propagate.
std::vector<CheckResult> run_acceptance_checks();

} // namespace qpesim
