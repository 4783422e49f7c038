#pragma once

// The property/oracle verification suite: twelve numbered checks covering the
// filter algebra, the estimator statistics, the continuous-time model, the
// convergence behavior and the reduction identities. Every tolerance and
// every hyperparameter is pinned here, in code. The suite backs both the
// `verify` CLI subcommand and the acceptance test binary; each check prints
// one [PASS]/[FAIL] line with the measured numbers as it completes.

#include <iosfwd>
#include <string>
#include <vector>

namespace sgdf {

struct CriterionResult {
    int index = 0;        // 1-based position in the suite
    std::string name;     // short kebab-case label
    bool passed = false;
    std::string detail;   // measured values vs required bounds
};

struct AcceptanceReport {
    std::vector<CriterionResult> results;
    bool all_passed() const;
    std::size_t failed_count() const;
};

// Runs every check in order, streaming one result line each to `out`.
AcceptanceReport run_acceptance_suite(std::ostream& out);

}  // namespace sgdf
