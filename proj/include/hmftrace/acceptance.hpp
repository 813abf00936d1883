#pragma once

#include <functional>
#include <string>
#include <vector>

namespace hmf {

struct CriterionOutcome {
    int id = 0;
    std::string name;
    bool passed = false;
    /// Measured errors against their thresholds, or the error message when a check threw.
    std::string detail;
    double seconds = 0.0;
    /// Runtime limit in seconds, 0 when the criterion has none; exceeding it fails the criterion.
    double time_limit = 0.0;
};

/// Runs the twelve acceptance criteria in order; on_result is called as each one finishes.
std::vector<CriterionOutcome> run_acceptance(const std::function<void(const CriterionOutcome&)>& on_result = {});

/// "PASS [ 7] name (12.3 s, limit 600 s): detail".
std::string format_outcome(const CriterionOutcome& outcome);

}  // namespace hmf
