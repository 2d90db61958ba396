#pragma once

#include <functional>
#include <string>
#include <vector>

namespace mwhardy {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

inline constexpr int kCriteria = 10;

/// Runs the listed criteria (all when empty) in order. Criterion 10 also
/// checks the wall-clock total of the run against its budget. `progress`
/// receives each result as it completes.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& which = {},
                                            const std::function<void(const CriterionResult&)>& progress = {});

CriterionResult run_criterion(int id);

} // namespace mwhardy
