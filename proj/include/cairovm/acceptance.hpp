#pragma once

#include <functional>
#include <string>
#include <vector>

namespace cairovm::acceptance {

struct Result {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;
    double seconds = 0;
    double budget_seconds = 0;
};

struct Config {
    bool parallel = true;
    /// Directory holding assert_nn_auto_spec.txt.
    std::string golden_dir;
    /// Criteria to run; empty means all.
    std::vector<int> only;
    /// Called as each criterion finishes.
    std::function<void(const Result&)> progress;
};

/// Golden directory of the source tree this library was built from.
std::string default_golden_dir();

inline constexpr int kCriterionCount = 11;

/// Runs the criteria in order. A criterion passes when all of its checks
/// hold and it finishes within its time budget.
std::vector<Result> run(const Config& cfg);

/// "PASS  3  range-check accounting (0.01 s / 1 s) ..." style line.
std::string format_line(const Result& r);

}  // namespace cairovm::acceptance
