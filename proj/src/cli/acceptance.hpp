#pragma once

#include "artifacts.hpp"

#include "nuhawkes/stats.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <vector>

namespace nuhawkes::cli {

inline constexpr std::uint64_t default_acceptance_seed = 20241019;

struct AcceptanceOptions {
    std::uint64_t seed = default_acceptance_seed;
    unsigned threads = 1;
    std::filesystem::path output;  // artifacts go to output/cNN_*; required
    std::set<int> only;            // empty = all fourteen
    /// Called after each criterion (progress lines with timings).
    std::function<void(const struct CriterionResult&)> on_result;
};

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;   // measured values vs thresholds, no timings
    double seconds = 0.0; // wall time, reported on stdout only
    std::vector<TestReport> reports;
};

struct AcceptanceResult {
    std::vector<CriterionResult> criteria;
    [[nodiscard]] bool all_pass() const;
};

/// Runs the acceptance criteria and writes their artifacts. Criterion 14
/// reruns 1-13 into output/determinism with a different thread count and
/// compares every artifact byte for byte.
[[nodiscard]] AcceptanceResult run_acceptance(const AcceptanceOptions& options);

/// "[PASS] 01 title: detail (1.23 s)"
[[nodiscard]] std::string format_result_line(const CriterionResult& result);

} // namespace nuhawkes::cli
