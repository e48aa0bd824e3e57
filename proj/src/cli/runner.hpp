#pragma once

#include "config.hpp"

#include "nuhawkes/stats.hpp"

#include <json.hpp>

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace nuhawkes::cli {

inline constexpr int manifest_schema_version = 1;

struct RunOptions {
    unsigned threads = 1;
    /// Progress lines (may carry timings; never written to artifacts).
    std::function<void(const std::string&)> log;
};

struct RunSummary {
    std::filesystem::path directory;
    std::vector<TestReport> reports;
    nlohmann::json manifest;
    bool pass = false;
};

/// Default run directory: runs/<kind>-<seed>.
[[nodiscard]] std::filesystem::path default_output(const ExperimentConfig& config);

/// Writes the kind's CSV artifacts, reports.jsonl and manifest.json into the
/// run directory. An existing directory is replaced only when it holds a
/// previous manifest; otherwise a nonempty directory is an error.
[[nodiscard]] RunSummary run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

} // namespace nuhawkes::cli
