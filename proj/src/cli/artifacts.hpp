#pragma once

#include "nuhawkes/stats.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace nuhawkes::cli {

namespace fs = std::filesystem;

/// Round-trip decimal ("%.17g"); locale independent.
[[nodiscard]] std::string format_double(double v);

/// Comma-separated table with a header row.
class CsvWriter {
public:
    CsvWriter(const fs::path& path, const std::vector<std::string>& header);

    void row(const std::vector<double>& values);
    void row(std::initializer_list<double> values) { row(std::vector<double>(values)); }
    /// Leading string cell followed by numbers.
    void row(const std::string& label, const std::vector<double>& values);

private:
    std::ofstream out_;
    fs::path path_;
};

/// Lowercase hex SHA-256 of a file or a string.
[[nodiscard]] std::string sha256_file(const fs::path& path);
[[nodiscard]] std::string sha256_text(const std::string& text);

[[nodiscard]] nlohmann::json report_to_json(const TestReport& report);

/// Every regular file below root as {"file", "bytes", "sha256"}, sorted by path.
[[nodiscard]] nlohmann::json artifact_listing(const fs::path& root, const std::vector<std::string>& exclude = {});

} // namespace nuhawkes::cli
