#pragma once

#include "nuhawkes/kernel.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace nuhawkes::cli {

using json = nlohmann::json;

/// {"form": "exponential", "params": {"alpha": A, "beta": B}} where A, B are
/// numbers or square nested arrays; "power_law" takes scale, exponent and
/// cutoff (number or "inf"); "zero" takes dimension; "grid_sampled" takes
/// step and cells (list of matrices). Problems are appended to `errors`
/// prefixed with `where`.
[[nodiscard]] Kernel kernel_from_json(const json& spec, const std::string& where, std::vector<std::string>& errors);

/// Throws ConfigError on the first problem.
[[nodiscard]] Kernel kernel_from_json(const json& spec);

[[nodiscard]] json kernel_to_json(const Kernel& kernel);

[[nodiscard]] json matrix_to_json(const Matrix& m);

/// Number -> 1x1, nested array -> matrix; empty optional on malformed input.
[[nodiscard]] std::optional<Matrix> matrix_from_json(const json& value);

} // namespace nuhawkes::cli
