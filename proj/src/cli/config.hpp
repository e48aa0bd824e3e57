#pragma once

#include "kernel_json.hpp"

#include "nuhawkes/errors.hpp"
#include "nuhawkes/kernel.hpp"
#include "nuhawkes/limits.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace nuhawkes::cli {

inline constexpr int config_schema_version = 1;

enum class ExperimentKind { resolvent, hawkes, meanfield, limit, regime_compare, acceptance_suite };

[[nodiscard]] std::string kind_name(ExperimentKind kind);

struct FamilySpec {
    Kernel base;
    double c = 1.0;
    BnSchedule schedule;
    Vector target = Vector::Ones(1);

    [[nodiscard]] NearlyUnstableFamily build() const;
};

struct HawkesSpec {
    std::optional<Vector> mu;  // defaults to ones, or the family baseline
    std::string method = "thinning";
    double beta = 1.0;
    std::size_t export_paths = 1;
};

struct MeanFieldSpec {
    std::vector<std::size_t> n{100};
    std::size_t tagged = 0;
    std::optional<double> mu0;   // family baseline when a family is given, else 1
    std::optional<double> beta;  // family beta_n, else 1
    double output_step = 0.01;
    std::vector<double> snapshot_times;  // default {T}
};

struct LimitSpec {
    std::string model = "cir";  // cir | sve
    CIRParams cir;
    std::string sve_kernel = "bernstein";  // bernstein | fractional
    double drift = 1.0;
    double linear = 1.0;
    std::optional<StableLevy> stable;
    double alpha = 0.75;
    double scale = 1.0;
    FractionalNorm norm = FractionalNorm::gamma_one_minus_alpha;
    double level = 1.0;  // a in Y = F a + ...
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::hawkes;
    std::uint64_t seed = 0;
    std::string output;
    unsigned threads = 1;
    double horizon = 1.0;
    double step = 1e-3;
    std::size_t paths = 10000;
    std::optional<Kernel> kernel;
    std::optional<FamilySpec> family;
    std::size_t family_n = 0;  // member index for resolvent / hawkes kinds
    HawkesSpec hawkes;
    MeanFieldSpec meanfield;
    LimitSpec limit;
    std::optional<double> zeta;  // +inf allowed; empty = derived from n
    bool quick = false;          // acceptance suite: reduced sizes

    json normalized;  // defaults applied; hashed into the manifest

    [[nodiscard]] Grid grid() const { return Grid(horizon, step); }
    /// Kernel, or the family member at family_n.
    [[nodiscard]] Kernel resolved_kernel() const;
};

/// Every violated constraint, each naming its key.
class ConfigValidationError : public ConfigError {
public:
    explicit ConfigValidationError(std::vector<std::string> errors);
    [[nodiscard]] const std::vector<std::string>& errors() const noexcept { return errors_; }

private:
    std::vector<std::string> errors_;
};

/// Parses the JSON document, rejects unknown keys, applies defaults
/// (grid.h = 1e-3, grid.T = 1, paths = 10000) and checks module
/// preconditions. Throws ConfigValidationError listing every problem.
[[nodiscard]] ExperimentConfig validate_config(const std::string& text);

/// Rebuilds `normalized` after the CLI overrides seed, output or threads.
void refresh_normalized(ExperimentConfig& config);

} // namespace nuhawkes::cli
