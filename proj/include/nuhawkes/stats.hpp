#pragma once

#include "nuhawkes/hawkes.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace nuhawkes {

struct TestReport {
    std::string name;
    std::string description;
    double statistic = 0.0;
    std::optional<double> p_value;
    double threshold = 0.0;  // level for p-value tests, tolerance otherwise
    std::size_t size_a = 0;
    std::size_t size_b = 0;
    bool pass = true;
};

/// 1 - K(lambda) for the Kolmogorov distribution, clamped to [0, 1].
[[nodiscard]] double kolmogorov_survival(double lambda);

/// Two-sample KS statistic (ties handled by stepping past equal values) and
/// asymptotic p-value with n_eff = n m / (n + m); pass when p > level.
[[nodiscard]] TestReport ks_distance(std::vector<double> a, std::vector<double> b, double level = 0.01);

/// W1 between two empirical measures, optionally weighted (weights normalized).
[[nodiscard]] TestReport wasserstein1(std::vector<double> a, std::vector<double> b,
                                      std::vector<double> weights_a = {}, std::vector<double> weights_b = {});

/// [M_i](T) = N_i(T) from the jumps of M, and zero covariation across
/// components (no shared timestamps). Statistic = max residual.
[[nodiscard]] TestReport qv_identity_check(const HawkesPath& path, double tolerance = 1e-10);

/// Same identity for one rescaled particle: [scale * M_i] = scale^2 N_i, which
/// fails when two jump times coincide.
[[nodiscard]] TestReport qv_identity_check(const std::vector<double>& jump_times, double scale,
                                           double tolerance = 1e-10);

struct ExchangeableMoment {
    double lhs = 0.0;          // ((1/n) sum g)^K
    double coefficient = 0.0;  // n! / ((n-K)! n^K)
    double distinct_average = 0.0;
    double remainder = 0.0;    // repeated-index tuples / n^K
    double rhs = 0.0;
};

[[nodiscard]] double exchangeable_coefficient(std::size_t n, std::size_t k);

/// Full enumeration of index tuples; DomainError when n^K > 1e7.
[[nodiscard]] ExchangeableMoment exchangeable_moment(const std::vector<double>& values,
                                                     const std::function<double(double)>& g, std::size_t k);

[[nodiscard]] TestReport exchangeable_moment_check(const std::vector<double>& values,
                                                   const std::function<double(double)>& g, std::size_t k,
                                                   double tolerance = 1e-12);

struct HolderEstimate {
    double exponent = 1.0;  // slope clamped to (0, 1]
    double slope = 1.0;     // raw least-squares slope
    double standard_error = 0.0;
    bool degenerate = false;
};

/// Slope of log mean |x_{k+L} - x_k| against log L for L = 2^0..2^6; needs >= 256 nodes.
[[nodiscard]] HolderEstimate holder_exponent(const std::vector<double>& series);

struct MeanEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t count = 0;
};

[[nodiscard]] MeanEstimate mean_estimate(const std::vector<double>& xs);

/// |estimate - target| <= sigmas * se, with a floor for degenerate samples.
[[nodiscard]] TestReport within_standard_errors(std::string name, const MeanEstimate& estimate, double target,
                                                double sigmas = 3.0);

} // namespace nuhawkes
