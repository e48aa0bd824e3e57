#pragma once

#include "nuhawkes/grid.hpp"
#include "nuhawkes/kernel.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nuhawkes {

struct HawkesParams {
    Vector mu;
    Kernel kernel;
    double horizon = 1.0;

    /// Throws InvalidParameter / ConfigError on negative baseline, mismatched
    /// dimension or non-positive horizon.
    void validate() const;
};

/// Node samples of lambda, N, Lambda and M (rows = grid nodes, cols = components).
/// lambda is the left limit at each node.
struct NodeSeries {
    Grid grid{1.0, 1.0};
    Matrix intensity;
    Matrix counts;
    Matrix compensator;
    Matrix martingale;
};

/// Events merged across components in increasing time order.
struct HawkesPath {
    HawkesParams params;
    std::vector<double> times;
    std::vector<std::uint32_t> components;
    std::optional<NodeSeries> nodes;
    std::vector<std::string> warnings;

    [[nodiscard]] std::size_t size() const noexcept { return times.size(); }
    [[nodiscard]] std::vector<double> component_times(std::size_t i) const;
    /// N(t), counting events with time <= t.
    [[nodiscard]] Vector counts_at(double t) const;

    /// CSV with columns component,time.
    void write_events_csv(std::ostream& out) const;
    /// CSV with columns t, lambda_i, N_i, Lambda_i, M_i (requires nodes).
    void write_nodes_csv(std::ostream& out) const;
};

/// N^(n) = beta^2 N, Lambda^(n) = beta^2 Lambda, M^(n) = beta M on the grid.
struct RescaledTriple {
    Grid grid{1.0, 1.0};
    double beta = 1.0;
    Matrix compensator;
    Matrix counts;
    Matrix martingale;
};

/// Ogata thinning. Exponential kernels carry an O(1) Markov state; other
/// kernels must be nonincreasing. Singular power-law components are split at
/// a lag into a capped part (thinned) and a finite-mass head whose points
/// are drawn directly as Poisson offspring.
[[nodiscard]] HawkesPath simulate_thinning(const HawkesParams& params, std::uint64_t seed,
                                           std::uint64_t path_index = 0);

/// Branching construction: Poisson immigrants, Poisson(||phi_ij||) offspring
/// displaced by phi_ij / ||phi_ij||. Refuses unstable kernels.
[[nodiscard]] HawkesPath simulate_cluster(const HawkesParams& params, std::uint64_t seed,
                                          std::uint64_t path_index = 0);

/// lambda(t-) = mu + sum_{tau < t} phi(t - tau).
[[nodiscard]] Vector intensity_at(const HawkesPath& path, double t);

/// Lambda and M on the grid by exact kernel integrals (closed form for every
/// supported form, a linear sweep for exponential kernels).
[[nodiscard]] NodeSeries compensator_martingale(const HawkesPath& path, const Grid& grid);

/// Lambda(t) by 20-point Gauss-Legendre panels between consecutive events;
/// independent cross-check of the exact route. Only accurate for bounded
/// kernels: a singular power law loses digits next to every event.
[[nodiscard]] Vector compensator_quadrature(const HawkesPath& path, double t);

/// Fills path.nodes on the grid.
void attach_nodes(HawkesPath& path, const Grid& grid);

[[nodiscard]] RescaledTriple rescale_path(const HawkesPath& path, double beta, const Grid& grid);

} // namespace nuhawkes
