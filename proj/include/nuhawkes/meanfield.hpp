#pragma once

#include "nuhawkes/hawkes.hpp"
#include "nuhawkes/snapshot.hpp"

#include <cstdint>
#include <vector>

namespace nuhawkes {

/// n exchangeable particles with common intensity
///   lambda_0(t) = mu0/n + (1/n) sum_j int phi(t - s) dN_j(s),
/// so the aggregate is a univariate Hawkes(mu0, phi).
struct MeanFieldParams {
    std::size_t particles = 1;
    double mu0 = 1.0;
    Kernel kernel;
    std::size_t tagged = 0;
    double horizon = 1.0;
    double beta = 1.0;
    double output_step = 0.01;

    void validate() const;
    [[nodiscard]] Grid grid() const { return Grid(horizon, output_step); }
};

struct ParticleSystemPath {
    MeanFieldParams params;
    HawkesPath aggregate;                // aggregate events, nodes attached
    std::vector<std::uint32_t> owner;    // particle (0-based) of each aggregate event
    std::vector<std::uint32_t> counts;   // N_i(T) for every particle
    std::vector<std::vector<double>> tagged_times;

    Grid grid{1.0, 1.0};
    Vector common_intensity;       // lambda_0 at nodes (left limits)
    Vector common_compensator;     // Lambda_0 = Lambda_bar / n
    Matrix tagged_counts;          // nodes x K
    Matrix tagged_martingales;     // M_i = N_i - Lambda_0

    RescaledTriple rescaled_aggregate;  // (beta^2 Lambda_bar, beta^2 N_bar, beta M_bar)
    Vector rescaled_common_compensator; // n beta^2 Lambda_0
    Matrix rescaled_tagged_counts;      // n beta^2 N_i
    Matrix rescaled_tagged_martingales; // sqrt(n) beta M_i

    /// N_i(t) for every particle.
    [[nodiscard]] std::vector<std::uint32_t> particle_counts_at(double t) const;
};

struct AuxiliarySystemPath {
    Grid grid{1.0, 1.0};
    Vector theta;                 // nodes (left limits)
    Vector compensator;           // Theta(t)
    Matrix tagged_counts;         // auxiliary counts for i < K, nodes x K
    Matrix tagged_martingales;    // auxiliary counts minus Theta
    Vector untagged_aggregate;    // sum over i >= K of the auxiliary counts
    std::vector<double> times;
    std::vector<std::uint32_t> owner;
    bool dominance_holds = true;  // theta <= lambda_0 and aux counts <= main counts at all nodes
};

/// Aggregate by simulate_thinning with the same (seed, path_index) as a direct
/// Hawkes run, then i.i.d. uniform particle labels from a separate stream.
[[nodiscard]] ParticleSystemPath simulate_particles(const MeanFieldParams& params, std::uint64_t seed,
                                                    std::uint64_t path_index = 0);

/// Snapshots of P_N (xs = n beta^2 N_i(t)) and P_M (zs = sqrt(n) beta M_i(t)) over all particles.
[[nodiscard]] std::vector<EmpiricalMeasureSnapshot> empirical_snapshot(const ParticleSystemPath& path,
                                                                       const std::vector<double>& times);

struct CoupledPaths {
    ParticleSystemPath main;
    AuxiliarySystemPath auxiliary;
};

/// Main and auxiliary systems driven by one dominating proposal stream with
/// shared particle labels and marks; the auxiliary intensity only feeds
/// back events of particles K..n-1. Kernels must be bounded and nonincreasing.
[[nodiscard]] CoupledPaths simulate_coupled_auxiliary(const MeanFieldParams& params, std::uint64_t seed,
                                                      std::uint64_t path_index = 0);

} // namespace nuhawkes
