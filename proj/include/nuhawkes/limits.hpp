#pragma once

#include "nuhawkes/grid.hpp"
#include "nuhawkes/kernel.hpp"
#include "nuhawkes/resolvent.hpp"
#include "nuhawkes/snapshot.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace nuhawkes {

/// d xi = b (a - xi) dt + sigma sqrt(xi) dB, xi(0) = xi0.
struct CIRParams {
    double b = 1.0;
    double a = 1.0;
    double sigma = 1.0;
    double xi0 = 0.0;

    void validate() const;
};

struct CIRPath {
    Grid grid{1.0, 1.0};
    Vector values;      // xi_k^+ at nodes
    Vector increments;  // Brownian increments per cell
    std::vector<std::string> warnings;
};

/// Full-truncation Euler: xi_{k+1} = xi_k + b (a - xi_k^+) h + sigma sqrt(xi_k^+) dB_k.
[[nodiscard]] CIRPath solve_cir(const CIRParams& params, const Grid& grid, std::uint64_t seed,
                                std::uint64_t path_index = 0);

enum class FractionalNorm { gamma_one_minus_alpha, gamma_alpha };

/// Limit kernel on a grid: cell averages of f and node values of F = int_0^t f.
struct LimitKernelSpec {
    Grid grid{1.0, 1.0};
    std::vector<Matrix> density;       // cells
    std::vector<Matrix> distribution;  // nodes
    std::string provenance;

    [[nodiscard]] std::size_t dimension() const noexcept {
        return density.empty() ? 0 : static_cast<std::size_t>(density.front().rows());
    }

    /// Laplace transform 1/(m + lambda z) inverted in closed form, or
    /// 1/(m + lambda z^alpha) through its Volterra equation. Other triplets
    /// have no grid representation here and raise DomainError.
    static LimitKernelSpec from_bernstein(const BernsteinTriplet& triplet, const Grid& grid);

    /// f(t) = scale t^(alpha-1) / Gamma(norm) with norm = 1 - alpha (default) or alpha.
    static LimitKernelSpec fractional(double alpha, const Grid& grid, double scale = 1.0,
                                      FractionalNorm norm = FractionalNorm::gamma_one_minus_alpha);

    /// From a scaled resolvent table (f^n, F^n columns).
    static LimitKernelSpec from_resolvent(const ResolventTable& table);

    /// Throws InvalidParameter on negative cells or inconsistent sizes.
    void validate() const;

    void write_csv(std::ostream& out) const;
};

/// The CIR process equivalent to the SVE with f = (1/lambda) e^{-(m/lambda) t}
/// and level vector a (scalar case): b = m/lambda, level = a/m, sigma = 1/lambda.
[[nodiscard]] CIRParams cir_correspondence(const BernsteinTriplet& triplet, double a);

struct SVEPath {
    Grid grid{1.0, 1.0};
    Matrix y;          // nodes x d
    Matrix x;          // nodes x d, trapezoid integral of y^+
    Matrix z;          // nodes x d
    Matrix increments; // cells x d
};

/// Y_k = F_k a + sum_{j<k} fbar_{k-j} sqrt(diag Y_j^+) dB_j with fbar_l the
/// average of f over [(l-1)h, lh]. Uses the same Brownian stream as solve_cir.
[[nodiscard]] SVEPath solve_sve(const LimitKernelSpec& spec, const Vector& a, std::uint64_t seed,
                                std::uint64_t path_index = 0);

struct Regime {
    enum class Kind { zero, finite, infinite };
    Kind kind = Kind::zero;
    double zeta = 0.0;

    static Regime zero() { return {Kind::zero, 0.0}; }
    static Regime finite(double zeta);
    static Regime infinite() { return {Kind::infinite, 0.0}; }
    /// zeta = lim n beta_n^2 mapped to its regime.
    static Regime from_zeta(double zeta);
    [[nodiscard]] std::string name() const;
};

struct RegimeLimitSample {
    Regime regime;
    Grid grid{1.0, 1.0};
    Vector xbar;     // nodes
    Matrix x;        // nodes x K
    Matrix z;        // nodes x K
    Matrix drivers;  // W_i(Xbar) (zero) or N_i(Xbar/zeta) (finite), nodes x K
};

/// Tagged-particle limits driven by component 0 of xbar.x.
[[nodiscard]] RegimeLimitSample sample_regime_limit(const Regime& regime, const SVEPath& xbar, std::size_t tagged,
                                                    std::uint64_t seed, std::uint64_t path_index = 0);

/// Limit law of (X_i(t), Z_i(t)) given Xbar(t): m draws, or one atom at (0, 0)
/// for the infinite regime.
[[nodiscard]] EmpiricalMeasureSnapshot limit_empirical_law(const Regime& regime, const SVEPath& xbar, double t,
                                                           std::size_t m, std::uint64_t seed,
                                                           std::uint64_t path_index = 0);

} // namespace nuhawkes
