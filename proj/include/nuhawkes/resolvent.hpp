#pragma once

#include "nuhawkes/grid.hpp"
#include "nuhawkes/kernel.hpp"

#include <complex>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace nuhawkes {

/// Resolvent psi = sum_k phi^{*k} sampled per grid cell, with cumulative
/// norms per node. Scaled tables also carry f = beta * psi and F(t).
struct ResolventTable {
    Grid grid{1.0, 1.0};
    std::vector<Matrix> psi;         // cells 0..m-1
    std::vector<Matrix> cumulative;  // nodes 0..m, int_0^{t_k} psi
    std::optional<double> beta;
    std::vector<Matrix> density;       // beta * psi per cell (scaled tables only)
    std::vector<Matrix> distribution;  // beta * cumulative per node
    Matrix scaled_l2;                  // beta * ||psi_ij||_{L2[0,T]}
    std::vector<std::string> warnings;

    [[nodiscard]] std::size_t dimension() const noexcept {
        return psi.empty() ? 0 : static_cast<std::size_t>(psi.front().rows());
    }

    /// psi on the cell containing t; OutOfRangeError outside [0, end].
    [[nodiscard]] Matrix psi_at(double t) const;

    /// int_0^t psi with linear interpolation inside a cell.
    [[nodiscard]] Matrix cumulative_at(double t) const;

    /// Exact Laplace transform of the piecewise-constant table on [0, end].
    [[nodiscard]] ComplexMatrix laplace(std::complex<double> z) const;

    /// CSV: t, psi_ij..., cumnorm_ij..., and fn_ij..., Fn_ij... when scaled.
    void write_csv(std::ostream& out) const;
};

/// Forward substitution of psi_k = phibar_k + h * sum_{j<k} phibar_{k-1-j} psi_j
/// with cell-averaged kernel values phibar.
[[nodiscard]] ResolventTable resolvent_grid(const Kernel& kernel, const Grid& grid);

/// Max entrywise residual of the discrete equation (a consistency check).
[[nodiscard]] double discrete_residual(const Kernel& kernel, const ResolventTable& table);

/// Resolvent of phi^n with the F^n columns filled in.
[[nodiscard]] ResolventTable scaled_resolvent_measure(const NearlyUnstableFamily& family, std::size_t n,
                                                      const Grid& grid);

struct LaplaceResidual {
    double z = 0.0;
    double residual = 0.0;  // max entry of |L_psi^grid - L_phi (I - L_phi)^{-1}|
    bool singular = false;
};

[[nodiscard]] std::vector<LaplaceResidual> verify_laplace_identity(const Kernel& kernel,
                                                                   const ResolventTable& table,
                                                                   const std::vector<double>& z_list);

/// A family with Fourier transforms F_{phi^n}(z) = L_{phi^n}(iz) and scales beta_n,
/// together with the limit coefficient B(z) in F_{phi^n} = I - beta_n B + o(beta_n).
struct FourierFamily {
    std::size_t dimension = 1;
    std::function<ComplexMatrix(std::size_t n, double z)> fourier_phi;
    std::function<double(std::size_t n)> beta;
    std::function<ComplexMatrix(double z)> limit_b;
};

struct FourierLimitEntry {
    std::size_t n = 0;
    double beta = 0.0;
    ComplexMatrix value;     // beta_n (I - F_phi)^{-1} F_phi
    double deviation = 0.0;  // max entry of |value - B^{-1}|
    bool singular = false;
};

struct FourierLimitReport {
    double z = 0.0;
    ComplexMatrix limit;  // B(z)^{-1}
    std::vector<FourierLimitEntry> entries;
    bool deviation_decreasing = true;
};

[[nodiscard]] FourierLimitReport fourier_scaling_limit(const FourierFamily& family, double z,
                                                        const std::vector<std::size_t>& n_list);

/// F_{phi^n}(z) = I - beta_n B(z) exactly, beta_n = 1/n.
[[nodiscard]] FourierFamily exact_linear_family(std::size_t dimension,
                                                std::function<ComplexMatrix(double)> limit_b);

/// JR family over a diagonal exponential base alpha = beta0 (unit mass);
/// B(z) = I + iz/(c * beta0) entrywise on the diagonal.
[[nodiscard]] FourierFamily jr_fourier_family(const NearlyUnstableFamily& family);

struct FourierBoundCheck {
    double fourier_radius = 0.0;  // rho(F_g(z))
    double l1_radius = 0.0;       // rho(||g||_{L1}), the bound the argument supports
    double l2_radius = 0.0;       // rho(||g||_{L2}) as displayed; NaN when not computable
    bool within_l1_bound = true;
};

/// Spectral bound rho(F_g(z)) <= rho(||g||_{L1}); the L2 radius is recorded for comparison.
[[nodiscard]] FourierBoundCheck fourier_spectral_bound(const Kernel& kernel, double z);

} // namespace nuhawkes
