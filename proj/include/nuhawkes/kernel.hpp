#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

namespace nuhawkes {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;

/// phi_ij(t) = alpha_ij * exp(-beta_ij * t).
struct ExponentialForm {
    Matrix alpha;
    Matrix beta;
};

/// phi_ij(t) = C_ij * g(t) with the log-logistic density
///   g(t) = p * c^p * t^(p-1) / (c^p + t^p)^2,
/// so that int_0^inf g = 1 and int_T^inf g = c^p / (c^p + T^p) ~ c^p T^-p.
/// The density has an integrable singularity at 0 for p < 1 and is
/// nonincreasing. A cutoff of +inf means the bare power p * t^(p-1), which is
/// not integrable on [0, inf).
struct PowerLawForm {
    Matrix scale;
    double exponent = 0.75;
    double cutoff = 1.0;
};

/// Piecewise-constant kernel: cells[k] holds phi on [k*step, (k+1)*step);
/// the kernel vanishes beyond cells.size()*step.
struct GridForm {
    double step = 0.0;
    std::vector<Matrix> cells;
};

using KernelForm = std::variant<ExponentialForm, PowerLawForm, GridForm>;

/// Nonnegative matrix-valued self-exciting kernel. Immutable; copies share
/// the parameter storage.
class Kernel {
public:
    /// The zero kernel in dimension 1.
    Kernel();

    static Kernel exponential(Matrix alpha, Matrix beta);
    static Kernel exponential(double alpha, double beta);
    static Kernel power_law(Matrix scale, double exponent, double cutoff);
    static Kernel power_law(double scale, double exponent, double cutoff);
    static Kernel grid_sampled(double step, std::vector<Matrix> cells);
    static Kernel zero(std::size_t dimension);

    [[nodiscard]] std::size_t dimension() const noexcept { return dimension_; }
    [[nodiscard]] const KernelForm& form() const noexcept { return *form_; }
    [[nodiscard]] bool is_exponential() const noexcept;

    /// phi(t). For grid kernels t must lie in [0, horizon].
    [[nodiscard]] Matrix eval(double t) const;

    /// phi_ij(t) on its support, zero beyond a grid kernel's horizon. No
    /// range check; t > 0 assumed for singular forms.
    [[nodiscard]] double value(std::size_t i, std::size_t j, double t) const noexcept;

    /// int_0^u phi_ij(s) ds (exact for every form).
    [[nodiscard]] double cumulative(std::size_t i, std::size_t j, double u) const noexcept;

    /// int_{t0}^{t1} phi(s) ds, exact for every form.
    [[nodiscard]] Matrix cell_integral(double t0, double t1) const;

    /// Time beyond which the kernel is identically zero (+inf for parametric).
    [[nodiscard]] double support_end() const noexcept;

    [[nodiscard]] bool integrable() const noexcept;

    /// Entrywise nonincreasing in t, as required by the thinning majorant.
    [[nodiscard]] bool nonincreasing() const noexcept;

    /// L1 norm matrix; DomainError when not integrable on [0, inf).
    [[nodiscard]] Matrix l1() const;

    /// Entrywise Laplace transform at z with Re z >= 0.
    [[nodiscard]] ComplexMatrix laplace(std::complex<double> z) const;

    /// The kernel t -> amplitude * rate * phi(rate * t).
    [[nodiscard]] Kernel compressed(double amplitude, double rate) const;

    /// Entrywise multiple amplitude * phi.
    [[nodiscard]] Kernel scaled(double amplitude) const;

    /// Inverse CDF of the normalized component phi_ij / ||phi_ij||, used for
    /// offspring displacements. u in (0, 1).
    [[nodiscard]] double displacement_quantile(std::size_t i, std::size_t j, double u) const;

private:
    Kernel(std::size_t dimension, KernelForm form);

    std::size_t dimension_;
    std::shared_ptr<const KernelForm> form_;
};

struct StabilityReport {
    Matrix l1;
    double spectral_radius = 0.0;
    bool stable = true;
};

/// Perron root of a nonnegative square matrix by power iteration on A + I
/// (aperiodic, same Perron vector), at most 200 iterations or relative change
/// below 1e-12.
[[nodiscard]] double spectral_radius(const Matrix& nonnegative);

[[nodiscard]] inline Matrix eval(const Kernel& kernel, double t) { return kernel.eval(t); }
[[nodiscard]] StabilityReport l1_and_stability(const Kernel& kernel);
[[nodiscard]] inline ComplexMatrix laplace(const Kernel& kernel, std::complex<double> z) {
    return kernel.laplace(z);
}

/// b_n = coefficient * n^power.
struct BnSchedule {
    double coefficient = 1.0;
    double power = 1.0;

    [[nodiscard]] double operator()(std::size_t n) const;
};

/// Jaisson-Rosenbaum family phi^n(t) = a_n b_n phi(b_n t) with
/// a_n = 1 - c / b_n, beta_n = 1 - a_n and baseline mu^n = a / beta_n.
class NearlyUnstableFamily {
public:
    NearlyUnstableFamily(Kernel base, double c, BnSchedule schedule, Vector target);

    [[nodiscard]] const Kernel& base() const noexcept { return base_; }
    [[nodiscard]] double c() const noexcept { return c_; }
    [[nodiscard]] const BnSchedule& schedule() const noexcept { return schedule_; }
    [[nodiscard]] const Vector& target() const noexcept { return target_; }

    [[nodiscard]] double b(std::size_t n) const { return schedule_(n); }
    /// a_n; InvalidParameter when c / b_n >= 1.
    [[nodiscard]] double a(std::size_t n) const;
    [[nodiscard]] double beta(std::size_t n) const;
    [[nodiscard]] Kernel kernel(std::size_t n) const;
    [[nodiscard]] Vector baseline(std::size_t n) const;

private:
    Kernel base_;
    double c_;
    BnSchedule schedule_;
    Vector target_;
};

/// Requires rho(||base||) = 1 within 1e-6.
[[nodiscard]] NearlyUnstableFamily make_jr_family(Kernel base, double c, BnSchedule schedule = {},
                                                  Vector target = Vector::Ones(1));

/// nu(dx) = scale * x^(-1-exponent) dx on (0, inf), exponent in (0, 1).
struct StableLevy {
    double scale = 1.0;
    double exponent = 0.75;
};

/// Atomic Levy measure sum_k weights[k] * delta_{atoms[k]}.
struct DiscreteLevy {
    std::vector<double> atoms;
    std::vector<double> weights;
    /// Mass of (1 ^ x) nu(dx) dropped when the measure was discretized.
    double truncation_error = 0.0;
};

using LevyMeasure = std::variant<std::monostate, StableLevy, DiscreteLevy>;

/// Bernstein function Phi(z) = drift + linear * z + int (1 - e^{-zx}) nu(dx).
struct BernsteinTriplet {
    double drift = 0.0;
    double linear = 0.0;
    LevyMeasure levy{};

    /// Constructs and validates (nonnegative coefficients, finite (1 ^ x) mass).
    static BernsteinTriplet make(double drift, double linear, LevyMeasure levy = {});
};

struct BernsteinValue {
    double phi = 0.0;
    /// 1 / Phi(z), the Laplace transform of the limit measure; empty when Phi(z) = 0.
    std::optional<double> limit_laplace;
};

[[nodiscard]] BernsteinValue bernstein_eval(const BernsteinTriplet& triplet, double z);

/// 1 / Phi(z); DomainError when Phi(z) = 0.
[[nodiscard]] double limit_laplace(const BernsteinTriplet& triplet, double z);

/// int (1 ^ x) nu(dx); +inf if the measure violates the Levy integrability.
[[nodiscard]] double levy_integrability_mass(const LevyMeasure& levy);

/// Log-spaced atoms on [x_min, x_max] carrying the exact cell masses of a stable measure.
[[nodiscard]] DiscreteLevy discretize_stable(const StableLevy& stable, std::size_t atoms = 400,
                                             double x_min = 1e-6, double x_max = 1e3);

/// For a stable measure, int (1 - e^{-zx}) nu(dx) = lambda * z^alpha with
/// lambda = scale * Gamma(1 - alpha) / alpha.
[[nodiscard]] double stable_coefficient(const StableLevy& stable);

} // namespace nuhawkes
