#include "nuhawkes/kernel.hpp"

#include "nuhawkes/errors.hpp"
#include "detail.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace nuhawkes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using detail::complex_expm1;
using detail::overloaded;

void require_square(const Matrix& m, const char* label) {
    if (m.rows() == 0 || m.rows() != m.cols()) {
        throw InvalidParameter(std::string(label) + " must be a non-empty square matrix");
    }
}

void require_nonnegative(const Matrix& m, const char* label) {
    if (!m.allFinite() || (m.array() < 0.0).any()) {
        throw InvalidParameter(std::string(label) + " entries must be finite and nonnegative");
    }
}

// Log-logistic distribution function, its tail and density (unit mass).
double loglogistic_cdf(double u, double p, double c) {
    if (u <= 0.0) {
        return 0.0;
    }
    if (std::isinf(c)) {
        return std::pow(u, p);  // bare power law: int_0^u p s^(p-1) ds
    }
    return 1.0 / (1.0 + std::pow(c / u, p));
}

double loglogistic_tail(double u, double p, double c) {
    if (u <= 0.0) {
        return 1.0;
    }
    return 1.0 / (1.0 + std::pow(u / c, p));
}

double loglogistic_density(double t, double p, double c) {
    if (t <= 0.0) {
        return p < 1.0 ? kInf : (p == 1.0 ? 1.0 / c : 0.0);
    }
    if (std::isinf(c)) {
        return p * std::pow(t, p - 1.0);
    }
    const double r = std::pow(t / c, p);
    return p * r / (t * (1.0 + r) * (1.0 + r));
}

double loglogistic_density_derivative(double t, double p, double c) {
    const double r = std::pow(t / c, p);
    return loglogistic_density(t, p, c) * ((p - 1.0) / t - 2.0 * p * r / (t * (1.0 + r)));
}

// int_0^inf e^{-zt} g(t) dt for the unit-mass log-logistic density, Re z >= 0, z != 0.
std::complex<double> loglogistic_laplace(std::complex<double> z, double p, double c) {
    using Gauss = boost::math::quadrature::gauss<double, 20>;
    const double modulus = std::abs(z);
    const double horizon_scale = std::max(c, 1.0 / modulus);
    double upper = 1e3 * horizon_scale;
    if (z.real() > 0.0) {
        upper = std::min(upper, 45.0 / z.real());  // e^{-45} < 1e-19
    }
    const double head_end = std::min(1e-14 * c, upper);

    // Mass on [0, head_end] where e^{-zt} = 1 to within |z| * head_end.
    std::complex<double> total = loglogistic_cdf(head_end, p, c);

    double max_width = kInf;
    if (z.imag() != 0.0) {
        max_width = std::numbers::pi / std::abs(z.imag());
    }
    if (z.real() > 0.0) {
        max_width = std::min(max_width, 1.0 / z.real());
    }

    const auto& nodes = Gauss::abscissa();
    const auto& weights = Gauss::weights();
    double a = head_end;
    while (a < upper) {
        const double b = std::min({2.0 * a, a + max_width, upper});
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        std::complex<double> panel = 0.0;
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            const double x = nodes[k];
            for (double t : {mid - half * x, mid + half * x}) {
                const double w = (x == 0.0) ? weights[k] * 0.5 : weights[k];
                panel += w * std::exp(-z * t) * loglogistic_density(t, p, c);
            }
        }
        total += half * panel;
        a = b;
    }

    if (!(z.real() > 0.0 && 45.0 / z.real() <= 1e3 * horizon_scale)) {
        // Two integrations by parts for the remaining tail.
        const auto decay = std::exp(-z * upper);
        total += decay * (loglogistic_density(upper, p, c) / z +
                          loglogistic_density_derivative(upper, p, c) / (z * z));
    }
    return total;
}

std::vector<Matrix> grid_prefix(const GridForm& g) {
    std::vector<Matrix> prefix;
    prefix.reserve(g.cells.size() + 1);
    prefix.push_back(Matrix::Zero(g.cells.front().rows(), g.cells.front().cols()));
    for (const auto& cell : g.cells) {
        prefix.push_back(prefix.back() + g.step * cell);
    }
    return prefix;
}

double grid_cumulative(const GridForm& g, std::size_t i, std::size_t j, double u) {
    if (u <= 0.0) {
        return 0.0;
    }
    const std::size_t m = g.cells.size();
    double acc = 0.0;
    const double pos = u / g.step;
    const auto full = static_cast<std::size_t>(std::min<double>(std::floor(pos), static_cast<double>(m)));
    for (std::size_t k = 0; k < full; ++k) {
        acc += g.cells[k](i, j);
    }
    acc *= g.step;
    if (full < m) {
        acc += (u - static_cast<double>(full) * g.step) * g.cells[full](i, j);
    }
    return acc;
}

} // namespace

Kernel::Kernel(std::size_t dimension, KernelForm form)
    : dimension_(dimension), form_(std::make_shared<const KernelForm>(std::move(form))) {}

Kernel::Kernel() : Kernel(zero(1)) {}

Kernel Kernel::exponential(Matrix alpha, Matrix beta) {
    require_square(alpha, "alpha");
    require_square(beta, "beta");
    if (alpha.rows() != beta.rows()) {
        throw InvalidParameter("alpha and beta must have the same dimension");
    }
    require_nonnegative(alpha, "alpha");
    if (!beta.allFinite() || (beta.array() <= 0.0).any()) {
        throw InvalidParameter("beta entries must be finite and strictly positive");
    }
    const auto d = static_cast<std::size_t>(alpha.rows());
    return Kernel(d, ExponentialForm{std::move(alpha), std::move(beta)});
}

Kernel Kernel::exponential(double alpha, double beta) {
    return exponential(Matrix::Constant(1, 1, alpha), Matrix::Constant(1, 1, beta));
}

Kernel Kernel::power_law(Matrix scale, double exponent, double cutoff) {
    require_square(scale, "scale");
    require_nonnegative(scale, "scale");
    if (!(exponent > 0.0 && exponent <= 1.0)) {
        throw InvalidParameter("power-law exponent must lie in (0, 1]");
    }
    if (!(cutoff > 0.0)) {
        throw InvalidParameter("power-law cutoff must be positive (or +inf for none)");
    }
    const auto d = static_cast<std::size_t>(scale.rows());
    return Kernel(d, PowerLawForm{std::move(scale), exponent, cutoff});
}

Kernel Kernel::power_law(double scale, double exponent, double cutoff) {
    return power_law(Matrix::Constant(1, 1, scale), exponent, cutoff);
}

Kernel Kernel::grid_sampled(double step, std::vector<Matrix> cells) {
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw ConfigError("grid kernel step must be positive");
    }
    if (cells.empty()) {
        throw InvalidParameter("grid kernel needs at least one cell");
    }
    require_square(cells.front(), "grid cell");
    const auto d = cells.front().rows();
    for (const auto& cell : cells) {
        if (cell.rows() != d || cell.cols() != d) {
            throw InvalidParameter("grid kernel cells must share one dimension");
        }
        require_nonnegative(cell, "grid cell");
    }
    return Kernel(static_cast<std::size_t>(d), GridForm{step, std::move(cells)});
}

Kernel Kernel::zero(std::size_t dimension) {
    const auto d = static_cast<Eigen::Index>(dimension);
    return exponential(Matrix::Zero(d, d), Matrix::Ones(d, d));
}

bool Kernel::is_exponential() const noexcept {
    return std::holds_alternative<ExponentialForm>(*form_);
}

Matrix Kernel::eval(double t) const {
    if (!(t >= 0.0)) {
        throw DomainError("kernel evaluated at negative time");
    }
    if (const auto* g = std::get_if<GridForm>(form_.get())) {
        const double horizon = g->step * static_cast<double>(g->cells.size());
        if (t > horizon) {
            throw OutOfRangeError("time " + std::to_string(t) + " beyond grid kernel horizon " +
                                  std::to_string(horizon));
        }
        auto k = static_cast<std::size_t>(t / g->step);
        k = std::min(k, g->cells.size() - 1);
        return g->cells[k];
    }
    const auto d = static_cast<Eigen::Index>(dimension_);
    Matrix out(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            out(i, j) = value(static_cast<std::size_t>(i), static_cast<std::size_t>(j), t);
        }
    }
    return out;
}

double Kernel::value(std::size_t i, std::size_t j, double t) const noexcept {
    const auto ii = static_cast<Eigen::Index>(i);
    const auto jj = static_cast<Eigen::Index>(j);
    return std::visit(
        overloaded{
            [&](const ExponentialForm& e) { return e.alpha(ii, jj) * std::exp(-e.beta(ii, jj) * t); },
            [&](const PowerLawForm& p) {
                const double s = p.scale(ii, jj);
                return s == 0.0 ? 0.0 : s * loglogistic_density(t, p.exponent, p.cutoff);
            },
            [&](const GridForm& g) {
                const auto k = static_cast<std::size_t>(t / g.step);
                return k < g.cells.size() ? g.cells[k](ii, jj) : 0.0;
            }},
        *form_);
}

double Kernel::cumulative(std::size_t i, std::size_t j, double u) const noexcept {
    if (u <= 0.0) {
        return 0.0;
    }
    const auto ii = static_cast<Eigen::Index>(i);
    const auto jj = static_cast<Eigen::Index>(j);
    return std::visit(
        overloaded{[&](const ExponentialForm& e) {
                       const double b = e.beta(ii, jj);
                       return -e.alpha(ii, jj) / b * std::expm1(-b * u);
                   },
                   [&](const PowerLawForm& p) {
                       return p.scale(ii, jj) * loglogistic_cdf(u, p.exponent, p.cutoff);
                   },
                   [&](const GridForm& g) { return grid_cumulative(g, i, j, u); }},
        *form_);
}

Matrix Kernel::cell_integral(double t0, double t1) const {
    if (t1 < t0) {
        throw InvalidParameter("cell_integral requires t0 <= t1");
    }
    const auto d = static_cast<Eigen::Index>(dimension_);
    Matrix out(d, d);
    if (const auto* p = std::get_if<PowerLawForm>(form_.get()); p && !std::isinf(p->cutoff) &&
                                                                  t0 > p->cutoff) {
        // Difference of tails keeps relative accuracy far out.
        const double mass = loglogistic_tail(t0, p->exponent, p->cutoff) -
                            loglogistic_tail(t1, p->exponent, p->cutoff);
        return p->scale * mass;
    }
    if (const auto* e = std::get_if<ExponentialForm>(form_.get())) {
        for (Eigen::Index i = 0; i < d; ++i) {
            for (Eigen::Index j = 0; j < d; ++j) {
                const double b = e->beta(i, j);
                // a/b * e^{-b t0} (1 - e^{-b (t1 - t0)})
                out(i, j) = -e->alpha(i, j) / b * std::exp(-b * t0) * std::expm1(-b * (t1 - t0));
            }
        }
        return out;
    }
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            const auto ui = static_cast<std::size_t>(i);
            const auto uj = static_cast<std::size_t>(j);
            out(i, j) = cumulative(ui, uj, t1) - cumulative(ui, uj, t0);
        }
    }
    return out;
}

double Kernel::support_end() const noexcept {
    if (const auto* g = std::get_if<GridForm>(form_.get())) {
        return g->step * static_cast<double>(g->cells.size());
    }
    return kInf;
}

bool Kernel::integrable() const noexcept {
    if (const auto* p = std::get_if<PowerLawForm>(form_.get())) {
        return !std::isinf(p->cutoff) || p->scale.isZero(0.0);
    }
    return true;
}

bool Kernel::nonincreasing() const noexcept {
    if (const auto* g = std::get_if<GridForm>(form_.get())) {
        for (std::size_t k = 1; k < g->cells.size(); ++k) {
            if ((g->cells[k].array() > g->cells[k - 1].array()).any()) {
                return false;
            }
        }
    }
    return true;
}

Matrix Kernel::l1() const {
    if (!integrable()) {
        throw DomainError("power-law kernel without cutoff is not integrable on [0, inf)");
    }
    return std::visit(overloaded{[](const ExponentialForm& e) -> Matrix {
                                     return e.alpha.cwiseQuotient(e.beta);
                                 },
                                 [](const PowerLawForm& p) -> Matrix { return p.scale; },
                                 [](const GridForm& g) -> Matrix { return grid_prefix(g).back(); }},
                      *form_);
}

ComplexMatrix Kernel::laplace(std::complex<double> z) const {
    if (z.real() < 0.0) {
        throw DomainError("Laplace transform requires Re z >= 0");
    }
    const auto d = static_cast<Eigen::Index>(dimension_);
    return std::visit(
        overloaded{
            [&](const ExponentialForm& e) -> ComplexMatrix {
                ComplexMatrix out(d, d);
                for (Eigen::Index i = 0; i < d; ++i) {
                    for (Eigen::Index j = 0; j < d; ++j) {
                        out(i, j) = e.alpha(i, j) / (z + e.beta(i, j));
                    }
                }
                return out;
            },
            [&](const PowerLawForm& p) -> ComplexMatrix {
                if (p.scale.isZero(0.0)) {
                    return ComplexMatrix::Zero(d, d);
                }
                if (z == 0.0) {
                    return l1().cast<std::complex<double>>();
                }
                std::complex<double> unit;
                if (std::isinf(p.cutoff)) {
                    if (!(z.real() > 0.0)) {
                        throw DomainError("bare power-law transform needs Re z > 0");
                    }
                    unit = std::tgamma(p.exponent + 1.0) * std::pow(z, -p.exponent);
                } else {
                    unit = loglogistic_laplace(z, p.exponent, p.cutoff);
                }
                return p.scale.cast<std::complex<double>>() * unit;
            },
            [&](const GridForm& g) -> ComplexMatrix {
                // exact integral of e^{-zt} over each cell against the cell value
                const std::complex<double> cell_factor =
                    (z == 0.0) ? std::complex<double>(g.step) : -complex_expm1(-z * g.step) / z;
                ComplexMatrix out = ComplexMatrix::Zero(d, d);
                std::complex<double> shift = 1.0;
                const std::complex<double> ratio = std::exp(-z * g.step);
                for (const auto& cell : g.cells) {
                    out += (shift * cell_factor) * cell.cast<std::complex<double>>();
                    shift *= ratio;
                }
                return out;
            }},
        *form_);
}

Kernel Kernel::compressed(double amplitude, double rate) const {
    if (!(amplitude >= 0.0) || !(rate > 0.0)) {
        throw InvalidParameter("compression needs amplitude >= 0 and rate > 0");
    }
    return std::visit(
        overloaded{[&](const ExponentialForm& e) {
                       return Kernel::exponential(amplitude * rate * e.alpha, rate * e.beta);
                   },
                   [&](const PowerLawForm& p) {
                       return Kernel::power_law(amplitude * p.scale, p.exponent, p.cutoff / rate);
                   },
                   [&](const GridForm& g) {
                       std::vector<Matrix> cells;
                       cells.reserve(g.cells.size());
                       for (const auto& c : g.cells) {
                           cells.push_back(amplitude * rate * c);
                       }
                       return Kernel::grid_sampled(g.step / rate, std::move(cells));
                   }},
        *form_);
}

Kernel Kernel::scaled(double amplitude) const {
    if (!(amplitude >= 0.0)) {
        throw InvalidParameter("kernel amplitude must be nonnegative");
    }
    return std::visit(
        overloaded{[&](const ExponentialForm& e) { return Kernel::exponential(amplitude * e.alpha, e.beta); },
                   [&](const PowerLawForm& p) {
                       return Kernel::power_law(amplitude * p.scale, p.exponent, p.cutoff);
                   },
                   [&](const GridForm& g) {
                       std::vector<Matrix> cells;
                       cells.reserve(g.cells.size());
                       for (const auto& c : g.cells) {
                           cells.push_back(amplitude * c);
                       }
                       return Kernel::grid_sampled(g.step, std::move(cells));
                   }},
        *form_);
}

double Kernel::displacement_quantile(std::size_t i, std::size_t j, double u) const {
    const auto ii = static_cast<Eigen::Index>(i);
    const auto jj = static_cast<Eigen::Index>(j);
    return std::visit(
        overloaded{[&](const ExponentialForm& e) { return -std::log1p(-u) / e.beta(ii, jj); },
                   [&](const PowerLawForm& p) {
                       if (std::isinf(p.cutoff)) {
                           throw DomainError("bare power-law kernel has no displacement law");
                       }
                       return p.cutoff * std::pow(u / (1.0 - u), 1.0 / p.exponent);
                   },
                   [&](const GridForm& g) {
                       const double total = grid_cumulative(g, i, j, support_end());
                       const double target = u * total;
                       double acc = 0.0;
                       for (std::size_t k = 0; k < g.cells.size(); ++k) {
                           const double mass = g.step * g.cells[k](ii, jj);
                           if (acc + mass >= target && mass > 0.0) {
                               return g.step * (static_cast<double>(k) + (target - acc) / mass);
                           }
                           acc += mass;
                       }
                       return support_end();
                   }},
        *form_);
}

double spectral_radius(const Matrix& a) {
    if (a.rows() != a.cols()) {
        throw InvalidParameter("spectral radius needs a square matrix");
    }
    if (a.isZero(0.0)) {
        return 0.0;
    }
    const Matrix shifted = a + Matrix::Identity(a.rows(), a.cols());
    Vector x = Vector::Constant(a.rows(), 1.0 / static_cast<double>(a.rows()));
    double estimate = 0.0;
    for (int it = 0; it < 200; ++it) {
        Vector y = shifted * x;
        const double next = y.sum();  // x sums to one
        x = y / next;
        const bool converged = std::abs(next - estimate) < 1e-12 * next;
        estimate = next;
        if (converged) {
            break;
        }
    }
    return std::max(estimate - 1.0, 0.0);
}

StabilityReport l1_and_stability(const Kernel& kernel) {
    StabilityReport report;
    report.l1 = kernel.l1();
    report.spectral_radius = spectral_radius(report.l1);
    report.stable = report.spectral_radius < 1.0;
    return report;
}

double BnSchedule::operator()(std::size_t n) const {
    return coefficient * std::pow(static_cast<double>(n), power);
}

NearlyUnstableFamily::NearlyUnstableFamily(Kernel base, double c, BnSchedule schedule, Vector target)
    : base_(std::move(base)), c_(c), schedule_(schedule), target_(std::move(target)) {
    if (!(c > 0.0)) {
        throw InvalidParameter("JR family needs c > 0");
    }
    if (!(schedule_.coefficient > 0.0) || !(schedule_.power > 0.0)) {
        throw InvalidParameter("b_n schedule must be positive and increasing");
    }
    if (static_cast<std::size_t>(target_.size()) != base_.dimension()) {
        throw InvalidParameter("target limit a must have the kernel dimension");
    }
    if ((target_.array() < 0.0).any()) {
        throw InvalidParameter("target limit a must be nonnegative");
    }
    const double rho = spectral_radius(base_.l1());
    if (std::abs(rho - 1.0) > 1e-6) {
        throw InvalidParameter("JR base kernel must have spectral radius 1, got " + std::to_string(rho));
    }
}

double NearlyUnstableFamily::a(std::size_t n) const {
    const double ratio = c_ / b(n);
    if (ratio >= 1.0) {
        throw InvalidParameter("c / b_n >= 1 at n = " + std::to_string(n) + " (a_n would be <= 0)");
    }
    return 1.0 - ratio;
}

double NearlyUnstableFamily::beta(std::size_t n) const {
    return 1.0 - a(n);
}

Kernel NearlyUnstableFamily::kernel(std::size_t n) const {
    return base_.compressed(a(n), b(n));
}

Vector NearlyUnstableFamily::baseline(std::size_t n) const {
    return target_ / beta(n);
}

NearlyUnstableFamily make_jr_family(Kernel base, double c, BnSchedule schedule, Vector target) {
    if (target.size() != static_cast<Eigen::Index>(base.dimension())) {
        if (target.size() == 1) {
            target = Vector::Constant(static_cast<Eigen::Index>(base.dimension()), target(0));
        }
    }
    return NearlyUnstableFamily(std::move(base), c, schedule, std::move(target));
}

double stable_coefficient(const StableLevy& stable) {
    return stable.scale * std::tgamma(1.0 - stable.exponent) / stable.exponent;
}

double levy_integrability_mass(const LevyMeasure& levy) {
    return std::visit(overloaded{[](std::monostate) { return 0.0; },
                                 [](const StableLevy& s) {
                                     if (!(s.exponent > 0.0 && s.exponent < 1.0)) {
                                         return kInf;
                                     }
                                     // int_0^1 x C x^{-1-a} + int_1^inf C x^{-1-a}
                                     return s.scale / (1.0 - s.exponent) + s.scale / s.exponent;
                                 },
                                 [](const DiscreteLevy& d) {
                                     double mass = 0.0;
                                     for (std::size_t k = 0; k < d.atoms.size(); ++k) {
                                         mass += std::min(1.0, d.atoms[k]) * d.weights[k];
                                     }
                                     return mass;
                                 }},
                      levy);
}

BernsteinTriplet BernsteinTriplet::make(double drift, double linear, LevyMeasure levy) {
    if (!(drift >= 0.0) || !(linear >= 0.0)) {
        throw InvalidParameter("Bernstein drift and linear coefficient must be nonnegative");
    }
    if (const auto* s = std::get_if<StableLevy>(&levy)) {
        if (!(s->scale >= 0.0) || !(s->exponent > 0.0 && s->exponent < 1.0)) {
            throw InvalidParameter("stable Levy measure needs scale >= 0 and exponent in (0, 1)");
        }
    }
    if (const auto* d = std::get_if<DiscreteLevy>(&levy)) {
        if (d->atoms.size() != d->weights.size()) {
            throw InvalidParameter("discrete Levy measure: atoms and weights differ in length");
        }
        for (std::size_t k = 0; k < d->atoms.size(); ++k) {
            if (!(d->atoms[k] > 0.0) || !(d->weights[k] >= 0.0)) {
                throw InvalidParameter("discrete Levy measure needs positive atoms, nonnegative weights");
            }
        }
    }
    if (!std::isfinite(levy_integrability_mass(levy))) {
        throw InvalidParameter("Levy measure violates int (1 ^ x) nu(dx) < inf");
    }
    return BernsteinTriplet{drift, linear, std::move(levy)};
}

BernsteinValue bernstein_eval(const BernsteinTriplet& triplet, double z) {
    if (!(z >= 0.0)) {
        throw DomainError("Bernstein function evaluated at negative z");
    }
    double jump_part = std::visit(overloaded{[](std::monostate) { return 0.0; },
                                             [&](const StableLevy& s) {
                                                 return stable_coefficient(s) * std::pow(z, s.exponent);
                                             },
                                             [&](const DiscreteLevy& d) {
                                                 double acc = 0.0;
                                                 for (std::size_t k = 0; k < d.atoms.size(); ++k) {
                                                     acc += -std::expm1(-z * d.atoms[k]) * d.weights[k];
                                                 }
                                                 return acc;
                                             }},
                                  triplet.levy);
    BernsteinValue out;
    out.phi = triplet.drift + triplet.linear * z + jump_part;
    if (out.phi > 0.0) {
        out.limit_laplace = 1.0 / out.phi;
    }
    return out;
}

double limit_laplace(const BernsteinTriplet& triplet, double z) {
    const auto value = bernstein_eval(triplet, z);
    if (!value.limit_laplace) {
        throw DomainError("Phi(z) = 0: limit Laplace transform 1/Phi undefined");
    }
    return *value.limit_laplace;
}

DiscreteLevy discretize_stable(const StableLevy& stable, std::size_t atoms, double x_min, double x_max) {
    if (atoms == 0 || !(x_min > 0.0) || !(x_max > x_min)) {
        throw InvalidParameter("discretization needs atoms > 0 and 0 < x_min < x_max");
    }
    if (!(stable.exponent > 0.0 && stable.exponent < 1.0)) {
        throw InvalidParameter("stable exponent must lie in (0, 1)");
    }
    DiscreteLevy out;
    out.atoms.resize(atoms);
    out.weights.resize(atoms);
    const double log_lo = std::log(x_min);
    const double log_step = (std::log(x_max) - log_lo) / static_cast<double>(atoms);
    const double a = stable.exponent;
    for (std::size_t k = 0; k < atoms; ++k) {
        const double left = std::exp(log_lo + log_step * static_cast<double>(k));
        const double right = std::exp(log_lo + log_step * static_cast<double>(k + 1));
        out.atoms[k] = std::sqrt(left * right);
        out.weights[k] = stable.scale / a * (std::pow(left, -a) - std::pow(right, -a));
    }
    out.truncation_error = stable.scale * std::pow(x_min, 1.0 - a) / (1.0 - a) +
                           stable.scale * std::pow(x_max, -a) / a;
    return out;
}

} // namespace nuhawkes
