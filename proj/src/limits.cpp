#include "nuhawkes/limits.hpp"

#include "nuhawkes/errors.hpp"
#include "nuhawkes/random.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace nuhawkes {

namespace {

// One Brownian stream per (seed, path) shared by the CIR and SVE solvers.
constexpr const char* kBrownianTag = "limits.brownian";

double positive(double v) { return v > 0.0 ? v : 0.0; }

LimitKernelSpec spec_from_distribution(const Grid& grid, const std::vector<double>& dist, std::string provenance) {
    LimitKernelSpec spec;
    spec.grid = grid;
    spec.provenance = std::move(provenance);
    spec.distribution.reserve(dist.size());
    for (double v : dist) {
        spec.distribution.push_back(Matrix::Constant(1, 1, v));
    }
    spec.density.reserve(grid.cells());
    for (std::size_t k = 0; k < grid.cells(); ++k) {
        spec.density.push_back(Matrix::Constant(1, 1, (dist[k + 1] - dist[k]) / grid.step()));
    }
    return spec;
}

// G = k_{alpha+1} / lambda - (m / lambda) k_alpha * G with k_a(t) = t^(a-1)/Gamma(a),
// by product integration against the piecewise-linear interpolant of G.
std::vector<double> mittag_leffler_distribution(double m, double lambda, double alpha, const Grid& grid) {
    const std::size_t nodes = grid.nodes();
    const double h = grid.step();
    const double c = m / lambda;
    const double w = std::pow(h, alpha) / std::tgamma(alpha + 2.0);
    std::vector<double> g(nodes, 0.0);
    std::vector<double> pw(nodes + 1);
    for (std::size_t i = 0; i <= nodes; ++i) {
        pw[i] = std::pow(static_cast<double>(i), alpha + 1.0);
    }
    for (std::size_t k = 1; k < nodes; ++k) {
        // weight on G_0 vanishes since G(0) = 0; interior weights depend on k - j only
        double conv = 0.0;
        for (std::size_t j = 1; j < k; ++j) {
            const std::size_t l = k - j;
            conv += (pw[l + 1] + pw[l - 1] - 2.0 * pw[l]) * g[j];
        }
        const double source = std::pow(grid.node(k), alpha) / (lambda * std::tgamma(alpha + 1.0));
        g[k] = (source - c * w * conv) / (1.0 + c * w);
    }
    return g;
}

} // namespace

void CIRParams::validate() const {
    if (!(b > 0.0) || !(a >= 0.0) || !(sigma >= 0.0) || !(xi0 >= 0.0)) {
        throw InvalidParameter("CIR needs b > 0 and a, sigma, xi0 >= 0");
    }
}

CIRPath solve_cir(const CIRParams& params, const Grid& grid, std::uint64_t seed, std::uint64_t path_index) {
    params.validate();
    CIRPath path;
    path.grid = grid;
    const double h = grid.step();
    if (params.b * h >= 1.0) {
        path.warnings.push_back("b * h >= 1: Euler step does not resolve mean reversion");
    }
    Sampler rng(make_stream(seed, kBrownianTag, path_index));
    const auto cells = static_cast<Eigen::Index>(grid.cells());
    path.values = Vector(cells + 1);
    path.increments = Vector(cells);
    const double sqrt_h = std::sqrt(h);
    double xi = params.xi0;
    path.values(0) = positive(xi);
    for (Eigen::Index k = 0; k < cells; ++k) {
        const double db = sqrt_h * rng.normal();
        path.increments(k) = db;
        const double plus = positive(xi);
        xi = xi + params.b * (params.a - plus) * h + params.sigma * std::sqrt(plus) * db;
        path.values(k + 1) = positive(xi);
    }
    return path;
}

LimitKernelSpec LimitKernelSpec::from_bernstein(const BernsteinTriplet& triplet, const Grid& grid) {
    const double m = triplet.drift;
    const double lambda = triplet.linear;
    std::vector<double> dist(grid.nodes());
    if (std::holds_alternative<std::monostate>(triplet.levy)) {
        if (!(lambda > 0.0)) {
            throw DomainError("Phi(z) = m has limit measure delta_0 / m, which has no density");
        }
        for (std::size_t k = 0; k < dist.size(); ++k) {
            const double t = grid.node(k);
            dist[k] = (m > 0.0) ? -std::expm1(-m * t / lambda) / m : t / lambda;
        }
        return spec_from_distribution(grid, dist,
                                      "bernstein(m=" + std::to_string(m) + ", lambda=" + std::to_string(lambda) + ")");
    }
    if (const auto* stable = std::get_if<StableLevy>(&triplet.levy); stable != nullptr && lambda == 0.0) {
        const double coefficient = stable_coefficient(*stable);
        if (!(coefficient > 0.0)) {
            throw DomainError("stable Levy measure with zero mass");
        }
        dist = mittag_leffler_distribution(m, coefficient, stable->exponent, grid);
        return spec_from_distribution(grid, dist,
                                      "bernstein(m=" + std::to_string(m) + ", lambda=" + std::to_string(coefficient) +
                                          ", alpha=" + std::to_string(stable->exponent) + ")");
    }
    throw DomainError("no grid inversion for this Bernstein triplet; build the spec from a resolvent table");
}

LimitKernelSpec LimitKernelSpec::fractional(double alpha, const Grid& grid, double scale, FractionalNorm norm) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidParameter("fractional exponent must lie in (0, 1)");
    }
    if (!(scale >= 0.0)) {
        throw InvalidParameter("fractional scale must be nonnegative");
    }
    const double gamma =
        std::tgamma(norm == FractionalNorm::gamma_one_minus_alpha ? 1.0 - alpha : alpha);
    std::vector<double> dist(grid.nodes());
    for (std::size_t k = 0; k < dist.size(); ++k) {
        dist[k] = scale * std::pow(grid.node(k), alpha) / (alpha * gamma);
    }
    const char* label = norm == FractionalNorm::gamma_one_minus_alpha ? "gamma(1-alpha)" : "gamma(alpha)";
    return spec_from_distribution(grid, dist,
                                  "fractional(alpha=" + std::to_string(alpha) + ", norm=" + label + ")");
}

LimitKernelSpec LimitKernelSpec::from_resolvent(const ResolventTable& table) {
    if (table.density.empty()) {
        throw InvalidParameter("resolvent table carries no scaled density");
    }
    LimitKernelSpec spec;
    spec.grid = table.grid;
    spec.density = table.density;
    spec.distribution = table.distribution;
    spec.provenance = "resolvent(beta=" + std::to_string(table.beta.value_or(1.0)) + ")";
    return spec;
}

void LimitKernelSpec::validate() const {
    if (density.size() != grid.cells() || distribution.size() != grid.nodes()) {
        throw InvalidParameter("limit kernel spec does not match its grid");
    }
    for (const auto& cell : density) {
        if (!cell.allFinite() || (cell.array() < 0.0).any()) {
            throw InvalidParameter("limit kernel density has negative or non-finite cells");
        }
    }
}

void LimitKernelSpec::write_csv(std::ostream& out) const {
    out << "t,f,F\n";
    out.precision(17);
    for (std::size_t k = 0; k < distribution.size(); ++k) {
        const std::size_t cell = std::min(k, density.size() - 1);
        out << grid.node(k) << ',' << density[cell](0, 0) << ',' << distribution[k](0, 0) << '\n';
    }
}

CIRParams cir_correspondence(const BernsteinTriplet& triplet, double a) {
    if (!std::holds_alternative<std::monostate>(triplet.levy) || !(triplet.linear > 0.0) || !(triplet.drift > 0.0)) {
        throw DomainError("CIR correspondence needs a triplet (m > 0, lambda > 0, nu = 0)");
    }
    CIRParams p;
    p.b = triplet.drift / triplet.linear;
    p.a = a / triplet.drift;
    p.sigma = 1.0 / triplet.linear;
    p.xi0 = 0.0;
    return p;
}

SVEPath solve_sve(const LimitKernelSpec& spec, const Vector& a, std::uint64_t seed, std::uint64_t path_index) {
    spec.validate();
    const auto d = static_cast<Eigen::Index>(spec.dimension());
    if (a.size() != d) {
        throw InvalidParameter("level vector a must match the kernel dimension");
    }
    if ((a.array() < 0.0).any()) {
        throw InvalidParameter("level vector a must be nonnegative");
    }
    const Grid& grid = spec.grid;
    const double h = grid.step();
    const double sqrt_h = std::sqrt(h);
    const auto cells = static_cast<Eigen::Index>(grid.cells());
    Sampler rng(make_stream(seed, kBrownianTag, path_index));

    SVEPath path;
    path.grid = grid;
    path.y = Matrix::Zero(cells + 1, d);
    path.x = Matrix::Zero(cells + 1, d);
    path.z = Matrix::Zero(cells + 1, d);
    path.increments = Matrix::Zero(cells, d);

    // flat copies: fbar[(i * d + r) * cells + l] and noise[r * cells + j] = sqrt(Y_{j,r}^+) dB_{j,r}
    const auto du = static_cast<std::size_t>(d);
    const auto mc = static_cast<std::size_t>(cells);
    std::vector<double> fbar(du * du * mc);
    for (std::size_t l = 0; l < mc; ++l) {
        for (std::size_t i = 0; i < du; ++i) {
            for (std::size_t r = 0; r < du; ++r) {
                fbar[(i * du + r) * mc + l] =
                    spec.density[l](static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r));
            }
        }
    }
    std::vector<double> noise(du * mc, 0.0);
    for (std::size_t k = 0; k <= mc; ++k) {
        Vector yk = spec.distribution[k] * a;
        for (std::size_t i = 0; i < du; ++i) {
            double acc = 0.0;
            for (std::size_t r = 0; r < du; ++r) {
                const double* f = fbar.data() + (i * du + r) * mc;
                const double* w = noise.data() + r * mc;
                // fbar_{k-j} averages [(k-j-1)h, (k-j)h], i.e. cell k-j-1
                for (std::size_t j = 0; j < k; ++j) {
                    acc += f[k - j - 1] * w[j];
                }
            }
            yk(static_cast<Eigen::Index>(i)) += acc;
        }
        const auto ki = static_cast<Eigen::Index>(k);
        path.y.row(ki) = yk.transpose();
        if (k > 0) {
            for (Eigen::Index i = 0; i < d; ++i) {
                path.x(ki, i) = path.x(ki - 1, i) + 0.5 * h * (positive(path.y(ki - 1, i)) + positive(yk(i)));
                path.z(ki, i) = path.z(ki - 1, i) + noise[static_cast<std::size_t>(i) * mc + k - 1];
            }
        }
        if (k < mc) {
            for (std::size_t i = 0; i < du; ++i) {
                const double db = sqrt_h * rng.normal();
                path.increments(ki, static_cast<Eigen::Index>(i)) = db;
                noise[i * mc + k] = std::sqrt(positive(yk(static_cast<Eigen::Index>(i)))) * db;
            }
        }
    }
    return path;
}

Regime Regime::finite(double zeta) {
    if (!(zeta > 0.0) || !std::isfinite(zeta)) {
        throw ConfigError("finite regime needs 0 < zeta < inf");
    }
    return {Kind::finite, zeta};
}

Regime Regime::from_zeta(double zeta) {
    if (zeta == 0.0) {
        return zero();
    }
    if (std::isinf(zeta)) {
        return infinite();
    }
    return finite(zeta);
}

std::string Regime::name() const {
    switch (kind) {
    case Kind::zero:
        return "zero";
    case Kind::finite:
        return "finite";
    case Kind::infinite:
        return "infinite";
    }
    return "unknown";
}

RegimeLimitSample sample_regime_limit(const Regime& regime, const SVEPath& xbar, std::size_t tagged,
                                      std::uint64_t seed, std::uint64_t path_index) {
    if (regime.kind == Regime::Kind::finite) {
        (void)Regime::finite(regime.zeta);  // validates zeta
    }
    const Vector driver = xbar.x.col(0);
    const auto rows = driver.size();
    for (Eigen::Index k = 1; k < rows; ++k) {
        if (driver(k) < driver(k - 1)) {
            throw InvalidParameter("driving path Xbar must be nondecreasing");
        }
    }
    RegimeLimitSample out;
    out.regime = regime;
    out.grid = xbar.grid;
    out.xbar = driver;
    const auto kk = static_cast<Eigen::Index>(tagged);
    out.x = Matrix::Zero(rows, kk);
    out.z = Matrix::Zero(rows, kk);
    out.drivers = Matrix::Zero(rows, kk);
    if (regime.kind == Regime::Kind::infinite) {
        return out;
    }
    Sampler rng(make_stream(seed, "limits.regime", path_index));
    for (Eigen::Index i = 0; i < kk; ++i) {
        double level = 0.0;
        for (Eigen::Index k = 1; k < rows; ++k) {
            const double dx = driver(k) - driver(k - 1);
            if (regime.kind == Regime::Kind::zero) {
                level += std::sqrt(dx) * rng.normal();  // W_i on the clock Xbar
            } else {
                level += static_cast<double>(rng.poisson(dx / regime.zeta));  // N_i on the clock Xbar/zeta
            }
            out.drivers(k, i) = level;
        }
        for (Eigen::Index k = 0; k < rows; ++k) {
            if (regime.kind == Regime::Kind::zero) {
                out.x(k, i) = driver(k);
                out.z(k, i) = out.drivers(k, i);
            } else {
                const double clock = driver(k) / regime.zeta;
                out.x(k, i) = regime.zeta * out.drivers(k, i);
                out.z(k, i) = std::sqrt(regime.zeta) * (out.drivers(k, i) - clock);
            }
        }
    }
    return out;
}

EmpiricalMeasureSnapshot limit_empirical_law(const Regime& regime, const SVEPath& xbar, double t, std::size_t m,
                                             std::uint64_t seed, std::uint64_t path_index) {
    const Grid& grid = xbar.grid;
    if (t < 0.0 || t > grid.end() * (1.0 + 1e-12)) {
        throw OutOfRangeError("snapshot time outside the SVE grid");
    }
    const auto k = std::min(static_cast<std::size_t>(t / grid.step()), grid.cells() - 1);
    const double frac = (t - grid.node(k)) / grid.step();
    const auto ki = static_cast<Eigen::Index>(k);
    const double x = (1.0 - frac) * xbar.x(ki, 0) + frac * xbar.x(ki + 1, 0);

    EmpiricalMeasureSnapshot snap;
    snap.time = t;
    snap.source = "limit:" + regime.name();
    if (regime.kind == Regime::Kind::infinite || m == 0) {
        snap.xs = {0.0};
        snap.zs = {0.0};
        snap.weights = {1.0};
        return snap;
    }
    Sampler rng(make_stream(seed, "limits.empirical", path_index));
    snap.xs.resize(m);
    snap.zs.resize(m);
    snap.weights.assign(m, 1.0 / static_cast<double>(m));
    for (std::size_t i = 0; i < m; ++i) {
        if (regime.kind == Regime::Kind::zero) {
            snap.xs[i] = x;
            snap.zs[i] = std::sqrt(x) * rng.normal();
        } else {
            const double count = static_cast<double>(rng.poisson(x / regime.zeta));
            snap.xs[i] = regime.zeta * count;
            snap.zs[i] = std::sqrt(regime.zeta) * (count - x / regime.zeta);
        }
    }
    return snap;
}

} // namespace nuhawkes
