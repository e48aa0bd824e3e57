#include "nuhawkes/ensemble.hpp"
#include "nuhawkes/errors.hpp"
#include "nuhawkes/hawkes.hpp"
#include "nuhawkes/resolvent.hpp"
#include "nuhawkes/stats.hpp"

#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace nuhawkes;
using doctest::Approx;

namespace {

struct Moments {
    double mean = 0.0;
    double se = 0.0;
};

Moments moments(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) {
        s += v;
    }
    const double m = s / static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) {
        ss += (v - m) * (v - m);
    }
    const double var = ss / static_cast<double>(x.size() - 1);
    return {m, std::sqrt(var / static_cast<double>(x.size()))};
}

std::vector<double> terminal_counts(const HawkesParams& p, std::size_t paths, std::uint64_t seed, bool cluster,
                                    std::size_t component = 0) {
    return run_ensemble(paths, 1, [&](std::size_t i) {
        const auto path = cluster ? simulate_cluster(p, seed, i) : simulate_thinning(p, seed, i);
        return path.counts_at(p.horizon)(static_cast<Eigen::Index>(component));
    });
}

HawkesParams scalar(double mu, Kernel k, double horizon) {
    return HawkesParams{Vector::Constant(1, mu), std::move(k), horizon};
}

} // namespace

TEST_CASE("paths are sorted, inside the horizon and reproducible") {
    const auto p = scalar(2.0, Kernel::exponential(0.5, 1.0), 3.0);
    const auto a = simulate_thinning(p, 9, 4);
    const auto b = simulate_thinning(p, 9, 4);
    const auto c = simulate_thinning(p, 9, 5);
    CHECK(a.times == b.times);
    CHECK(a.times != c.times);
    CHECK(std::is_sorted(a.times.begin(), a.times.end()));
    CHECK(a.size() > 0);
    CHECK(a.times.front() > 0.0);
    CHECK(a.times.back() <= 3.0);
    CHECK(a.components.size() == a.times.size());
    CHECK(a.counts_at(3.0)(0) == Approx(static_cast<double>(a.size())));
    CHECK(a.counts_at(0.0)(0) == 0.0);
    CHECK(a.component_times(0) == a.times);
}

TEST_CASE("zero kernel gives a Poisson count") {
    const auto x = terminal_counts(scalar(3.0, Kernel::zero(1), 2.0), 4000, 1, false);
    const auto m = moments(x);
    CHECK(std::abs(m.mean - 6.0) < 4.0 * m.se);
    double ss = 0.0;
    for (double v : x) {
        ss += (v - m.mean) * (v - m.mean);
    }
    // Poisson: variance = mean; SE of the sample variance ~ sqrt((mu4 - s^4) / N) with mu4 = 3 m^2 + m
    const double var = ss / static_cast<double>(x.size() - 1);
    CHECK(std::abs(var - 6.0) < 4.0 * std::sqrt((3.0 * 36.0 + 6.0 - 36.0) / 4000.0));
}

TEST_CASE("expected count and intensity for the exponential kernel") {
    // psi = e^{-t}: E lambda(t) = 2 - e^{-t}, E N(1) = 1 + e^{-1}
    const auto p = scalar(1.0, Kernel::exponential(1.0, 2.0), 1.0);
    for (bool cluster : {false, true}) {
        const auto m = moments(terminal_counts(p, 10000, 21, cluster));
        CHECK(std::abs(m.mean - (1.0 + std::exp(-1.0))) < 4.0 * m.se);
    }
    const auto lam = run_ensemble(10000, 1, [&](std::size_t i) { return intensity_at(simulate_thinning(p, 22, i), 1.0)(0); });
    const auto m = moments(lam);
    CHECK(std::abs(m.mean - (2.0 - std::exp(-1.0))) < 4.0 * m.se);
}

TEST_CASE("bivariate mean count against the matrix exponential") {
    Matrix alpha(2, 2);
    alpha << 0.3, 0.2, 0.1, 0.4;
    const double beta = 2.0;
    const Vector mu = (Vector(2) << 1.0, 0.5).finished();
    const double T = 2.0;
    const HawkesParams p{mu, Kernel::exponential(alpha, Matrix::Constant(2, 2, beta)), T};
    // int_0^T (I + Psi(s)) mu ds with Psi(t) = alpha G^{-1} (e^{Gt} - I), G = alpha - beta I
    const Matrix g = alpha - beta * Matrix::Identity(2, 2);
    const Matrix gi = g.inverse();
    const Matrix int_psi = alpha * gi * (gi * ((g * T).exp() - Matrix::Identity(2, 2)) - T * Matrix::Identity(2, 2));
    const Vector expect = T * mu + int_psi * mu;
    for (std::size_t comp : {0u, 1u}) {
        const auto m = moments(terminal_counts(p, 4000, 31, false, comp));
        CHECK(std::abs(m.mean - expect(static_cast<Eigen::Index>(comp))) < 4.0 * m.se);
    }
}

TEST_CASE("singular power-law mean count against the resolvent table") {
    const double T = 1.0;
    const auto k = Kernel::power_law(0.6, 0.6, 0.5);
    const auto p = scalar(2.0, k, T);
    // E N(T) = mu T + mu int_0^T Psi(s) ds, Psi from the tabulated resolvent (trapezoid in s)
    const auto table = resolvent_grid(k, Grid(T, 1e-3));
    double int_psi = 0.0;
    for (std::size_t i = 0; i + 1 < table.cumulative.size(); ++i) {
        int_psi += 0.5 * (table.cumulative[i](0, 0) + table.cumulative[i + 1](0, 0)) * table.grid.step();
    }
    const double expect = 2.0 * (T + int_psi);
    for (bool cluster : {false, true}) {
        const auto m = moments(terminal_counts(p, 6000, 41, cluster));
        CHECK(std::abs(m.mean - expect) < 4.0 * m.se + 2e-3);
    }
}

TEST_CASE("thinning and cluster paths share a law") {
    const auto p = scalar(1.0, Kernel::exponential(0.6, 1.5), 2.0);
    const auto a = terminal_counts(p, 3000, 51, false);
    const auto b = terminal_counts(p, 3000, 52, true);
    const auto r = ks_distance(a, b);
    CHECK(r.pass);
}

TEST_CASE("compensator routes agree and M = N - Lambda") {
    const auto p = scalar(1.5, Kernel::exponential(0.7, 1.3), 2.0);
    auto path = simulate_thinning(p, 61, 0);
    const Grid grid(2.0, 0.01);
    attach_nodes(path, grid);
    REQUIRE(path.nodes.has_value());
    const auto& n = *path.nodes;
    for (std::size_t k : {0u, 50u, 137u, 200u}) {
        const double t = grid.node(k);
        const auto e = static_cast<Eigen::Index>(k);
        CHECK(n.compensator(e, 0) == Approx(compensator_quadrature(path, t)(0)).epsilon(1e-10));
        CHECK(n.counts(e, 0) == Approx(path.counts_at(t)(0)));
        CHECK(n.martingale(e, 0) == Approx(n.counts(e, 0) - n.compensator(e, 0)));
    }
    CHECK(n.compensator(0, 0) == 0.0);
    CHECK_THROWS_AS((void)compensator_quadrature(path, 3.0), OutOfRangeError);

    std::ostringstream ev;
    path.write_events_csv(ev);
    CHECK(ev.str().rfind("component,time\n", 0) == 0);
    std::ostringstream nodes;
    path.write_nodes_csv(nodes);
    const std::string text = nodes.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(grid.nodes() + 1));
}

TEST_CASE("singular compensator against the log-logistic distribution function") {
    // Lambda(t) = mu t + sum_{tau < t} C (t - tau)^p / (c^p + (t - tau)^p)
    const double C = 0.5;
    const double pw = 0.7;
    const double c = 1.0;
    auto path = simulate_thinning(scalar(1.5, Kernel::power_law(C, pw, c), 2.0), 62, 0);
    const Grid grid(2.0, 0.01);
    attach_nodes(path, grid);
    for (std::size_t k : {37u, 120u, 200u}) {
        const double t = grid.node(k);
        double lam = 1.5 * t;
        for (double tau : path.times) {
            if (tau < t) {
                const double u = std::pow(t - tau, pw);
                lam += C * u / (std::pow(c, pw) + u);
            }
        }
        CHECK(path.nodes->compensator(static_cast<Eigen::Index>(k), 0) == Approx(lam).epsilon(1e-12));
    }
}

TEST_CASE("intensity is mu plus the kernel sum over earlier events") {
    const auto k = Kernel::exponential(0.8, 1.2);
    const auto path = simulate_thinning(scalar(1.0, k, 3.0), 71, 0);
    const double t = 2.2;
    double manual = 1.0;
    for (double tau : path.times) {
        if (tau < t) {
            manual += 0.8 * std::exp(-1.2 * (t - tau));
        }
    }
    CHECK(intensity_at(path, t)(0) == Approx(manual));
}

TEST_CASE("rescaled triple") {
    auto path = simulate_thinning(scalar(1.0, Kernel::exponential(0.5, 1.0), 1.0), 81, 0);
    const Grid grid(1.0, 0.1);
    attach_nodes(path, grid);
    const auto r = rescale_path(path, 0.2, grid);
    const auto& n = *path.nodes;
    CHECK(r.counts.isApprox(0.04 * n.counts));
    CHECK(r.compensator.isApprox(0.04 * n.compensator));
    CHECK(r.martingale.isApprox(0.2 * n.martingale));
    CHECK_THROWS_AS((void)rescale_path(path, 0.0, grid), InvalidParameter);
}

TEST_CASE("invalid simulations are refused") {
    const auto up = Kernel::grid_sampled(0.5, {Matrix::Constant(1, 1, 0.1), Matrix::Constant(1, 1, 0.5)});
    CHECK_THROWS_AS((void)simulate_thinning(scalar(1.0, up, 1.0), 1), UnsupportedSimulation);
    CHECK_THROWS_AS((void)simulate_cluster(scalar(1.0, Kernel::exponential(1.2, 1.0), 1.0), 1), UnsupportedSimulation);
    CHECK_THROWS_AS((void)simulate_thinning(scalar(-1.0, Kernel::zero(1), 1.0), 1), InvalidParameter);
    CHECK_THROWS_AS((void)simulate_thinning(HawkesParams{Vector::Ones(2), Kernel::zero(1), 1.0}, 1), InvalidParameter);
    CHECK_THROWS((void)simulate_thinning(scalar(1.0, Kernel::zero(1), 0.0), 1));
    auto path = simulate_thinning(scalar(1.0, Kernel::zero(1), 1.0), 1);
    CHECK_THROWS_AS(attach_nodes(path, Grid(2.0, 0.1)), OutOfRangeError);
}
