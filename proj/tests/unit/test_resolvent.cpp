#include "nuhawkes/errors.hpp"
#include "nuhawkes/resolvent.hpp"

#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

using namespace nuhawkes;
using doctest::Approx;

namespace {

// max |psi_grid - exact| at cell midpoints, entrywise
template <class Exact>
double midpoint_error(const ResolventTable& t, Exact exact) {
    double worst = 0.0;
    for (std::size_t k = 0; k < t.grid.cells(); ++k) {
        worst = std::max(worst, (t.psi[k] - exact(t.grid.midpoint(k))).cwiseAbs().maxCoeff());
    }
    return worst;
}

} // namespace

TEST_CASE("scalar exponential resolvent converges at first order") {
    // phi = e^{-2t} gives psi = e^{-t}
    const auto k = Kernel::exponential(1.0, 2.0);
    auto exact = [](double t) { return Matrix::Constant(1, 1, std::exp(-t)); };
    const double e1 = midpoint_error(resolvent_grid(k, Grid(5.0, 2e-3)), exact);
    const double e2 = midpoint_error(resolvent_grid(k, Grid(5.0, 1e-3)), exact);
    CHECK(e2 <= 1e-3);
    CHECK(e1 / e2 == Approx(2.0).epsilon(0.1));

    const auto t = resolvent_grid(k, Grid(5.0, 1e-3));
    CHECK(t.psi.size() == 5000);
    CHECK(t.cumulative.size() == 5001);
    CHECK(t.cumulative.front().isZero());
    CHECK(t.cumulative.back()(0, 0) == Approx(1.0 - std::exp(-5.0)).epsilon(1e-3));
    CHECK(t.warnings.empty());
    CHECK(discrete_residual(k, t) < 1e-12);
}

TEST_CASE("matrix exponential resolvent matches alpha exp((alpha - beta I) t)") {
    Matrix alpha(2, 2);
    alpha << 0.3, 0.2, 0.1, 0.4;
    const double beta = 2.0;
    const auto k = Kernel::exponential(alpha, Matrix::Constant(2, 2, beta));
    const Matrix gen = alpha - beta * Matrix::Identity(2, 2);
    auto exact = [&](double t) { return Matrix(alpha * (gen * t).exp()); };
    const double e = midpoint_error(resolvent_grid(k, Grid(4.0, 1e-3)), exact);
    CHECK(e < 1e-3);
}

TEST_CASE("zero kernel has zero resolvent") {
    const auto t = resolvent_grid(Kernel::zero(2), Grid(1.0, 0.1));
    for (const auto& m : t.psi) {
        CHECK(m.isZero());
    }
}

TEST_CASE("grid queries") {
    const auto t = resolvent_grid(Kernel::exponential(1.0, 2.0), Grid(1.0, 0.01));
    CHECK(t.psi_at(0.505)(0, 0) == Approx(t.psi[50](0, 0)));
    CHECK(t.cumulative_at(0.5)(0, 0) == Approx(t.cumulative[50](0, 0)));
    const double mid = 0.5 * (t.cumulative[50](0, 0) + t.cumulative[51](0, 0));
    CHECK(t.cumulative_at(0.505)(0, 0) == Approx(mid));
    CHECK_THROWS_AS((void)t.psi_at(2.0), OutOfRangeError);
    CHECK_THROWS_AS((void)t.psi_at(-0.1), OutOfRangeError);
}

TEST_CASE("Laplace identity for an exponential kernel") {
    const auto k = Kernel::exponential(1.0, 2.0);
    const auto t = resolvent_grid(k, Grid(20.0, 1e-3));
    for (const auto& r : verify_laplace_identity(k, t, {0.5, 1.0, 2.0})) {
        CHECK_FALSE(r.singular);
        CHECK(r.residual < 1e-3);
    }
    // table transform against 1 / (1 + z) directly
    CHECK(t.laplace(1.0)(0, 0).real() == Approx(0.5).epsilon(1e-3));
    CHECK_THROWS_AS((void)verify_laplace_identity(k, t, {0.0}), DomainError);
}

TEST_CASE("Laplace identity for a singular power law converges at first order") {
    const auto k = Kernel::power_law(0.5, 0.6, 1.0);
    auto worst = [&](double h) {
        double w = 0.0;
        for (const auto& r : verify_laplace_identity(k, resolvent_grid(k, Grid(40.0, h)), {0.5, 1.0, 2.0})) {
            w = std::max(w, r.residual);
        }
        return w;
    };
    const double a = worst(0.02);
    const double b = worst(0.01);
    CHECK(b < 1e-3);
    CHECK(a / b == Approx(2.0).epsilon(0.15));
}

TEST_CASE("unstable kernels still tabulate but warn") {
    const auto t = resolvent_grid(Kernel::exponential(1.5, 1.0), Grid(2.0, 1e-3));
    CHECK_FALSE(t.warnings.empty());
    // psi = 1.5 e^{0.5 t}
    CHECK(t.psi_at(1.0)(0, 0) == Approx(1.5 * std::exp(0.5)).epsilon(2e-3));
}

TEST_CASE("scaled resolvent measure of a nearly unstable family") {
    // exponential base: psi^n = a_n b_n e^{-c t}, so F^n(t) = a_n (1 - e^{-c t})
    const auto fam = make_jr_family(Kernel::exponential(1.0, 1.0), 5.0);
    auto err = [&](double h) {
        const auto s = scaled_resolvent_measure(fam, 100, Grid(2.0, h));
        REQUIRE(s.beta.has_value());
        CHECK(*s.beta == Approx(0.05));
        double w = 0.0;
        for (std::size_t i = 0; i < s.distribution.size(); ++i) {
            const double t = s.grid.node(i);
            w = std::max(w, std::abs(s.distribution[i](0, 0) - 0.95 * (1.0 - std::exp(-5.0 * t))));
        }
        return w;
    };
    const double a = err(1e-3);
    const double b = err(5e-4);
    CHECK(b < 1e-2);
    CHECK(a / b == Approx(2.0).epsilon(0.1));
}

TEST_CASE("Fourier limit of an exact linear family") {
    // F_phi^n = I - B / n gives beta_n (I - F)^{-1} F = B^{-1} - I / n
    const auto fam = exact_linear_family(1, [](double z) {
        return ComplexMatrix::Constant(1, 1, std::complex<double>(1.0, z));
    });
    const auto rep = fourier_scaling_limit(fam, 0.7, {10, 100, 1000});
    CHECK(rep.deviation_decreasing);
    REQUIRE(rep.entries.size() == 3);
    for (const auto& e : rep.entries) {
        CHECK(e.deviation == Approx(1.0 / static_cast<double>(e.n)));
    }
    CHECK(std::abs(rep.limit(0, 0) - 1.0 / std::complex<double>(1.0, 0.7)) < 1e-14);
}

TEST_CASE("Fourier limit of the JR exponential family") {
    const auto jr = make_jr_family(Kernel::exponential(1.0, 1.0), 2.0);
    const auto rep = fourier_scaling_limit(jr_fourier_family(jr), 1.3, {10, 100, 1000, 10000});
    CHECK(rep.deviation_decreasing);
    CHECK(rep.entries.back().deviation < 1e-3);
    // B(z) = 1 + i z / c
    CHECK(std::abs(rep.limit(0, 0) - 1.0 / std::complex<double>(1.0, 1.3 / 2.0)) < 1e-14);
}

TEST_CASE("Fourier spectral bound") {
    Matrix alpha(2, 2);
    alpha << 0.3, 0.2, 0.1, 0.4;
    for (double z : {0.0, 0.5, 3.0}) {
        const auto b = fourier_spectral_bound(Kernel::exponential(alpha, Matrix::Constant(2, 2, 1.0)), z);
        CHECK(b.within_l1_bound);
        CHECK(b.l1_radius == Approx(0.5));
        CHECK(b.fourier_radius <= b.l1_radius + 1e-12);
    }
}
