#include "nuhawkes/errors.hpp"
#include "nuhawkes/kernel.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>

using namespace nuhawkes;
using doctest::Approx;

namespace {

// trapezoid on t = e^s over a wide window; the integrands below decay at both
// ends, so the rule converges geometrically
double log_trapezoid(const std::function<double(double)>& f, double s0, double s1, double ds) {
    const auto n = static_cast<long>((s1 - s0) / ds);
    double acc = 0.0;
    for (long k = 0; k <= n; ++k) {
        const double s = s0 + static_cast<double>(k) * ds;
        const double t = std::exp(s);
        const double w = (k == 0 || k == n) ? 0.5 : 1.0;
        acc += w * f(t) * t;
    }
    return acc * ds;
}

double log_logistic(double t, double p, double c) {
    const double cp = std::pow(c, p);
    const double tp = std::pow(t, p);
    return p * cp * std::pow(t, p - 1.0) / ((cp + tp) * (cp + tp));
}

} // namespace

TEST_CASE("exponential kernel closed forms") {
    const auto k = Kernel::exponential(0.8, 2.0);
    CHECK(k.dimension() == 1);
    CHECK(k.is_exponential());
    CHECK(k.eval(0.0)(0, 0) == Approx(0.8));
    CHECK(k.eval(0.7)(0, 0) == Approx(0.8 * std::exp(-1.4)));
    CHECK(k.cumulative(0, 0, 1.5) == Approx(0.4 * (1.0 - std::exp(-3.0))));
    CHECK(k.l1()(0, 0) == Approx(0.4));
    CHECK(k.laplace(1.0)(0, 0).real() == Approx(0.8 / 3.0));
    const auto f = k.laplace(std::complex<double>(0.0, 2.0))(0, 0);
    const auto expect = 0.8 / std::complex<double>(2.0, 2.0);
    CHECK(f.real() == Approx(expect.real()));
    CHECK(f.imag() == Approx(expect.imag()));
    CHECK(k.integrable());
    CHECK(k.nonincreasing());
    CHECK(std::isinf(k.support_end()));
    CHECK(k.cell_integral(0.2, 0.5)(0, 0) == Approx(0.4 * (std::exp(-0.4) - std::exp(-1.0))));
}

TEST_CASE("matrix exponential kernel entries") {
    Matrix alpha(2, 2);
    alpha << 0.3, 0.2, 0.1, 0.4;
    Matrix beta(2, 2);
    beta << 2, 1, 4, 2;
    const auto k = Kernel::exponential(alpha, beta);
    CHECK(k.dimension() == 2);
    CHECK(k.value(1, 0, 0.5) == Approx(0.1 * std::exp(-2.0)));
    CHECK(k.l1()(0, 1) == Approx(0.2));
    CHECK(k.l1()(1, 0) == Approx(0.025));
}

TEST_CASE("log-logistic power law against quadrature") {
    const double p = 0.6;
    const double c = 0.5;
    const auto k = Kernel::power_law(0.7, p, c);
    CHECK(k.l1()(0, 0) == Approx(0.7));
    CHECK(k.value(0, 0, 0.3) == Approx(0.7 * log_logistic(0.3, p, c)));
    // int_0^u g = u^p / (c^p + u^p)
    const double u = 2.0;
    CHECK(k.cumulative(0, 0, u) == Approx(0.7 * std::pow(u, p) / (std::pow(c, p) + std::pow(u, p))));
    for (double z : {0.5, 1.0, 3.0}) {
        const double quad =
            0.7 * log_trapezoid([&](double t) { return log_logistic(t, p, c) * std::exp(-z * t); }, -80.0, 8.0, 1e-3);
        CHECK(k.laplace(z)(0, 0).real() == Approx(quad).epsilon(1e-8));
    }
    CHECK(k.nonincreasing());
    CHECK(k.integrable());
}

TEST_CASE("power law without cutoff is not integrable") {
    const auto k = Kernel::power_law(1.0, 0.5, std::numeric_limits<double>::infinity());
    CHECK_FALSE(k.integrable());
    CHECK_THROWS_AS((void)k.l1(), DomainError);
    CHECK(k.value(0, 0, 0.25) == Approx(0.5 * std::pow(0.25, -0.5)));
    CHECK_THROWS_AS((void)k.displacement_quantile(0, 0, 0.5), DomainError);
}

TEST_CASE("grid kernel is exact on its cells") {
    const auto k = Kernel::grid_sampled(0.5, {Matrix::Constant(1, 1, 2.0), Matrix::Constant(1, 1, 1.0)});
    CHECK(k.eval(0.25)(0, 0) == Approx(2.0));
    CHECK(k.eval(0.75)(0, 0) == Approx(1.0));
    CHECK(k.cumulative(0, 0, 0.75) == Approx(1.25));
    CHECK(k.l1()(0, 0) == Approx(1.5));
    CHECK(k.support_end() == Approx(1.0));
    CHECK(k.nonincreasing());
    CHECK_THROWS_AS((void)k.eval(1.5), OutOfRangeError);
    // L(z) = 2 (1 - e^{-z/2}) / z + e^{-z/2} (1 - e^{-z/2}) / z
    const double z = 1.3;
    const double e = std::exp(-z / 2.0);
    CHECK(k.laplace(z)(0, 0).real() == Approx(2.0 * (1.0 - e) / z + e * (1.0 - e) / z));

    const auto up = Kernel::grid_sampled(0.5, {Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 2.0)});
    CHECK_FALSE(up.nonincreasing());
}

TEST_CASE("zero kernel") {
    const auto k = Kernel::zero(3);
    CHECK(k.dimension() == 3);
    CHECK(k.l1().isZero());
    CHECK(k.eval(1.0).isZero());
    CHECK(l1_and_stability(k).stable);
}

TEST_CASE("compression and scaling") {
    const auto k = Kernel::exponential(1.0, 1.0).compressed(2.0, 3.0);
    CHECK(k.value(0, 0, 0.4) == Approx(6.0 * std::exp(-1.2)));
    CHECK(k.l1()(0, 0) == Approx(2.0));
    const auto s = Kernel::power_law(1.0, 0.5, 1.0).scaled(0.25);
    CHECK(s.l1()(0, 0) == Approx(0.25));
}

TEST_CASE("displacement quantiles invert the normalized cumulative") {
    const auto e = Kernel::exponential(0.5, 2.0);
    CHECK(e.displacement_quantile(0, 0, 0.3) == Approx(-std::log(0.7) / 2.0));
    const double p = 0.75;
    const double c = 2.0;
    const auto pl = Kernel::power_law(0.4, p, c);
    // u^p / (c^p + u^p) = q  =>  u = c (q / (1 - q))^(1/p)
    CHECK(pl.displacement_quantile(0, 0, 0.8) == Approx(c * std::pow(4.0, 1.0 / p)));
}

TEST_CASE("spectral radius and stability") {
    Matrix a(2, 2);
    a << 0.3, 0.2, 0.1, 0.4;
    CHECK(spectral_radius(a) == Approx(0.5));
    Matrix periodic(2, 2);
    periodic << 0, 2, 0.5, 0;
    CHECK(spectral_radius(periodic) == Approx(1.0));
    CHECK(spectral_radius(Matrix::Zero(3, 3)) == Approx(0.0));

    const auto stable = l1_and_stability(Kernel::exponential(0.9, 1.0));
    CHECK(stable.stable);
    CHECK(stable.spectral_radius == Approx(0.9));
    CHECK_FALSE(l1_and_stability(Kernel::exponential(1.1, 1.0)).stable);
    CHECK_THROWS_AS((void)l1_and_stability(Kernel::power_law(1.0, 0.5, std::numeric_limits<double>::infinity())),
                    DomainError);
}

TEST_CASE("invalid parameters are rejected") {
    CHECK_THROWS_AS((void)Kernel::exponential(-0.1, 1.0), InvalidParameter);
    CHECK_THROWS_AS((void)Kernel::exponential(0.1, 0.0), InvalidParameter);
    CHECK_THROWS_AS((void)Kernel::power_law(1.0, 1.5, 1.0), InvalidParameter);
    CHECK_THROWS_AS((void)Kernel::power_law(1.0, 0.0, 1.0), InvalidParameter);
    CHECK_THROWS_AS((void)Kernel::power_law(1.0, 0.5, 0.0), InvalidParameter);
    CHECK_THROWS_AS((void)Kernel::grid_sampled(0.1, {}), InvalidParameter);
    CHECK_THROWS((void)Kernel::grid_sampled(-0.1, {Matrix::Ones(1, 1)}));
    CHECK_THROWS_AS((void)Kernel::exponential(1.0, 1.0).eval(-1.0), DomainError);
    CHECK_THROWS_AS((void)Kernel::exponential(1.0, 1.0).laplace({-1.0, 0.0}), DomainError);
}

TEST_CASE("nearly unstable family") {
    const auto fam = make_jr_family(Kernel::exponential(1.0, 1.0), 5.0, BnSchedule{1.0, 1.0}, Vector::Constant(1, 2.0));
    CHECK(fam.b(100) == Approx(100.0));
    CHECK(fam.a(100) == Approx(0.95));
    CHECK(fam.beta(100) == Approx(0.05));
    CHECK(fam.baseline(100)(0) == Approx(40.0));
    const auto k = fam.kernel(100);
    CHECK(k.l1()(0, 0) == Approx(0.95));
    // a_n b_n phi(b_n t)
    CHECK(k.value(0, 0, 0.01) == Approx(0.95 * 100.0 * std::exp(-1.0)));
    CHECK_THROWS_AS((void)fam.a(5), InvalidParameter);
    CHECK_THROWS_AS((void)make_jr_family(Kernel::exponential(0.5, 1.0), 1.0), InvalidParameter);
    CHECK_THROWS_AS((void)make_jr_family(Kernel::exponential(1.0, 1.0), 0.0), InvalidParameter);
    CHECK(BnSchedule{2.0, 0.5}(16) == Approx(8.0));
}

TEST_CASE("Bernstein triplets") {
    const auto lin = BernsteinTriplet::make(1.0, 0.5);
    CHECK(bernstein_eval(lin, 2.0).phi == Approx(2.0));
    CHECK(limit_laplace(lin, 2.0) == Approx(0.5));
    CHECK_THROWS_AS((void)limit_laplace(BernsteinTriplet::make(0.0, 0.0), 0.0), DomainError);
    CHECK_FALSE(bernstein_eval(BernsteinTriplet::make(0.0, 0.0), 1.0).limit_laplace.has_value());
    CHECK_THROWS_AS((void)BernsteinTriplet::make(-1.0, 0.0), InvalidParameter);
    CHECK_THROWS_AS((void)bernstein_eval(lin, -1.0), DomainError);

    const StableLevy st{0.8, 0.6};
    // int (1 ^ x) C x^{-1-a} dx = C (1 / (1 - a) + 1 / a)
    CHECK(levy_integrability_mass(st) == Approx(0.8 * (1.0 / 0.4 + 1.0 / 0.6)));
    CHECK(levy_integrability_mass(LevyMeasure{}) == 0.0);
    for (double z : {0.5, 2.0}) {
        const double quad = log_trapezoid(
            [&](double x) { return -std::expm1(-z * x) * 0.8 * std::pow(x, -1.6); }, -60.0, 60.0, 1e-3);
        CHECK(stable_coefficient(st) * std::pow(z, 0.6) == Approx(quad).epsilon(1e-7));
        const auto trip = BernsteinTriplet::make(0.3, 0.0, st);
        CHECK(bernstein_eval(trip, z).phi == Approx(0.3 + quad).epsilon(1e-7));
    }
    const auto disc = discretize_stable(st);
    const auto approx = BernsteinTriplet::make(0.0, 0.0, disc);
    CHECK(bernstein_eval(approx, 1.0).phi == Approx(stable_coefficient(st)).epsilon(2e-2));
    CHECK(disc.truncation_error >= 0.0);
    CHECK_THROWS_AS((void)discretize_stable(StableLevy{1.0, 1.2}), InvalidParameter);
}
