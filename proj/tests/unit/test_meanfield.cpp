#include "nuhawkes/ensemble.hpp"
#include "nuhawkes/errors.hpp"
#include "nuhawkes/meanfield.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

using namespace nuhawkes;
using doctest::Approx;

namespace {

MeanFieldParams params(std::size_t n, std::size_t k, double mu0, Kernel kernel, double beta = 0.1) {
    MeanFieldParams p;
    p.particles = n;
    p.tagged = k;
    p.mu0 = mu0;
    p.kernel = std::move(kernel);
    p.horizon = 1.0;
    p.beta = beta;
    p.output_step = 0.01;
    return p;
}

double mean_of(const std::vector<double>& x) { return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size()); }

double se_of(const std::vector<double>& x) {
    const double m = mean_of(x);
    double ss = 0.0;
    for (double v : x) {
        ss += (v - m) * (v - m);
    }
    return std::sqrt(ss / static_cast<double>(x.size() - 1) / static_cast<double>(x.size()));
}

} // namespace

TEST_CASE("aggregate is the direct Hawkes path") {
    const auto k = Kernel::exponential(0.5, 1.0);
    const auto p = params(10, 2, 8.0, k);
    const auto sys = simulate_particles(p, 5, 3);
    const auto direct = simulate_thinning(HawkesParams{Vector::Constant(1, 8.0), k, 1.0}, 5, 3);
    CHECK(sys.aggregate.times == direct.times);
    CHECK(sys.owner.size() == direct.size());
    CHECK(sys.counts.size() == 10);
    CHECK(std::accumulate(sys.counts.begin(), sys.counts.end(), std::size_t{0}) == direct.size());
    for (auto o : sys.owner) {
        CHECK(o < 10);
    }
}

TEST_CASE("a single particle is the Hawkes process itself") {
    const auto k = Kernel::exponential(0.5, 1.0);
    const auto sys = simulate_particles(params(1, 1, 3.0, k), 7, 0);
    auto direct = simulate_thinning(HawkesParams{Vector::Constant(1, 3.0), k, 1.0}, 7, 0);
    attach_nodes(direct, Grid(1.0, 0.01));
    CHECK(sys.tagged_counts.col(0).isApprox(direct.nodes->counts.col(0)));
    CHECK((sys.tagged_martingales.col(0) - direct.nodes->martingale.col(0)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((sys.common_intensity - direct.nodes->intensity.col(0)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("tagged series and rescalings are consistent") {
    const std::size_t n = 20;
    const double beta = 0.3;
    const auto sys = simulate_particles(params(n, 3, 15.0, Kernel::exponential(0.5, 1.0), beta), 11, 0);
    const auto last = static_cast<Eigen::Index>(sys.grid.cells());
    for (Eigen::Index i = 0; i < 3; ++i) {
        CHECK(sys.tagged_counts(last, i) == Approx(static_cast<double>(sys.counts[static_cast<std::size_t>(i)])));
        CHECK(sys.tagged_martingales.col(i).isApprox(sys.tagged_counts.col(i) - sys.common_compensator));
    }
    const double nd = static_cast<double>(n);
    CHECK(sys.rescaled_tagged_counts.isApprox(nd * beta * beta * sys.tagged_counts));
    CHECK(sys.rescaled_tagged_martingales.isApprox(std::sqrt(nd) * beta * sys.tagged_martingales));
    CHECK(sys.rescaled_common_compensator.isApprox(nd * beta * beta * sys.common_compensator));
    CHECK(sys.common_compensator.isApprox(sys.aggregate.nodes->compensator.col(0) / nd));

    const auto at = sys.particle_counts_at(0.5);
    CHECK(at.size() == n);
    CHECK(std::accumulate(at.begin(), at.end(), 0.0) == Approx(sys.aggregate.counts_at(0.5)(0)));
}

TEST_CASE("snapshot values are the rescaled particle coordinates") {
    const std::size_t n = 30;
    const double beta = 0.2;
    const auto sys = simulate_particles(params(n, 0, 20.0, Kernel::exponential(0.5, 1.0), beta), 13, 0);
    const auto snaps = empirical_snapshot(sys, {0.5, 1.0});
    REQUIRE(snaps.size() == 2);
    const auto& s = snaps[1];
    CHECK(s.size() == n);
    CHECK(s.total_weight() == Approx(1.0));
    CHECK(s.source == "simulation");
    const double lam0 = sys.common_compensator(static_cast<Eigen::Index>(sys.grid.cells()));
    for (std::size_t i = 0; i < n; ++i) {
        const double ni = static_cast<double>(sys.counts[i]);
        CHECK(s.xs[i] == Approx(static_cast<double>(n) * beta * beta * ni));
        CHECK(s.zs[i] == Approx(std::sqrt(static_cast<double>(n)) * beta * (ni - lam0)));
    }
    std::ostringstream out;
    s.write_csv(out);
    CHECK(out.str().rfind("t,index,x,z,weight\n", 0) == 0);
    CHECK_THROWS_AS((void)empirical_snapshot(sys, {2.0}), OutOfRangeError);
}

TEST_CASE("labels are uniform over particles") {
    const std::size_t n = 5;
    const auto p = params(n, 0, 30.0, Kernel::exponential(0.5, 1.0));
    const auto shares = run_ensemble(400, 1, [&](std::size_t i) {
        const auto sys = simulate_particles(p, 17, i);
        return static_cast<double>(sys.counts[0]) / static_cast<double>(std::max<std::size_t>(sys.owner.size(), 1));
    });
    CHECK(std::abs(mean_of(shares) - 0.2) < 4.0 * se_of(shares));
}

TEST_CASE("second moment of P_M equals the mean of the rescaled compensator") {
    // E[(1/n) sum z_i^2] = beta^2 E[Lambda_bar(T)] = beta^2 mu0 (T + int_0^T Psi),
    // and psi = 0.5 e^{-t/2} for phi = 0.5 e^{-t}, so int_0^1 Psi = 1 - 2 (1 - e^{-1/2})
    const std::size_t n = 40;
    const double beta = 0.1;
    const double mu0 = 20.0;
    const auto p = params(n, 0, mu0, Kernel::exponential(0.5, 1.0), beta);
    const auto m2 = run_ensemble(3000, 1, [&](std::size_t i) {
        const auto s = empirical_snapshot(simulate_particles(p, 19, i), {1.0}).front();
        double acc = 0.0;
        for (double z : s.zs) {
            acc += z * z;
        }
        return acc / static_cast<double>(s.size());
    });
    const double expect = beta * beta * mu0 * (1.0 + 1.0 - 2.0 * (1.0 - std::exp(-0.5)));
    CHECK(std::abs(mean_of(m2) - expect) < 4.0 * se_of(m2));
}

TEST_CASE("coupled auxiliary system") {
    const auto k = Kernel::exponential(0.5, 1.0);
    SUBCASE("no tagged particles: the systems coincide") {
        const auto c = simulate_coupled_auxiliary(params(50, 0, 40.0, k), 23, 0);
        CHECK((c.auxiliary.theta - c.main.common_intensity).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(c.auxiliary.times == c.main.aggregate.times);
        CHECK(c.auxiliary.dominance_holds);
    }
    SUBCASE("tagged particles: the auxiliary system is dominated") {
        const auto p = params(100, 5, 100.0, k);
        for (std::size_t i = 0; i < 100; ++i) {
            const auto c = simulate_coupled_auxiliary(p, 29, i);
            CHECK(c.auxiliary.dominance_holds);
            CHECK(((c.main.common_intensity - c.auxiliary.theta).array() >= -1e-12).all());
            CHECK(((c.main.tagged_counts - c.auxiliary.tagged_counts).array() >= 0.0).all());
        }
    }
    SUBCASE("main system matches the uncoupled simulation in law") {
        const auto p = params(20, 2, 10.0, k);
        const auto a = run_ensemble(2000, 1, [&](std::size_t i) {
            return static_cast<double>(simulate_coupled_auxiliary(p, 31, i).main.aggregate.size());
        });
        const auto b = run_ensemble(2000, 1, [&](std::size_t i) {
            return static_cast<double>(simulate_particles(p, 37, i).aggregate.size());
        });
        CHECK(std::abs(mean_of(a) - mean_of(b)) < 4.0 * std::hypot(se_of(a), se_of(b)));
    }
    SUBCASE("singular kernels are refused") {
        CHECK_THROWS_AS((void)simulate_coupled_auxiliary(params(10, 1, 5.0, Kernel::power_law(0.5, 0.5, 1.0)), 1),
                        UnsupportedSimulation);
    }
}

TEST_CASE("parameter validation names the offending quantities") {
    const auto k = Kernel::exponential(0.5, 1.0);
    try {
        (void)simulate_particles(params(3, 5, 1.0, k), 1);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        CHECK(what.find("K = 5") != std::string::npos);
        CHECK(what.find("n = 3") != std::string::npos);
    }
    CHECK_THROWS_AS((void)simulate_particles(params(0, 0, 1.0, k), 1), ConfigError);
    CHECK_THROWS_AS((void)simulate_particles(params(3, 0, -1.0, k), 1), InvalidParameter);
    CHECK_THROWS_AS((void)simulate_particles(params(3, 0, 1.0, k, 0.0), 1), InvalidParameter);
    Matrix a = Matrix::Constant(2, 2, 0.1);
    CHECK_THROWS_AS((void)simulate_particles(params(3, 0, 1.0, Kernel::exponential(a, a)), 1), InvalidParameter);
}
