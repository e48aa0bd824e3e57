#include "runner.hpp"

#include "acceptance.hpp"
#include "artifacts.hpp"

#include "nuhawkes/ensemble.hpp"
#include "nuhawkes/hawkes.hpp"
#include "nuhawkes/limits.hpp"
#include "nuhawkes/meanfield.hpp"
#include "nuhawkes/resolvent.hpp"

#include <Eigen/Core>
#include <unsupported/Eigen/MatrixFunctions>
#include <boost/version.hpp>
#include <openssl/opensslv.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#ifndef NUHAWKES_VERSION
#define NUHAWKES_VERSION "0.0.0"
#endif

namespace nuhawkes::cli {

namespace {

using json = nlohmann::json;

struct RunState {
    const ExperimentConfig& config;
    const RunOptions& options;
    fs::path dir;
    json derived = json::object();
    std::vector<TestReport> reports;

    void log(const std::string& line) const {
        if (options.log) {
            options.log(line);
        }
    }
    [[nodiscard]] unsigned threads() const { return std::max(1u, options.threads); }
};

TestReport tolerance_report(std::string name, std::string description, double statistic, double tolerance,
                            std::size_t size = 0) {
    TestReport r;
    r.name = std::move(name);
    r.description = std::move(description);
    r.statistic = statistic;
    r.threshold = tolerance;
    r.size_a = size;
    r.pass = std::abs(statistic) <= tolerance;
    return r;
}

// summaries use at most 100 cells
Grid report_grid(const ExperimentConfig& c) {
    const double step = std::max(c.step, c.horizon / 100.0);
    return Grid(c.horizon, step);
}

std::string entry_name(const char* stem, std::size_t i, std::size_t j, std::size_t d) {
    return d == 1 ? std::string(stem) : std::string(stem) + "_" + std::to_string(i) + std::to_string(j);
}

json stability_json(const Kernel& kernel) {
    try {
        const auto s = l1_and_stability(kernel);
        return {{"l1", matrix_to_json(s.l1)}, {"spectral_radius", s.spectral_radius}, {"stable", s.stable}};
    } catch (const DomainError& e) {
        return {{"integrable", false}, {"note", e.what()}};
    }
}

// psi = alpha exp((alpha - beta I) t) when all rates agree
std::optional<std::function<Matrix(double)>> exponential_resolvent(const Kernel& kernel) {
    const auto* f = std::get_if<ExponentialForm>(&kernel.form());
    if (!f || !(f->beta.array() == f->beta(0, 0)).all()) {
        return std::nullopt;
    }
    const Matrix alpha = f->alpha;
    const Matrix generator = alpha - f->beta(0, 0) * Matrix::Identity(alpha.rows(), alpha.cols());
    return [alpha, generator](double t) -> Matrix { return alpha * (generator * t).exp(); };
}

void run_resolvent(RunState& s) {
    const auto& c = s.config;
    const Grid grid = c.grid();
    const Kernel kernel = c.resolved_kernel();
    const auto table = (c.family && c.family_n > 0) ? scaled_resolvent_measure(c.family->build(), c.family_n, grid)
                                                     : resolvent_grid(kernel, grid);
    {
        std::ofstream out(s.dir / "resolvent.csv", std::ios::binary);
        table.write_csv(out);
    }
    const auto d = table.dimension();
    s.derived["stability"] = stability_json(kernel);
    s.derived["warnings"] = table.warnings;
    if (table.beta) {
        s.derived["beta_n"] = *table.beta;
        s.derived["scaled_l2"] = matrix_to_json(table.scaled_l2);
    }
    s.reports.push_back(tolerance_report("discrete_residual", "residual of the discrete resolvent equation",
                                         discrete_residual(kernel, table), 1e-10, grid.cells()));
    if (kernel.integrable() && l1_and_stability(kernel).stable) {
        // psi >= 0, so the part of L_psi beyond T is at most e^{-zT} (int_0^inf psi - int_0^T psi)
        const Matrix l1 = kernel.l1();
        const Matrix total = (Matrix::Identity(l1.rows(), l1.cols()) - l1).inverse() - Matrix::Identity(l1.rows(), l1.cols());
        const double tail_mass = std::max(0.0, (total - table.cumulative.back()).maxCoeff());
        double worst = 0.0;
        for (const auto& r : verify_laplace_identity(kernel, table, {0.5, 1.0, 2.0})) {
            if (!r.singular) {
                worst = std::max(worst, r.residual - std::exp(-r.z * grid.end()) * tail_mass);
            }
        }
        s.reports.push_back(tolerance_report(
            "laplace_identity",
            "L_psi = L_phi (I - L_phi)^{-1} at z in {0.5, 1, 2} less the tail bound beyond T, tolerance h",
            worst, grid.step()));
    }
    if (auto exact = exponential_resolvent(kernel)) {
        std::vector<std::string> header{"t_mid"};
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                header.push_back(entry_name("psi", i, j, d));
                header.push_back(entry_name("exact", i, j, d));
            }
        }
        header.push_back("max_error");
        CsvWriter csv(s.dir / "resolvent_error.csv", header);
        double worst = 0.0;
        for (std::size_t k = 0; k < grid.cells(); ++k) {
            const double t = grid.midpoint(k);
            const Matrix e = (*exact)(t);
            std::vector<double> row{t};
            double err = 0.0;
            for (std::size_t i = 0; i < d; ++i) {
                for (std::size_t j = 0; j < d; ++j) {
                    const auto ii = static_cast<Eigen::Index>(i);
                    const auto jj = static_cast<Eigen::Index>(j);
                    row.push_back(table.psi[k](ii, jj));
                    row.push_back(e(ii, jj));
                    err = std::max(err, std::abs(table.psi[k](ii, jj) - e(ii, jj)));
                }
            }
            worst = std::max(worst, err);
            row.push_back(err);
            csv.row(row);
        }
        s.derived["max_error_vs_closed_form"] = worst;
        s.reports.push_back(tolerance_report("closed_form_error", "max |psi_grid - psi| at cell midpoints, tolerance h",
                                             worst, grid.step(), grid.cells()));
    }
    s.log("resolvent: " + std::to_string(grid.cells()) + " cells");
}

void run_hawkes(RunState& s) {
    const auto& c = s.config;
    const Kernel kernel = c.resolved_kernel();
    const auto d = kernel.dimension();
    Vector mu = Vector::Ones(static_cast<Eigen::Index>(d));
    if (c.hawkes.mu) {
        mu = *c.hawkes.mu;
    } else if (c.family && c.family_n > 0) {
        mu = c.family->build().baseline(c.family_n);
    }
    const HawkesParams params{mu, kernel, c.horizon};
    params.validate();
    const bool cluster = c.hawkes.method == "cluster";
    const Grid rgrid = report_grid(c);
    const double beta = (c.family && c.family_n > 0) ? c.family->build().beta(c.family_n) : c.hawkes.beta;
    s.derived["stability"] = stability_json(kernel);
    s.derived["beta"] = beta;
    s.derived["baseline"] = matrix_to_json(mu);

    struct PathSummary {
        Matrix intensity;  // report nodes x d
        Vector counts;
        double qv = 0.0;
        double decomposition = 0.0;
    };
    const auto seed = c.seed;
    const auto summaries = run_ensemble(c.paths, s.threads(), [&](std::size_t i) {
        HawkesPath path = cluster ? simulate_cluster(params, seed, i) : simulate_thinning(params, seed, i);
        PathSummary out;
        out.intensity = compensator_martingale(path, rgrid).intensity;
        out.counts = path.counts_at(c.horizon);
        out.qv = qv_identity_check(path).statistic;
        const auto tri = rescale_path(path, beta, rgrid);
        out.decomposition = (tri.counts - tri.compensator - beta * tri.martingale).cwiseAbs().maxCoeff() /
                            std::max(1.0, tri.counts.cwiseAbs().maxCoeff());
        if (i < c.hawkes.export_paths) {
            std::ofstream ev(s.dir / ("events_path" + std::to_string(i) + ".csv"), std::ios::binary);
            path.write_events_csv(ev);
            attach_nodes(path, c.grid());
            std::ofstream nodes(s.dir / ("nodes_path" + std::to_string(i) + ".csv"), std::ios::binary);
            path.write_nodes_csv(nodes);
        }
        return out;
    });

    // counts per path
    {
        std::vector<std::string> header{"path"};
        for (std::size_t i = 0; i < d; ++i) {
            header.push_back("N" + std::to_string(i));
        }
        CsvWriter csv(s.dir / "counts.csv", header);
        for (std::size_t p = 0; p < summaries.size(); ++p) {
            std::vector<double> row{static_cast<double>(p)};
            for (std::size_t i = 0; i < d; ++i) {
                row.push_back(summaries[p].counts(static_cast<Eigen::Index>(i)));
            }
            csv.row(row);
        }
    }

    // mean intensity against (I + int_0^t psi) mu
    const auto table = resolvent_grid(kernel, c.grid());
    std::vector<std::string> header{"t"};
    for (std::size_t i = 0; i < d; ++i) {
        header.push_back("mean_lambda" + std::to_string(i));
        header.push_back("se" + std::to_string(i));
        header.push_back("oracle" + std::to_string(i));
    }
    CsvWriter csv(s.dir / "mean_intensity.csv", header);
    const std::size_t quarter = rgrid.cells() / 4;
    for (std::size_t k = 0; k < rgrid.nodes(); ++k) {
        const double t = rgrid.node(k);
        const Vector oracle = mu + table.cumulative_at(std::min(t, table.grid.end())) * mu;
        std::vector<double> row{t};
        for (std::size_t i = 0; i < d; ++i) {
            std::vector<double> v;
            v.reserve(summaries.size());
            for (const auto& p : summaries) {
                v.push_back(p.intensity(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)));
            }
            const auto est = mean_estimate(v);
            const double o = oracle(static_cast<Eigen::Index>(i));
            row.insert(row.end(), {est.mean, est.standard_error, o});
            if (k > 0 && (k == quarter || k == 2 * quarter || k == rgrid.cells()) && summaries.size() > 1) {
                s.reports.push_back(within_standard_errors(
                    "mean_intensity_" + std::to_string(i) + "_t" + format_double(t), est, o));
            }
        }
        csv.row(row);
    }
    double qv = 0.0;
    double dec = 0.0;
    for (const auto& p : summaries) {
        qv = std::max(qv, p.qv);
        dec = std::max(dec, p.decomposition);
    }
    s.reports.push_back(tolerance_report("qv_identity", "[M_i] = N_i and zero cross-covariation on every path", qv, 1e-10,
                                         summaries.size()));
    s.reports.push_back(tolerance_report("rescaled_decomposition", "N^(n) - Lambda^(n) = beta M^(n) at report nodes", dec,
                                         1e-10, summaries.size()));
    s.log("hawkes: " + std::to_string(summaries.size()) + " paths");
}

void run_meanfield(RunState& s) {
    const auto& c = s.config;
    std::optional<NearlyUnstableFamily> family;
    if (c.family) {
        family = c.family->build();
    }
    json per_n = json::array();
    for (std::size_t n : c.meanfield.n) {
        MeanFieldParams p;
        p.particles = n;
        p.tagged = c.meanfield.tagged;
        p.kernel = c.kernel ? *c.kernel : family->kernel(n);
        p.mu0 = c.meanfield.mu0 ? *c.meanfield.mu0 : (family ? family->baseline(n)(0) : 1.0);
        p.beta = c.meanfield.beta ? *c.meanfield.beta : (family ? family->beta(n) : 1.0);
        p.horizon = c.horizon;
        p.output_step = std::max(c.meanfield.output_step, c.step);
        p.validate();
        const fs::path sub = s.dir / ("n" + std::to_string(n));
        fs::create_directories(sub);
        const double zeta = static_cast<double>(n) * p.beta * p.beta;
        per_n.push_back({{"n", n}, {"mu0", p.mu0}, {"beta", p.beta}, {"n_beta_sq", zeta},
                         {"regime_hint", Regime::from_zeta(zeta).name()}});

        struct Summary {
            double aggregate = 0.0;
            double xbar = 0.0;   // n beta^2 Lambda_0(T)
            double pm_second = 0.0;
            double qv = 0.0;
        };
        const auto seed = c.seed;
        const auto snapshot_times = c.meanfield.snapshot_times;
        const auto summaries = run_ensemble(c.paths, s.threads(), [&](std::size_t i) {
            const auto path = simulate_particles(p, seed, i);
            Summary out;
            out.aggregate = static_cast<double>(path.aggregate.size());
            out.xbar = path.rescaled_common_compensator(path.rescaled_common_compensator.size() - 1);
            const auto snap = empirical_snapshot(path, {c.horizon}).front();
            for (double z : snap.zs) {
                out.pm_second += z * z / static_cast<double>(snap.zs.size());
            }
            const double scale = std::sqrt(static_cast<double>(n)) * p.beta;
            for (const auto& times : path.tagged_times) {
                out.qv = std::max(out.qv, qv_identity_check(times, scale).statistic);
            }
            if (i == 0) {
                const auto snaps = empirical_snapshot(path, snapshot_times);
                std::ofstream sf(sub / "snapshots_path0.csv", std::ios::binary);
                for (std::size_t k = 0; k < snaps.size(); ++k) {
                    snaps[k].write_csv(sf, k == 0);
                }
                std::vector<std::string> header{"t", "lambda0", "Lambda0", "xbar_n"};
                for (std::size_t j = 0; j < p.tagged; ++j) {
                    header.push_back("N" + std::to_string(j));
                    header.push_back("M" + std::to_string(j));
                    header.push_back("x" + std::to_string(j));
                    header.push_back("z" + std::to_string(j));
                }
                CsvWriter csv(sub / "tagged_path0.csv", header);
                for (std::size_t k = 0; k < path.grid.nodes(); ++k) {
                    const auto kk = static_cast<Eigen::Index>(k);
                    std::vector<double> row{path.grid.node(k), path.common_intensity(kk), path.common_compensator(kk),
                                            path.rescaled_common_compensator(kk)};
                    for (std::size_t j = 0; j < p.tagged; ++j) {
                        const auto jj = static_cast<Eigen::Index>(j);
                        row.insert(row.end(), {path.tagged_counts(kk, jj), path.tagged_martingales(kk, jj),
                                               path.rescaled_tagged_counts(kk, jj),
                                               path.rescaled_tagged_martingales(kk, jj)});
                    }
                    csv.row(row);
                }
            }
            return out;
        });
        CsvWriter csv(sub / "summary.csv", {"path", "aggregate_events", "xbar_n_T", "pm_second_moment"});
        double qv = 0.0;
        std::vector<double> gap;
        for (std::size_t i = 0; i < summaries.size(); ++i) {
            csv.row({static_cast<double>(i), summaries[i].aggregate, summaries[i].xbar, summaries[i].pm_second});
            qv = std::max(qv, summaries[i].qv);
            // E[(1/n) sum z_i^2] = E[Xbar^n(T)]
            gap.push_back(summaries[i].pm_second - summaries[i].xbar);
        }
        s.reports.push_back(tolerance_report("qv_identity_n" + std::to_string(n),
                                             "[sqrt(n) beta M_i] = n beta^2 N_i for tagged particles", qv, 1e-10,
                                             summaries.size()));
        if (summaries.size() > 1) {
            s.reports.push_back(within_standard_errors("pm_variance_n" + std::to_string(n), mean_estimate(gap), 0.0));
        }

        const bool bounded = p.kernel.nonincreasing() && !std::holds_alternative<PowerLawForm>(p.kernel.form());
        if (p.tagged > 0 && bounded) {
            const std::size_t coupled = std::min<std::size_t>(c.paths, 1000);
            const auto holds = run_ensemble(coupled, s.threads(), [&](std::size_t i) {
                try {
                    return simulate_coupled_auxiliary(p, seed ^ 0x9e3779b97f4a7c15ULL, i).auxiliary.dominance_holds ? 1 : 0;
                } catch (const std::logic_error&) {
                    return 0;
                }
            });
            const auto count = static_cast<std::size_t>(std::count(holds.begin(), holds.end(), 1));
            TestReport r;
            r.name = "coupling_dominance_n" + std::to_string(n);
            r.description = "auxiliary system dominated by the main system on every coupled path";
            r.statistic = static_cast<double>(count) / static_cast<double>(coupled);
            r.threshold = 1.0;
            r.size_a = coupled;
            r.pass = count == coupled;
            s.reports.push_back(r);
        }
        s.log("meanfield: n = " + std::to_string(n) + ", " + std::to_string(summaries.size()) + " paths");
    }
    s.derived["particle_systems"] = per_n;
}

LimitKernelSpec limit_spec(const LimitSpec& l, const Grid& grid) {
    if (l.sve_kernel == "fractional") {
        return LimitKernelSpec::fractional(l.alpha, grid, l.scale, l.norm);
    }
    LevyMeasure levy{};
    if (l.stable) {
        levy = *l.stable;
    }
    return LimitKernelSpec::from_bernstein(BernsteinTriplet::make(l.drift, l.linear, levy), grid);
}

void run_limit(RunState& s) {
    const auto& c = s.config;
    const auto& l = c.limit;
    const Grid grid = c.grid();
    const Grid rgrid = report_grid(c);
    const auto stride = static_cast<std::size_t>(std::llround(rgrid.step() / grid.step()));
    const bool aligned = std::abs(static_cast<double>(stride) * grid.step() - rgrid.step()) <= 1e-12 * rgrid.step();
    const std::size_t step_nodes = aligned ? stride : 1;
    const Grid& out_grid = aligned ? rgrid : grid;
    const auto seed = c.seed;

    if (l.model == "cir") {
        l.cir.validate();
        const auto values = run_ensemble(c.paths, s.threads(), [&](std::size_t i) {
            const auto p = solve_cir(l.cir, grid, seed, i);
            Vector v(static_cast<Eigen::Index>(out_grid.nodes()));
            for (std::size_t k = 0; k < out_grid.nodes(); ++k) {
                v(static_cast<Eigen::Index>(k)) = p.values(static_cast<Eigen::Index>(k * step_nodes));
            }
            return v;
        });
        CsvWriter csv(s.dir / "cir_moments.csv", {"t", "mean", "se_mean", "variance", "oracle_mean", "oracle_variance"});
        const auto& p = l.cir;
        for (std::size_t k = 0; k < out_grid.nodes(); ++k) {
            const double t = out_grid.node(k);
            std::vector<double> v;
            for (const auto& path : values) {
                v.push_back(path(static_cast<Eigen::Index>(k)));
            }
            const auto est = mean_estimate(v);
            double var = 0.0;
            for (double x : v) {
                var += (x - est.mean) * (x - est.mean);
            }
            var /= std::max<double>(1.0, static_cast<double>(v.size()) - 1.0);
            const double e = std::exp(-p.b * t);
            const double oracle_mean = p.a + (p.xi0 - p.a) * e;
            const double oracle_var = p.b > 0.0 ? p.xi0 * p.sigma * p.sigma / p.b * (e - e * e) +
                                                      p.a * p.sigma * p.sigma / (2.0 * p.b) * (1.0 - e) * (1.0 - e)
                                                : p.xi0 * p.sigma * p.sigma * t;
            csv.row({t, est.mean, est.standard_error, var, oracle_mean, oracle_var});
            if (k == out_grid.cells() && v.size() > 1) {
                s.reports.push_back(within_standard_errors("cir_mean_T", est, oracle_mean));
            }
        }
        {
            const auto p0 = solve_cir(l.cir, grid, seed, 0);
            CsvWriter path_csv(s.dir / "cir_path0.csv", {"t", "xi"});
            for (std::size_t k = 0; k < grid.nodes(); ++k) {
                path_csv.row({grid.node(k), p0.values(static_cast<Eigen::Index>(k))});
            }
        }
        s.derived["cir"] = {{"b", p.b}, {"a", p.a}, {"sigma", p.sigma}, {"xi0", p.xi0},
                            {"feller", 2.0 * p.b * p.a >= p.sigma * p.sigma}};
        s.log("limit: " + std::to_string(values.size()) + " CIR paths");
        return;
    }

    const auto spec = limit_spec(l, grid);
    {
        std::ofstream out(s.dir / "limit_kernel.csv", std::ios::binary);
        spec.write_csv(out);
    }
    s.derived["limit_kernel"] = spec.provenance;
    if (l.sve_kernel == "bernstein" && !l.stable) {
        const auto cir = cir_correspondence(BernsteinTriplet::make(l.drift, l.linear), l.level);
        s.derived["cir_correspondence"] = {{"b", cir.b}, {"a", cir.a}, {"sigma", cir.sigma}, {"xi0", cir.xi0}};
    }
    const Vector a = Vector::Constant(1, l.level);
    const auto ys = run_ensemble(c.paths, s.threads(), [&](std::size_t i) {
        const auto p = solve_sve(spec, a, seed, i);
        Vector v(static_cast<Eigen::Index>(out_grid.nodes()));
        for (std::size_t k = 0; k < out_grid.nodes(); ++k) {
            v(static_cast<Eigen::Index>(k)) = p.y(static_cast<Eigen::Index>(k * step_nodes), 0);
        }
        return v;
    });
    CsvWriter csv(s.dir / "sve_mean.csv", {"t", "mean_y", "se", "oracle"});
    const std::size_t tenth = std::max<std::size_t>(1, out_grid.cells() / 10);
    for (std::size_t k = 0; k < out_grid.nodes(); ++k) {
        std::vector<double> v;
        for (const auto& y : ys) {
            v.push_back(y(static_cast<Eigen::Index>(k)));
        }
        const auto est = mean_estimate(v);
        const double oracle = spec.distribution[k * step_nodes](0, 0) * l.level;
        csv.row({out_grid.node(k), est.mean, est.standard_error, oracle});
        if (k > 0 && k % tenth == 0 && v.size() > 1) {
            s.reports.push_back(within_standard_errors("sve_mean_t" + format_double(out_grid.node(k)), est, oracle));
        }
    }
    const auto p0 = solve_sve(spec, a, seed, 0);
    CsvWriter path_csv(s.dir / "sve_path0.csv", {"t", "y", "x", "z"});
    for (std::size_t k = 0; k < grid.nodes(); ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        path_csv.row({grid.node(k), p0.y(kk, 0), p0.x(kk, 0), p0.z(kk, 0)});
    }
    s.log("limit: " + std::to_string(ys.size()) + " SVE paths");
}

void run_regime_compare(RunState& s) {
    const auto& c = s.config;
    const auto family = c.family->build();
    const auto& base = std::get<ExponentialForm>(c.family->base.form());
    const double beta0 = base.beta(0, 0);
    const double level = c.family->target(0);
    // F^n -> F with Laplace 1 / (1 + z / (c beta0))
    const auto triplet = BernsteinTriplet::make(1.0, 1.0 / (c.family->c * beta0));
    const Grid grid = c.grid();
    const auto spec = LimitKernelSpec::from_bernstein(triplet, grid);
    const double t = c.meanfield.snapshot_times.back();
    s.derived["limit_triplet"] = {{"drift", triplet.drift}, {"linear", triplet.linear}};
    s.derived["cir_correspondence"] = [&] {
        const auto cir = cir_correspondence(triplet, level);
        return json{{"b", cir.b}, {"a", cir.a}, {"sigma", cir.sigma}};
    }();

    CsvWriter csv(s.dir / "regime_compare.csv",
                  {"n", "n_beta_sq", "w1_x", "ks_x", "w1_z", "ks_z"});
    json per_n = json::array();
    std::vector<double> w1z;
    for (std::size_t n : c.meanfield.n) {
        const double beta = family.beta(n);
        const double zn = static_cast<double>(n) * beta * beta;
        const Regime regime = c.zeta ? Regime::from_zeta(*c.zeta) : Regime::from_zeta(zn);
        MeanFieldParams p;
        p.particles = n;
        p.kernel = family.kernel(n);
        p.mu0 = family.baseline(n)(0);
        p.beta = beta;
        p.horizon = c.horizon;
        p.output_step = std::max(c.meanfield.output_step, c.step);
        const auto seed = c.seed;
        const auto snaps = run_ensemble(c.paths, s.threads(), [&](std::size_t i) {
            return empirical_snapshot(simulate_particles(p, seed + n, i), {t}).front();
        });
        const auto limits = run_ensemble(c.paths, s.threads(), [&](std::size_t i) {
            const auto xbar = solve_sve(spec, Vector::Constant(1, level), seed ^ 0x51f15eedULL, i);
            return limit_empirical_law(regime, xbar, t, n, seed ^ 0x7a11ULL, i);
        });
        std::vector<double> xs, zs, lx, lz, lw;
        for (const auto& snap : snaps) {
            xs.insert(xs.end(), snap.xs.begin(), snap.xs.end());
            zs.insert(zs.end(), snap.zs.begin(), snap.zs.end());
        }
        for (const auto& snap : limits) {
            lx.insert(lx.end(), snap.xs.begin(), snap.xs.end());
            lz.insert(lz.end(), snap.zs.begin(), snap.zs.end());
            lw.insert(lw.end(), snap.weights.begin(), snap.weights.end());
        }
        auto wx = wasserstein1(xs, lx, {}, lw);
        auto wz = wasserstein1(zs, lz, {}, lw);
        const auto kx = ks_distance(xs, lx);
        const auto kz = ks_distance(zs, lz);
        wx.name = "w1_pn_n" + std::to_string(n);
        wz.name = "w1_pm_n" + std::to_string(n);
        s.reports.push_back(wx);
        s.reports.push_back(wz);
        w1z.push_back(wz.statistic);
        csv.row({static_cast<double>(n), zn, wx.statistic, kx.statistic, wz.statistic, kz.statistic});
        per_n.push_back({{"n", n}, {"n_beta_sq", zn}, {"regime", regime.name()}});
        s.log("compare: n = " + std::to_string(n) + " done");
    }
    s.derived["comparisons"] = per_n;
    if (w1z.size() > 1) {
        bool decreasing = true;
        for (std::size_t k = 1; k < w1z.size(); ++k) {
            decreasing = decreasing && w1z[k] < w1z[k - 1];
        }
        TestReport r;
        r.name = "w1_pm_decreasing";
        r.description = "W1 between P_M and its limit law decreases along the n list";
        r.statistic = w1z.back();
        r.threshold = w1z.front();
        r.pass = decreasing;
        s.reports.push_back(r);
    }
}

void run_acceptance_kind(RunState& s) {
    AcceptanceOptions options;
    options.seed = s.config.seed;
    options.threads = s.threads();
    options.output = s.dir;
    options.on_result = [&](const CriterionResult& r) { s.log(format_result_line(r)); };
    const auto result = run_acceptance(options);
    std::ofstream out(s.dir / "acceptance.txt", std::ios::binary);
    json criteria = json::array();
    for (const auto& c : result.criteria) {
        out << (c.pass ? "[PASS] " : "[FAIL] ") << c.id << ' ' << c.title << ": " << c.detail << '\n';
        for (auto r : c.reports) {
            r.name = "c" + std::to_string(c.id) + "." + r.name;
            s.reports.push_back(r);
        }
        TestReport summary;
        summary.name = "criterion_" + std::to_string(c.id);
        summary.description = c.title + ": " + c.detail;
        summary.pass = c.pass;
        s.reports.push_back(summary);
        criteria.push_back({{"id", c.id}, {"title", c.title}, {"pass", c.pass}});
    }
    s.derived["criteria"] = criteria;
}

void prepare_directory(const fs::path& dir) {
    if (fs::exists(dir)) {
        if (!fs::is_directory(dir)) {
            throw std::runtime_error("output path exists and is not a directory: " + dir.string());
        }
        if (fs::exists(dir / "manifest.json")) {
            fs::remove_all(dir);
        } else if (!fs::is_empty(dir)) {
            throw std::runtime_error("refusing to write into nonempty directory without a manifest: " + dir.string());
        }
    }
    fs::create_directories(dir);
}

} // namespace

fs::path default_output(const ExperimentConfig& config) {
    return fs::path("runs") / (kind_name(config.kind) + "-" + std::to_string(config.seed));
}

RunSummary run_experiment(const ExperimentConfig& config, const RunOptions& options) {
    RunState s{config, options, config.output.empty() ? default_output(config) : fs::path(config.output), json::object(), {}};
    prepare_directory(s.dir);
    const std::string context = kind_name(config.kind) + " experiment: ";
    try {
        switch (config.kind) {
        case ExperimentKind::resolvent: run_resolvent(s); break;
        case ExperimentKind::hawkes: run_hawkes(s); break;
        case ExperimentKind::meanfield: run_meanfield(s); break;
        case ExperimentKind::limit: run_limit(s); break;
        case ExperimentKind::regime_compare: run_regime_compare(s); break;
        case ExperimentKind::acceptance_suite: run_acceptance_kind(s); break;
        }
    } catch (const UnsupportedSimulation& e) {
        throw UnsupportedSimulation(context + e.what());
    } catch (const DomainError& e) {
        throw DomainError(context + e.what());
    } catch (const InvalidParameter& e) {
        throw InvalidParameter(context + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError(context + e.what());
    }

    {
        std::ofstream out(s.dir / "reports.jsonl", std::ios::binary);
        for (const auto& r : s.reports) {
            out << report_to_json(r).dump() << '\n';
        }
    }
    RunSummary summary;
    summary.directory = s.dir;
    summary.reports = s.reports;
    summary.pass = std::all_of(s.reports.begin(), s.reports.end(), [](const TestReport& r) { return r.pass; });

    json reports = json::array();
    for (const auto& r : s.reports) {
        reports.push_back(report_to_json(r));
    }
    json manifest;
    manifest["schema_version"] = manifest_schema_version;
    manifest["tool"] = "nuhawkes";
    manifest["kind"] = kind_name(config.kind);
    manifest["seed"] = config.seed;
    manifest["config_hash"] = sha256_text(config.normalized.dump());
    manifest["config"] = config.normalized;
    manifest["versions"] = {{"nuhawkes", NUHAWKES_VERSION},
                            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                          "." + std::to_string(EIGEN_MINOR_VERSION)},
                            {"boost", BOOST_LIB_VERSION},
                            {"openssl", OPENSSL_VERSION_TEXT},
                            {"compiler", __VERSION__}};
    manifest["derived"] = s.derived;
    manifest["artifacts"] = artifact_listing(s.dir, {"manifest.json"});
    manifest["reports"] = reports;
    manifest["pass"] = summary.pass;
    {
        std::ofstream out(s.dir / "manifest.json", std::ios::binary);
        out << manifest.dump(2) << '\n';
        if (!out) {
            throw std::runtime_error("cannot write manifest in " + s.dir.string());
        }
    }
    summary.manifest = std::move(manifest);
    return summary;
}

} // namespace nuhawkes::cli
