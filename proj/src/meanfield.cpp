#include "nuhawkes/meanfield.hpp"

#include "nuhawkes/errors.hpp"
#include "nuhawkes/random.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace nuhawkes {

namespace {

// Running sum_{tau in set} phi(t - tau) for a univariate kernel; Markov for
// exponential kernels, a direct sum otherwise.
class Excitation {
public:
    explicit Excitation(const Kernel& kernel) : kernel_(kernel) {
        if (const auto* e = std::get_if<ExponentialForm>(&kernel.form())) {
            alpha_ = e->alpha(0, 0);
            rate_ = e->beta(0, 0);
            markov_ = true;
        }
    }

    double at(double t) {
        if (markov_) {
            if (t > now_) {
                value_ *= std::exp(-rate_ * (t - now_));
                now_ = t;
            }
            return value_;
        }
        double acc = 0.0;
        const double end = kernel_.support_end();
        for (double tau : times_) {
            if (t - tau <= end) {
                acc += kernel_.value(0, 0, t - tau);
            }
        }
        return acc;
    }

    // Adds an event at t (after at(t) has been called for the left limit).
    void add(double t) {
        if (markov_) {
            at(t);
            value_ += alpha_;
        } else {
            times_.push_back(t);
        }
    }

private:
    const Kernel& kernel_;
    bool markov_ = false;
    double alpha_ = 0.0;
    double rate_ = 0.0;
    double value_ = 0.0;
    double now_ = 0.0;
    std::vector<double> times_;
};

// Node sums sum_{tau < t} phi(t - tau) and sum Phi(t - tau) for an event list.
NodeSeries excitation_nodes(const Kernel& kernel, const std::vector<double>& times, double horizon,
                            const Grid& grid) {
    HawkesPath shell;
    shell.params = HawkesParams{Vector::Zero(1), kernel, horizon};
    shell.times = times;
    shell.components.assign(times.size(), 0);
    return compensator_martingale(shell, grid);
}

Matrix tagged_node_counts(const std::vector<std::vector<double>>& tagged, const Grid& grid) {
    const auto rows = static_cast<Eigen::Index>(grid.nodes());
    Matrix out = Matrix::Zero(rows, static_cast<Eigen::Index>(tagged.size()));
    for (std::size_t i = 0; i < tagged.size(); ++i) {
        std::size_t next = 0;
        for (Eigen::Index k = 0; k < rows; ++k) {
            const double t = grid.node(static_cast<std::size_t>(k));
            while (next < tagged[i].size() && tagged[i][next] <= t) {
                ++next;
            }
            out(k, static_cast<Eigen::Index>(i)) = static_cast<double>(next);
        }
    }
    return out;
}

void fill_rescaled(ParticleSystemPath& path) {
    const double n = static_cast<double>(path.params.particles);
    const double beta = path.params.beta;
    path.tagged_martingales = path.tagged_counts;
    for (Eigen::Index i = 0; i < path.tagged_counts.cols(); ++i) {
        path.tagged_martingales.col(i) -= path.common_compensator;
    }
    const double particle_scale = n * beta * beta;
    path.rescaled_common_compensator = particle_scale * path.common_compensator;
    path.rescaled_tagged_counts = particle_scale * path.tagged_counts;
    path.rescaled_tagged_martingales = (std::sqrt(n) * beta) * path.tagged_martingales;
    path.rescaled_aggregate = rescale_path(path.aggregate, beta, path.grid);
}

// Everything derived from (aggregate events, owners).
void finalize(ParticleSystemPath& path) {
    const auto& params = path.params;
    const double n = static_cast<double>(params.particles);
    path.grid = params.grid();
    attach_nodes(path.aggregate, path.grid);
    path.common_intensity = path.aggregate.nodes->intensity.col(0) / n;
    path.common_compensator = path.aggregate.nodes->compensator.col(0) / n;

    path.counts.assign(params.particles, 0);
    path.tagged_times.assign(params.tagged, {});
    for (std::size_t k = 0; k < path.owner.size(); ++k) {
        const auto who = path.owner[k];
        ++path.counts[who];
        if (who < params.tagged) {
            path.tagged_times[who].push_back(path.aggregate.times[k]);
        }
    }
    path.tagged_counts = tagged_node_counts(path.tagged_times, path.grid);
    fill_rescaled(path);
}

} // namespace

double EmpiricalMeasureSnapshot::total_weight() const noexcept {
    double s = 0.0;
    for (double w : weights) {
        s += w;
    }
    return s;
}

double EmpiricalMeasureSnapshot::mean_x() const noexcept {
    double s = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        s += weights[k] * xs[k];
    }
    return s;
}

double EmpiricalMeasureSnapshot::mean_z() const noexcept {
    double s = 0.0;
    for (std::size_t k = 0; k < zs.size(); ++k) {
        s += weights[k] * zs[k];
    }
    return s;
}

void EmpiricalMeasureSnapshot::write_csv(std::ostream& out, bool header) const {
    if (header) {
        out << "t,index,x,z,weight\n";
    }
    out.precision(17);
    for (std::size_t k = 0; k < xs.size(); ++k) {
        out << time << ',' << k << ',' << xs[k] << ',' << zs[k] << ',' << weights[k] << '\n';
    }
}

void MeanFieldParams::validate() const {
    if (particles == 0) {
        throw ConfigError("particle count n must be at least 1");
    }
    if (tagged > particles) {
        throw ConfigError("tagged count K = " + std::to_string(tagged) + " exceeds particle count n = " +
                          std::to_string(particles));
    }
    if (kernel.dimension() != 1) {
        throw InvalidParameter("mean-field interaction kernel must be univariate");
    }
    if (!(mu0 >= 0.0) || !std::isfinite(mu0)) {
        throw InvalidParameter("mu0 must be finite and nonnegative");
    }
    if (!(beta > 0.0)) {
        throw InvalidParameter("beta_n must be positive");
    }
    if (!(horizon > 0.0) || !(output_step > 0.0)) {
        throw ConfigError("horizon and output step must be positive");
    }
    if (particles > std::numeric_limits<std::uint32_t>::max()) {
        throw ConfigError("particle count exceeds 32-bit labels");
    }
}

std::vector<std::uint32_t> ParticleSystemPath::particle_counts_at(double t) const {
    std::vector<std::uint32_t> out(params.particles, 0);
    for (std::size_t k = 0; k < owner.size() && aggregate.times[k] <= t; ++k) {
        ++out[owner[k]];
    }
    return out;
}

ParticleSystemPath simulate_particles(const MeanFieldParams& params, std::uint64_t seed,
                                      std::uint64_t path_index) {
    params.validate();
    ParticleSystemPath path;
    path.params = params;
    path.aggregate = simulate_thinning(HawkesParams{Vector::Constant(1, params.mu0), params.kernel, params.horizon},
                                       seed, path_index);
    Sampler labels(make_stream(seed, "meanfield.assign", path_index));
    path.owner.resize(path.aggregate.size());
    for (auto& who : path.owner) {
        who = static_cast<std::uint32_t>(labels.index(params.particles));
    }
    finalize(path);
    return path;
}

std::vector<EmpiricalMeasureSnapshot> empirical_snapshot(const ParticleSystemPath& path,
                                                         const std::vector<double>& times) {
    const double n = static_cast<double>(path.params.particles);
    const double beta = path.params.beta;
    HawkesPath shell = path.aggregate;
    shell.nodes.reset();
    std::vector<EmpiricalMeasureSnapshot> out;
    out.reserve(times.size());
    for (double t : times) {
        if (t < 0.0 || t > path.params.horizon * (1.0 + 1e-12)) {
            throw OutOfRangeError("snapshot time outside horizon");
        }
        const double lambda0 = (t == 0.0) ? 0.0 : compensator_martingale(shell, Grid(t, t)).compensator(1, 0) / n;
        const auto counts = path.particle_counts_at(t);
        EmpiricalMeasureSnapshot snap;
        snap.time = t;
        snap.source = "simulation";
        snap.xs.reserve(counts.size());
        snap.zs.reserve(counts.size());
        for (auto c : counts) {
            const double ni = static_cast<double>(c);
            snap.xs.push_back(n * beta * beta * ni);
            snap.zs.push_back(std::sqrt(n) * beta * (ni - lambda0));
        }
        snap.weights.assign(counts.size(), 1.0 / n);
        out.push_back(std::move(snap));
    }
    return out;
}

CoupledPaths simulate_coupled_auxiliary(const MeanFieldParams& params, std::uint64_t seed,
                                        std::uint64_t path_index) {
    params.validate();
    const Kernel& kernel = params.kernel;
    if (!kernel.nonincreasing() || !std::isfinite(kernel.value(0, 0, 0.0))) {
        throw UnsupportedSimulation("coupled system needs a bounded nonincreasing kernel");
    }
    const std::size_t n = params.particles;
    const double nd = static_cast<double>(n);
    const std::size_t tagged = params.tagged;
    const double base = params.mu0 / nd;
    Sampler rng(make_stream(seed, "meanfield.coupled", path_index));

    // Events feeding both intensities (auxiliary events of untagged particles)
    // and events feeding lambda_0 only. lambda_0 = base + (shared + extra)/n
    // with extra >= 0, so theta <= lambda_0 also holds in floating point.
    Excitation shared(kernel);
    Excitation extra(kernel);
    std::vector<double> shared_times;
    std::vector<double> extra_times;

    CoupledPaths out;
    ParticleSystemPath& main = out.main;
    AuxiliarySystemPath& aux = out.auxiliary;
    main.params = params;
    main.aggregate.params = HawkesParams{Vector::Constant(1, params.mu0), kernel, params.horizon};

    double t = 0.0;
    double bound = base;  // per-particle bound on lambda_0, nonincreasing between events
    while (true) {
        if (!(bound > 0.0)) {
            break;
        }
        const double candidate = t + rng.exponential(nd * bound);
        if (candidate > params.horizon) {
            break;
        }
        if (!(candidate > t)) {
            continue;
        }
        t = candidate;
        const double s = shared.at(t);
        const double e = extra.at(t);
        const double theta = base + s / nd;
        const double lambda0 = base + (s + e) / nd;
        const auto who = static_cast<std::uint32_t>(rng.index(n));
        const double mark = rng.uniform() * bound;
        if (mark <= lambda0) {
            main.aggregate.times.push_back(t);
            main.aggregate.components.push_back(0);
            main.owner.push_back(who);
            if (mark <= theta) {
                aux.times.push_back(t);
                aux.owner.push_back(who);
            }
            if (mark <= theta && who >= tagged) {
                shared.add(t);
                shared_times.push_back(t);
            } else {
                extra.add(t);
                extra_times.push_back(t);
            }
            bound = base + (shared.at(t) + extra.at(t)) / nd;
        } else {
            bound = lambda0;
        }
    }

    finalize(main);

    const Grid grid = params.grid();
    aux.grid = grid;
    const NodeSeries shared_nodes = excitation_nodes(kernel, shared_times, params.horizon, grid);
    const NodeSeries extra_nodes = excitation_nodes(kernel, extra_times, params.horizon, grid);
    const auto rows = static_cast<Eigen::Index>(grid.nodes());
    aux.theta = Vector(rows);
    aux.compensator = Vector(rows);
    for (Eigen::Index k = 0; k < rows; ++k) {
        const double tk = grid.node(static_cast<std::size_t>(k));
        const double s = shared_nodes.intensity(k, 0);
        const double e = extra_nodes.intensity(k, 0);
        aux.theta(k) = base + s / nd;
        main.common_intensity(k) = base + (s + e) / nd;
        const double sc = shared_nodes.compensator(k, 0);
        const double ec = extra_nodes.compensator(k, 0);
        aux.compensator(k) = base * tk + sc / nd;
        main.common_compensator(k) = base * tk + (sc + ec) / nd;
    }
    fill_rescaled(main);

    std::vector<std::vector<double>> aux_tagged(tagged);
    std::vector<double> untagged;
    std::vector<std::uint32_t> aux_counts(n, 0);
    for (std::size_t k = 0; k < aux.times.size(); ++k) {
        ++aux_counts[aux.owner[k]];
        if (aux.owner[k] < tagged) {
            aux_tagged[aux.owner[k]].push_back(aux.times[k]);
        } else {
            untagged.push_back(aux.times[k]);
        }
    }
    aux.tagged_counts = tagged_node_counts(aux_tagged, grid);
    aux.tagged_martingales = aux.tagged_counts;
    for (Eigen::Index i = 0; i < aux.tagged_counts.cols(); ++i) {
        aux.tagged_martingales.col(i) -= aux.compensator;
    }
    aux.untagged_aggregate = tagged_node_counts({untagged}, grid).col(0);

    bool ok = (aux.theta.array() <= main.common_intensity.array()).all();
    ok = ok && (aux.tagged_counts.array() <= main.tagged_counts.array()).all();
    for (std::size_t i = 0; i < n && ok; ++i) {
        ok = aux_counts[i] <= main.counts[i];
    }
    aux.dominance_holds = ok;
    if (!ok) {
        throw std::logic_error("coupled auxiliary system violated pathwise dominance");
    }
    return out;
}

} // namespace nuhawkes
