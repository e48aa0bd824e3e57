#include "nuhawkes/hawkes.hpp"

#include "nuhawkes/errors.hpp"
#include "nuhawkes/random.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <queue>

namespace nuhawkes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Split of one kernel component phi_ij for thinning: the capped part
// min(phi, cap) is dominated by cap, the head (phi - cap)^+ lives on [0, lag]
// with finite mass and is sampled directly.
struct ComponentSplit {
    double lag = 0.0;
    double cap = kInf;
    double head_mass = 0.0;
};

std::vector<ComponentSplit> thinning_splits(const Kernel& kernel) {
    const std::size_t d = kernel.dimension();
    std::vector<ComponentSplit> splits(d * d);
    const auto* power = std::get_if<PowerLawForm>(&kernel.form());
    if (power == nullptr) {
        return splits;
    }
    const double lag = std::isinf(power->cutoff) ? 1.0 : power->cutoff;
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            auto& s = splits[i * d + j];
            s.lag = lag;
            s.cap = kernel.value(i, j, lag);
            s.head_mass = std::max(0.0, kernel.cumulative(i, j, lag) - s.cap * lag);
        }
    }
    return splits;
}

// Displacement u in (0, lag] with density proportional to (phi - cap)^+.
double head_displacement(const Kernel& kernel, std::size_t i, std::size_t j, const ComponentSplit& s,
                         double uniform) {
    const double target = uniform * s.head_mass;
    double lo = 0.0;
    double hi = s.lag;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * s.lag; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double mass = kernel.cumulative(i, j, mid) - s.cap * mid;
        (mass < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

struct PendingEvent {
    double time;
    std::uint32_t component;
    bool operator>(const PendingEvent& other) const { return time > other.time; }
};

// Intensity state shared by the thinning loop: exponential kernels keep the
// decayed sums S_ij, other kernels recompute from the event list.
class IntensityState {
public:
    IntensityState(const HawkesParams& params, std::vector<ComponentSplit> splits)
        : params_(params), splits_(std::move(splits)), d_(params.kernel.dimension()) {
        if (const auto* e = std::get_if<ExponentialForm>(&params.kernel.form())) {
            exponential_ = e;
            excitation_ = Matrix::Zero(e->alpha.rows(), e->alpha.cols());
        }
    }

    void advance(double t) {
        if (exponential_ != nullptr && t > now_) {
            excitation_ = excitation_.cwiseProduct((-(t - now_) * exponential_->beta).array().exp().matrix());
        }
        now_ = t;
    }

    // Intensity of the thinned (capped) part at the current time.
    Vector capped() const {
        Vector lam = params_.mu;
        if (exponential_ != nullptr) {
            lam += excitation_.rowwise().sum();
            return lam;
        }
        for (std::size_t k = 0; k < times_.size(); ++k) {
            const double lag = now_ - times_[k];
            const std::size_t j = comps_[k];
            for (std::size_t i = 0; i < d_; ++i) {
                const double v = params_.kernel.value(i, j, lag);
                lam(static_cast<Eigen::Index>(i)) += std::min(v, splits_[i * d_ + j].cap);
            }
        }
        return lam;
    }

    void record(double t, std::uint32_t component) {
        times_.push_back(t);
        comps_.push_back(component);
        if (exponential_ != nullptr) {
            excitation_.col(component) += exponential_->alpha.col(component);
        }
    }

    const std::vector<double>& times() const { return times_; }
    const std::vector<std::uint32_t>& components() const { return comps_; }

private:
    const HawkesParams& params_;
    std::vector<ComponentSplit> splits_;
    std::size_t d_;
    const ExponentialForm* exponential_ = nullptr;
    Matrix excitation_;
    double now_ = 0.0;
    std::vector<double> times_;
    std::vector<std::uint32_t> comps_;
};

std::vector<std::string> stability_warnings(const Kernel& kernel) {
    std::vector<std::string> out;
    try {
        const auto report = l1_and_stability(kernel);
        if (!report.stable) {
            out.push_back("spectral radius " + std::to_string(report.spectral_radius) +
                          " >= 1: event counts may grow explosively");
        }
    } catch (const DomainError&) {
        out.push_back("kernel not integrable on [0, inf)");
    }
    return out;
}

void require_within_horizon(const HawkesPath& path, const Grid& grid) {
    if (grid.end() > path.params.horizon * (1.0 + 1e-12)) {
        throw OutOfRangeError("grid end " + std::to_string(grid.end()) + " exceeds path horizon " +
                              std::to_string(path.params.horizon));
    }
}

} // namespace

void HawkesParams::validate() const {
    if (static_cast<std::size_t>(mu.size()) != kernel.dimension()) {
        throw InvalidParameter("baseline dimension " + std::to_string(mu.size()) +
                               " does not match kernel dimension " + std::to_string(kernel.dimension()));
    }
    if (!mu.allFinite() || (mu.array() < 0.0).any()) {
        throw InvalidParameter("baseline mu must be finite and nonnegative");
    }
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw ConfigError("horizon must be positive and finite");
    }
}

std::vector<double> HawkesPath::component_times(std::size_t i) const {
    std::vector<double> out;
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (components[k] == i) {
            out.push_back(times[k]);
        }
    }
    return out;
}

Vector HawkesPath::counts_at(double t) const {
    Vector out = Vector::Zero(params.mu.size());
    for (std::size_t k = 0; k < times.size() && times[k] <= t; ++k) {
        out(components[k]) += 1.0;
    }
    return out;
}

void HawkesPath::write_events_csv(std::ostream& out) const {
    out << "component,time\n";
    out.precision(17);
    for (std::size_t k = 0; k < times.size(); ++k) {
        out << components[k] << ',' << times[k] << '\n';
    }
}

void HawkesPath::write_nodes_csv(std::ostream& out) const {
    if (!nodes) {
        throw InvalidParameter("path has no node series; call attach_nodes first");
    }
    const auto d = nodes->counts.cols();
    out << "t";
    for (const char* name : {"lambda", "N", "Lambda", "M"}) {
        for (Eigen::Index i = 0; i < d; ++i) {
            out << ',' << name << '_' << i;
        }
    }
    out << '\n';
    out.precision(17);
    for (Eigen::Index k = 0; k < nodes->counts.rows(); ++k) {
        out << nodes->grid.node(static_cast<std::size_t>(k));
        for (const Matrix* m : {&nodes->intensity, &nodes->counts, &nodes->compensator, &nodes->martingale}) {
            for (Eigen::Index i = 0; i < d; ++i) {
                out << ',' << (*m)(k, i);
            }
        }
        out << '\n';
    }
}

HawkesPath simulate_thinning(const HawkesParams& params, std::uint64_t seed, std::uint64_t path_index) {
    params.validate();
    const Kernel& kernel = params.kernel;
    if (!kernel.nonincreasing()) {
        throw UnsupportedSimulation("thinning needs an entrywise nonincreasing kernel; use the cluster method");
    }
    HawkesPath path;
    path.params = params;
    path.warnings = stability_warnings(kernel);

    const std::size_t d = kernel.dimension();
    const auto splits = thinning_splits(kernel);
    Sampler rng(make_stream(seed, "hawkes.thinning", path_index));
    IntensityState state(params, splits);
    std::priority_queue<PendingEvent, std::vector<PendingEvent>, std::greater<>> heads;

    const double horizon = params.horizon;
    double t = 0.0;
    double last_event = -1.0;
    Vector lam = state.capped();
    double bound = lam.sum();

    auto accept = [&](double time, std::uint32_t component) {
        state.record(time, component);
        last_event = time;
        for (std::size_t i = 0; i < d; ++i) {
            const auto& s = splits[i * d + component];
            if (s.head_mass <= 0.0) {
                continue;
            }
            const auto offspring = rng.poisson(s.head_mass);
            for (std::uint64_t k = 0; k < offspring; ++k) {
                double when = time;
                while (!(when > time)) {  // redraw a displacement that rounds to zero
                    when = time + head_displacement(kernel, i, component, s, rng.uniform());
                }
                if (when <= horizon) {
                    heads.push({when, static_cast<std::uint32_t>(i)});
                }
            }
        }
        lam = state.capped();
        bound = lam.sum();
    };

    while (true) {
        const double candidate = bound > 0.0 ? t + rng.exponential(bound) : kInf;
        const double next_head = heads.empty() ? kInf : heads.top().time;
        if (next_head <= candidate && next_head <= horizon) {
            const auto ev = heads.top();
            heads.pop();
            if (!(ev.time > last_event)) {
                continue;  // coincident timestamp; probability zero
            }
            t = ev.time;
            state.advance(t);
            accept(t, ev.component);
            continue;
        }
        if (candidate > horizon) {
            break;
        }
        if (!(candidate > t) || !(candidate > last_event)) {
            continue;  // tie in floating point: redraw the inter-arrival time
        }
        t = candidate;
        state.advance(t);
        lam = state.capped();
        const double total = lam.sum();
        if (rng.uniform() * bound <= total) {
            double pick = rng.uniform() * total;
            std::uint32_t component = 0;
            while (component + 1 < d && pick >= lam(component)) {
                pick -= lam(component);
                ++component;
            }
            accept(t, component);
        } else {
            bound = total;
        }
    }
    path.times = state.times();
    path.components = state.components();
    return path;
}

HawkesPath simulate_cluster(const HawkesParams& params, std::uint64_t seed, std::uint64_t path_index) {
    params.validate();
    const Kernel& kernel = params.kernel;
    const auto report = l1_and_stability(kernel);
    if (!report.stable) {
        throw UnsupportedSimulation("cluster method refuses rho(||phi||) = " +
                                    std::to_string(report.spectral_radius) + " >= 1 (clusters may not terminate)");
    }
    const std::size_t d = kernel.dimension();
    const double horizon = params.horizon;
    Sampler rng(make_stream(seed, "hawkes.cluster", path_index));

    HawkesPath path;
    path.params = params;
    while (true) {
        std::vector<std::pair<double, std::uint32_t>> events;
        std::vector<std::pair<double, std::uint32_t>> frontier;
        for (std::size_t i = 0; i < d; ++i) {
            const auto immigrants = rng.poisson(params.mu(static_cast<Eigen::Index>(i)) * horizon);
            for (std::uint64_t k = 0; k < immigrants; ++k) {
                frontier.emplace_back(horizon * rng.uniform(), static_cast<std::uint32_t>(i));
            }
        }
        while (!frontier.empty()) {
            const auto [time, parent] = frontier.back();
            frontier.pop_back();
            events.emplace_back(time, parent);
            for (std::size_t i = 0; i < d; ++i) {
                const double mass = report.l1(static_cast<Eigen::Index>(i), parent);
                const auto children = rng.poisson(mass);
                for (std::uint64_t k = 0; k < children; ++k) {
                    const double when = time + kernel.displacement_quantile(i, parent, rng.uniform());
                    if (when <= horizon) {
                        frontier.emplace_back(when, static_cast<std::uint32_t>(i));
                    }
                }
            }
        }
        std::sort(events.begin(), events.end());
        const bool tie = std::adjacent_find(events.begin(), events.end(), [](const auto& a, const auto& b) {
                             return a.first == b.first;
                         }) != events.end();
        if (tie) {
            continue;  // probability zero; draw the whole configuration again
        }
        path.times.reserve(events.size());
        path.components.reserve(events.size());
        for (const auto& [time, comp] : events) {
            path.times.push_back(time);
            path.components.push_back(comp);
        }
        break;
    }
    return path;
}

Vector intensity_at(const HawkesPath& path, double t) {
    const Kernel& kernel = path.params.kernel;
    Vector lam = path.params.mu;
    const std::size_t d = kernel.dimension();
    for (std::size_t k = 0; k < path.times.size() && path.times[k] < t; ++k) {
        const double lag = t - path.times[k];
        if (lag > kernel.support_end()) {
            continue;
        }
        for (std::size_t i = 0; i < d; ++i) {
            lam(static_cast<Eigen::Index>(i)) += kernel.value(i, path.components[k], lag);
        }
    }
    return lam;
}

NodeSeries compensator_martingale(const HawkesPath& path, const Grid& grid) {
    require_within_horizon(path, grid);
    const Kernel& kernel = path.params.kernel;
    const Vector& mu = path.params.mu;
    const std::size_t d = kernel.dimension();
    const auto di = static_cast<Eigen::Index>(d);
    const auto rows = static_cast<Eigen::Index>(grid.nodes());

    NodeSeries out;
    out.grid = grid;
    out.intensity = Matrix::Zero(rows, di);
    out.counts = Matrix::Zero(rows, di);
    out.compensator = Matrix::Zero(rows, di);

    if (const auto* e = std::get_if<ExponentialForm>(&kernel.form())) {
        // Lambda_i(t) = mu_i t + sum_j (alpha_ij/beta_ij) N_j(t) - S_ij(t)/beta_ij
        Matrix excitation = Matrix::Zero(di, di);
        Vector counts = Vector::Zero(di);
        double now = 0.0;
        std::size_t next = 0;
        const Matrix mass = e->alpha.cwiseQuotient(e->beta);
        for (Eigen::Index k = 0; k < rows; ++k) {
            const double t = grid.node(static_cast<std::size_t>(k));
            // events strictly before t enter the left limit of lambda
            auto decay_to = [&](double s) {
                excitation = excitation.cwiseProduct((-(s - now) * e->beta).array().exp().matrix());
                now = s;
            };
            while (next < path.times.size() && path.times[next] < t) {
                decay_to(path.times[next]);
                excitation.col(path.components[next]) += e->alpha.col(path.components[next]);
                counts(path.components[next]) += 1.0;
                ++next;
            }
            decay_to(t);
            out.intensity.row(k) = (mu + excitation.rowwise().sum()).transpose();
            Vector lambda_int = mu * t + mass * counts - excitation.cwiseQuotient(e->beta).rowwise().sum();
            out.compensator.row(k) = lambda_int.transpose();
            Vector n_at = counts;
            for (std::size_t m = next; m < path.times.size() && path.times[m] <= t; ++m) {
                n_at(path.components[m]) += 1.0;  // an event exactly at the node
            }
            out.counts.row(k) = n_at.transpose();
        }
    } else {
        for (Eigen::Index k = 0; k < rows; ++k) {
            const double t = grid.node(static_cast<std::size_t>(k));
            Vector lambda_int = mu * t;
            for (std::size_t m = 0; m < path.times.size() && path.times[m] < t; ++m) {
                const std::size_t j = path.components[m];
                for (std::size_t i = 0; i < d; ++i) {
                    lambda_int(static_cast<Eigen::Index>(i)) += kernel.cumulative(i, j, t - path.times[m]);
                }
            }
            out.compensator.row(k) = lambda_int.transpose();
            out.intensity.row(k) = intensity_at(path, t).transpose();
            out.counts.row(k) = path.counts_at(t).transpose();
        }
    }
    // Lambda(0) = 0 exactly; guard against rounding in the closed form
    out.compensator.row(0).setZero();
    out.martingale = out.counts - out.compensator;
    return out;
}

Vector compensator_quadrature(const HawkesPath& path, double t) {
    if (t > path.params.horizon * (1.0 + 1e-12) || t < 0.0) {
        throw OutOfRangeError("compensator time outside path horizon");
    }
    using Gauss = boost::math::quadrature::gauss<double, 20>;
    const auto& nodes = Gauss::abscissa();
    const auto& weights = Gauss::weights();
    std::vector<double> breaks{0.0};
    for (double s : path.times) {
        if (s < t) {
            breaks.push_back(s);
        }
    }
    breaks.push_back(t);
    Vector total = Vector::Zero(path.params.mu.size());
    for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
        const double lo = breaks[b];
        const double hi = breaks[b + 1];
        if (hi <= lo) {
            continue;
        }
        const double half = 0.5 * (hi - lo);
        const double mid = 0.5 * (hi + lo);
        Vector panel = Vector::Zero(total.size());
        for (std::size_t k = 0; k < nodes.size(); ++k) {
            const double x = nodes[k];
            if (x == 0.0) {
                panel += weights[k] * intensity_at(path, mid);
            } else {
                panel += weights[k] * (intensity_at(path, mid - half * x) + intensity_at(path, mid + half * x));
            }
        }
        total += half * panel;
    }
    return total;
}

void attach_nodes(HawkesPath& path, const Grid& grid) {
    path.nodes = compensator_martingale(path, grid);
}

RescaledTriple rescale_path(const HawkesPath& path, double beta, const Grid& grid) {
    if (!(beta > 0.0)) {
        throw InvalidParameter("rescaling needs beta > 0");
    }
    const NodeSeries series = (path.nodes && path.nodes->grid.step() == grid.step() &&
                               path.nodes->grid.cells() == grid.cells())
                                  ? *path.nodes
                                  : compensator_martingale(path, grid);
    RescaledTriple out;
    out.grid = grid;
    out.beta = beta;
    out.compensator = beta * beta * series.compensator;
    out.counts = beta * beta * series.counts;
    out.martingale = beta * series.martingale;
    return out;
}

} // namespace nuhawkes
