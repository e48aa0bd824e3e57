#include "nuhawkes/stats.hpp"

#include "nuhawkes/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nuhawkes {

namespace {

void require_nonempty(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || b.empty()) {
        throw InvalidParameter("empirical distances need two nonempty samples");
    }
}

std::vector<double> normalized(std::vector<double> w, std::size_t size) {
    if (w.empty()) {
        return std::vector<double>(size, 1.0 / static_cast<double>(size));
    }
    if (w.size() != size) {
        throw InvalidParameter("weights and sample differ in length");
    }
    double total = 0.0;
    for (double v : w) {
        if (!(v >= 0.0)) {
            throw InvalidParameter("weights must be nonnegative");
        }
        total += v;
    }
    if (!(total > 0.0)) {
        throw InvalidParameter("weights sum to zero");
    }
    for (double& v : w) {
        v /= total;
    }
    return w;
}

} // namespace

double kolmogorov_survival(double lambda) {
    if (lambda <= 0.0) {
        return 1.0;
    }
    if (lambda < 0.2) {
        return 1.0;  // series converges slowly; true value is 1 to 12 digits
    }
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-18) {
            break;
        }
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

TestReport ks_distance(std::vector<double> a, std::vector<double> b, double level) {
    require_nonempty(a, b);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() || j < b.size()) {
        double x;
        if (j >= b.size() || (i < a.size() && a[i] <= b[j])) {
            x = a[i];
        } else {
            x = b[j];
        }
        while (i < a.size() && a[i] == x) {
            ++i;
        }
        while (j < b.size() && b[j] == x) {
            ++j;
        }
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    TestReport r;
    r.name = "ks";
    r.description = "two-sample Kolmogorov-Smirnov";
    r.statistic = d;
    r.size_a = a.size();
    r.size_b = b.size();
    const double n_eff = na * nb / (na + nb);
    r.p_value = kolmogorov_survival(std::sqrt(n_eff) * d);
    r.threshold = level;
    r.pass = *r.p_value > level;
    return r;
}

TestReport wasserstein1(std::vector<double> a, std::vector<double> b, std::vector<double> weights_a,
                        std::vector<double> weights_b) {
    require_nonempty(a, b);
    auto wa = normalized(std::move(weights_a), a.size());
    auto wb = normalized(std::move(weights_b), b.size());
    auto sorted_pairs = [](std::vector<double>& xs, std::vector<double>& ws) {
        std::vector<std::size_t> idx(xs.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t l, std::size_t r) { return xs[l] < xs[r]; });
        std::vector<double> x2(xs.size());
        std::vector<double> w2(xs.size());
        for (std::size_t k = 0; k < idx.size(); ++k) {
            x2[k] = xs[idx[k]];
            w2[k] = ws[idx[k]];
        }
        xs.swap(x2);
        ws.swap(w2);
    };
    sorted_pairs(a, wa);
    sorted_pairs(b, wb);
    // integral of |F_a - F_b| over the merged breakpoints
    std::size_t i = 0;
    std::size_t j = 0;
    double fa = 0.0;
    double fb = 0.0;
    double prev = std::min(a.front(), b.front());
    double dist = 0.0;
    while (i < a.size() || j < b.size()) {
        const double x = (j >= b.size() || (i < a.size() && a[i] <= b[j])) ? a[i] : b[j];
        dist += std::abs(fa - fb) * (x - prev);
        while (i < a.size() && a[i] == x) {
            fa += wa[i++];
        }
        while (j < b.size() && b[j] == x) {
            fb += wb[j++];
        }
        prev = x;
    }
    TestReport r;
    r.name = "wasserstein1";
    r.description = "1-Wasserstein distance between empirical measures";
    r.statistic = dist;
    r.size_a = a.size();
    r.size_b = b.size();
    r.pass = std::isfinite(dist);
    return r;
}

TestReport qv_identity_check(const HawkesPath& path, double tolerance) {
    const std::size_t d = static_cast<std::size_t>(path.params.mu.size());
    // Jumps of M_i = jumps of N_i (the compensator is continuous); a jump of
    // size dN at a timestamp shared by several components would put
    // dN_i dN_j into the covariation.
    std::vector<double> qv(d, 0.0);
    Matrix cross = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    std::size_t k = 0;
    while (k < path.times.size()) {
        Vector jump = Vector::Zero(static_cast<Eigen::Index>(d));
        const double t = path.times[k];
        while (k < path.times.size() && path.times[k] == t) {
            jump(path.components[k]) += 1.0;
            ++k;
        }
        for (std::size_t i = 0; i < d; ++i) {
            qv[i] += jump(static_cast<Eigen::Index>(i)) * jump(static_cast<Eigen::Index>(i));
        }
        cross += jump * jump.transpose();
    }
    const Vector counts = path.counts_at(path.params.horizon);
    double residual = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        residual = std::max(residual, std::abs(qv[i] - counts(static_cast<Eigen::Index>(i))));
        for (std::size_t j = 0; j < d; ++j) {
            if (i != j) {
                residual = std::max(residual, std::abs(cross(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
            }
        }
    }
    TestReport r;
    r.name = "qv_identity";
    r.description = "[M_i] = N_i and [M_i, M_j] = 0 for i != j";
    r.statistic = residual;
    r.threshold = tolerance;
    r.size_a = path.size();
    r.pass = residual <= tolerance;
    return r;
}

TestReport qv_identity_check(const std::vector<double>& jump_times, double scale, double tolerance) {
    // sum of squared jumps of scale * M_i; coinciding times form one larger jump
    std::vector<double> sorted = jump_times;
    std::sort(sorted.begin(), sorted.end());
    double qv = 0.0;
    std::size_t k = 0;
    while (k < sorted.size()) {
        std::size_t mult = 0;
        const double t = sorted[k];
        while (k < sorted.size() && sorted[k] == t) {
            ++mult;
            ++k;
        }
        qv += scale * scale * static_cast<double>(mult * mult);
    }
    const double target = scale * scale * static_cast<double>(jump_times.size());
    TestReport r;
    r.name = "qv_identity_particle";
    r.description = "[scale M_i] = scale^2 N_i";
    r.statistic = std::abs(qv - target) / std::max(1.0, target);
    r.threshold = tolerance;
    r.size_a = jump_times.size();
    r.pass = r.statistic <= tolerance;
    return r;
}

double exchangeable_coefficient(std::size_t n, std::size_t k) {
    if (k > n) {
        return 0.0;
    }
    double c = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
        c *= static_cast<double>(n - i) / static_cast<double>(n);
    }
    return c;
}

ExchangeableMoment exchangeable_moment(const std::vector<double>& values, const std::function<double(double)>& g,
                                       std::size_t k) {
    const std::size_t n = values.size();
    if (n == 0 || k == 0 || k > n) {
        throw InvalidParameter("exchangeable moment needs 1 <= K <= n");
    }
    if (std::pow(static_cast<double>(n), static_cast<double>(k)) > 1e7) {
        throw DomainError("n^K > 1e7 index tuples: enumeration refused");
    }
    std::vector<double> gv(n);
    for (std::size_t i = 0; i < n; ++i) {
        gv[i] = g(values[i]);
    }
    double mean = 0.0;
    for (double v : gv) {
        mean += v;
    }
    mean /= static_cast<double>(n);

    // enumerate tuples (i_1..i_K) with an odometer
    std::vector<std::size_t> idx(k, 0);
    double distinct = 0.0;
    double repeated = 0.0;
    std::vector<char> used(n, 0);
    while (true) {
        double prod = 1.0;
        bool all_distinct = true;
        for (std::size_t p = 0; p < k; ++p) {
            prod *= gv[idx[p]];
            if (used[idx[p]]) {
                all_distinct = false;
            }
            used[idx[p]] = 1;
        }
        for (std::size_t p = 0; p < k; ++p) {
            used[idx[p]] = 0;
        }
        (all_distinct ? distinct : repeated) += prod;
        std::size_t p = 0;
        while (p < k && ++idx[p] == n) {
            idx[p++] = 0;
        }
        if (p == k) {
            break;
        }
    }
    double falling = 1.0;  // n! / (n-K)!
    for (std::size_t i = 0; i < k; ++i) {
        falling *= static_cast<double>(n - i);
    }
    const double nk = std::pow(static_cast<double>(n), static_cast<double>(k));
    ExchangeableMoment out;
    out.lhs = std::pow(mean, static_cast<double>(k));
    out.coefficient = exchangeable_coefficient(n, k);
    out.distinct_average = distinct / falling;
    out.remainder = repeated / nk;
    out.rhs = out.coefficient * out.distinct_average + out.remainder;
    return out;
}

TestReport exchangeable_moment_check(const std::vector<double>& values, const std::function<double(double)>& g,
                                     std::size_t k, double tolerance) {
    const auto m = exchangeable_moment(values, g, k);
    TestReport r;
    r.name = "exchangeable_moment";
    r.description = "((1/n) sum g)^K = coefficient * distinct average + remainder";
    r.statistic = std::abs(m.lhs - m.rhs) / std::max(1.0, std::abs(m.lhs));
    r.threshold = tolerance;
    r.size_a = values.size();
    r.pass = r.statistic <= tolerance;
    return r;
}

HolderEstimate holder_exponent(const std::vector<double>& series) {
    if (series.size() < 256) {
        throw InvalidParameter("Holder estimate needs at least 256 nodes");
    }
    HolderEstimate est;
    std::vector<double> lx;
    std::vector<double> ly;
    for (int p = 0; p <= 6; ++p) {
        const std::size_t lag = std::size_t{1} << p;
        double acc = 0.0;
        for (std::size_t k = 0; k + lag < series.size(); ++k) {
            acc += std::abs(series[k + lag] - series[k]);
        }
        acc /= static_cast<double>(series.size() - lag);
        if (!(acc > 0.0)) {
            est.degenerate = true;
            return est;
        }
        lx.push_back(std::log(static_cast<double>(lag)));
        ly.push_back(std::log(acc));
    }
    const double n = static_cast<double>(lx.size());
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        sxx += (lx[k] - mx) * (lx[k] - mx);
        sxy += (lx[k] - mx) * (ly[k] - my);
    }
    est.slope = sxy / sxx;
    double rss = 0.0;
    for (std::size_t k = 0; k < lx.size(); ++k) {
        const double fit = my + est.slope * (lx[k] - mx);
        rss += (ly[k] - fit) * (ly[k] - fit);
    }
    est.standard_error = std::sqrt(rss / (n - 2.0) / sxx);
    est.exponent = std::clamp(est.slope, std::numeric_limits<double>::min(), 1.0);
    return est;
}

MeanEstimate mean_estimate(const std::vector<double>& xs) {
    MeanEstimate e;
    e.count = xs.size();
    if (xs.empty()) {
        return e;
    }
    const double n = static_cast<double>(xs.size());
    e.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) {
            ss += (x - e.mean) * (x - e.mean);
        }
        e.standard_error = std::sqrt(ss / (n - 1.0) / n);
    }
    return e;
}

TestReport within_standard_errors(std::string name, const MeanEstimate& estimate, double target, double sigmas) {
    TestReport r;
    r.name = std::move(name);
    r.description = "Monte Carlo mean within " + std::to_string(sigmas) + " standard errors of target";
    r.statistic = estimate.mean - target;
    r.threshold = sigmas * estimate.standard_error;
    r.size_a = estimate.count;
    // degenerate samples (zero spread) must then match to rounding
    const double floor = 1e-12 * std::max(1.0, std::abs(target));
    r.pass = std::abs(r.statistic) <= std::max(r.threshold, floor);
    return r;
}

} // namespace nuhawkes
