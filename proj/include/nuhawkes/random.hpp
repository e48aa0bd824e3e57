#pragma once

#include "nuhawkes/rng.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace nuhawkes {

/// Variate generation on top of one Philox stream. Holds the normal
/// distribution so paired Gaussian draws are not wasted.
class Sampler {
public:
    explicit Sampler(Philox4x32 engine) noexcept : engine_(engine) {}

    double uniform() noexcept { return engine_.uniform(); }

    /// Exp(rate) waiting time; rate must be positive.
    double exponential(double rate) noexcept { return -std::log(engine_.uniform()) / rate; }

    double normal() { return normal_(engine_); }

    std::uint64_t poisson(double mean) {
        if (!(mean > 0.0)) {
            return 0;
        }
        std::poisson_distribution<std::uint64_t> dist(mean);
        return dist(engine_);
    }

    /// Uniform index in [0, count).
    std::uint64_t index(std::uint64_t count) {
        std::uniform_int_distribution<std::uint64_t> dist(0, count - 1);
        return dist(engine_);
    }

    Philox4x32& engine() noexcept { return engine_; }

private:
    Philox4x32 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

} // namespace nuhawkes
