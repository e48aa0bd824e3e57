#include "nuhawkes/grid.hpp"

#include "nuhawkes/errors.hpp"

#include <cmath>
#include <string>

namespace nuhawkes {

Grid::Grid(double horizon, double step) : horizon_(horizon), step_(step), cells_(0) {
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw ConfigError("grid step must be positive and finite, got " + std::to_string(step));
    }
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw ConfigError("grid horizon must be positive and finite, got " + std::to_string(horizon));
    }
    if (step > horizon) {
        throw ConfigError("grid step exceeds horizon");
    }
    // ceil with slack so T = m*h exactly in decimal does not gain a cell
    cells_ = static_cast<std::size_t>(std::ceil(horizon / step - 1e-9));
}

std::vector<double> Grid::node_times() const {
    std::vector<double> out(nodes());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = node(k);
    }
    return out;
}

std::size_t Grid::nearest_node(double t) const {
    if (t < 0.0 || t > end() * (1.0 + 1e-12)) {
        throw OutOfRangeError("time " + std::to_string(t) + " outside grid [0, " +
                              std::to_string(end()) + "]");
    }
    const auto k = static_cast<std::size_t>(std::llround(t / step_));
    return k > cells_ ? cells_ : k;
}

} // namespace nuhawkes
