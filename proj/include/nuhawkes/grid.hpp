#pragma once

#include <cstddef>
#include <vector>

namespace nuhawkes {

/// Uniform time grid on [0, T]: nodes t_k = k*h for k = 0..m with m = ceil(T/h).
/// The last node may overshoot T by less than one step.
class Grid {
public:
    Grid(double horizon, double step);

    [[nodiscard]] double horizon() const noexcept { return horizon_; }
    [[nodiscard]] double step() const noexcept { return step_; }
    [[nodiscard]] std::size_t cells() const noexcept { return cells_; }
    [[nodiscard]] std::size_t nodes() const noexcept { return cells_ + 1; }
    [[nodiscard]] double node(std::size_t k) const noexcept { return static_cast<double>(k) * step_; }
    [[nodiscard]] double midpoint(std::size_t k) const noexcept {
        return (static_cast<double>(k) + 0.5) * step_;
    }
    [[nodiscard]] double end() const noexcept { return node(cells_); }
    [[nodiscard]] std::vector<double> node_times() const;

    /// Index of the node closest to t; throws OutOfRangeError outside [0, end()].
    [[nodiscard]] std::size_t nearest_node(double t) const;

private:
    double horizon_;
    double step_;
    std::size_t cells_;
};

} // namespace nuhawkes
