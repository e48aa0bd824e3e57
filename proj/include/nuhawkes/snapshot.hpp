#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nuhawkes {

/// Weighted sample of (x, z) pairs at one time: particle values (N^(n)_i, M^(n)_i)
/// from a simulation, or (X_i, Z_i) draws from a limit law.
struct EmpiricalMeasureSnapshot {
    double time = 0.0;
    std::vector<double> xs;
    std::vector<double> zs;
    std::vector<double> weights;
    std::string source;

    [[nodiscard]] std::size_t size() const noexcept { return xs.size(); }
    [[nodiscard]] double total_weight() const noexcept;
    [[nodiscard]] double mean_x() const noexcept;
    [[nodiscard]] double mean_z() const noexcept;

    /// CSV rows: t,index,x,z,weight (header written when requested).
    void write_csv(std::ostream& out, bool header = true) const;
};

} // namespace nuhawkes
