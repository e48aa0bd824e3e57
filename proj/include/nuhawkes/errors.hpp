#pragma once

#include <stdexcept>
#include <string>

namespace nuhawkes {

/// Argument outside the mathematical domain of an operation (negative Laplace
/// argument, non-integrable kernel, division by a vanishing Bernstein value).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Query outside a tabulated or simulated horizon.
class OutOfRangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// Parameters that violate a documented precondition.
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Configuration (grid, particle counts, experiment keys) is inconsistent.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// The requested sampler cannot produce an exact sample for this input.
class UnsupportedSimulation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace nuhawkes
