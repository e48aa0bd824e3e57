#pragma once

#include <cmath>
#include <complex>

namespace nuhawkes::detail {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// e^w - 1 without cancellation for small |w|.
inline std::complex<double> complex_expm1(std::complex<double> w) {
    const double half_sin = std::sin(0.5 * w.imag());
    const double re = std::expm1(w.real()) * std::cos(w.imag()) - 2.0 * half_sin * half_sin;
    return {re, std::exp(w.real()) * std::sin(w.imag())};
}

} // namespace nuhawkes::detail
