#pragma once

// Translation length and pleating length as functions of a trace value.

#include <cmath>
#include <complex>
#include <string>

#include "maskit/error.hpp"
#include "maskit/farey.hpp"

namespace maskit {

/// Complex translation length 2 arccosh(t / 2). Real and non-negative for real
/// t >= 2; the slit [-2, 2) of the real axis is rejected.
inline std::complex<double> translation_length(std::complex<double> t)
{
    if (t.imag() == 0.0 && t.real() >= -2.0 && t.real() < 2.0) {
        throw Error(ErrorKind::branch,
                    "translation length undefined on the slit [-2, 2): t = " + std::to_string(t.real()));
    }
    return 2.0 * std::acosh(t / 2.0);
}

/// 2 arccosh(1 + gap / 2) for gap = t - 2 >= 0, accurate as gap -> 0.
template <typename T>
T translation_length_from_gap(T gap)
{
    using std::log1p;
    using std::sqrt;
    return T(2) * log1p(gap / T(2) + sqrt(gap + gap * gap / T(4)));
}

/// Translation length of the slope's word divided by its intersection number
/// with 1/0, i.e. by q.
inline double pleating_length(const Slope& s, double t)
{
    if (s.is_infinity()) {
        throw Error(ErrorKind::domain, "slope 1/0 has no pleating length");
    }
    if (!(t > 2.0)) {
        throw Error(ErrorKind::domain, "pleating length needs t > 2, got " + std::to_string(t));
    }
    return translation_length_from_gap(t - 2.0) / static_cast<double>(s.q());
}

/// Inverse of pleating_length: t = 2 cosh(q l / 2).
inline double trace_for_length(const Slope& s, double length)
{
    if (s.is_infinity()) {
        throw Error(ErrorKind::domain, "slope 1/0 has no pleating length");
    }
    if (!(length > 0.0)) {
        throw Error(ErrorKind::domain, "pleating length must be positive");
    }
    return 2.0 * std::cosh(static_cast<double>(s.q()) * length / 2.0);
}

/// t - 2 for the trace at the given pleating length, without cancellation.
inline long double gap_for_length(const Slope& s, double length)
{
    const long double h = std::sinh(static_cast<long double>(s.q()) * length / 4.0L);
    return 4.0L * h * h;
}

} // namespace maskit
