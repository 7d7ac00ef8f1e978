#pragma once

#include <cmath>
#include <complex>
#include <ostream>

namespace maskit {

/// A point of the Riemann sphere. The point at infinity is an explicit flag,
/// never a large-magnitude sentinel.
template <typename T>
struct SpherePoint {
    std::complex<T> z{};
    bool at_infinity = false;

    static SpherePoint infinity() { return {{}, true}; }

    friend bool operator==(const SpherePoint&, const SpherePoint&) = default;
};

/// 2x2 complex matrix acting on the sphere by z -> (az + b) / (cz + d).
template <typename T>
struct Mobius {
    using complex_type = std::complex<T>;

    complex_type a{1}, b{0}, c{0}, d{1};

    static Mobius identity() { return {}; }

    complex_type det() const { return a * d - b * c; }
    complex_type trace() const { return a + d; }

    /// Inverse of a unimodular matrix (adjugate).
    Mobius inverse() const { return {d, -b, -c, a}; }

    /// Rescales to determinant one.
    Mobius normalized() const
    {
        const complex_type s = std::sqrt(det());
        return {a / s, b / s, c / s, d / s};
    }

    SpherePoint<T> apply(const SpherePoint<T>& w) const
    {
        complex_type num, den;
        if (w.at_infinity) {
            num = a;
            den = c;
        } else {
            num = a * w.z + b;
            den = c * w.z + d;
        }
        if (den == complex_type{}) {
            return SpherePoint<T>::infinity();
        }
        return {num / den, false};
    }

    complex_type apply(complex_type z) const { return (a * z + b) / (c * z + d); }

    template <typename U>
    Mobius<U> cast() const
    {
        return {std::complex<U>(a), std::complex<U>(b), std::complex<U>(c), std::complex<U>(d)};
    }

    friend Mobius operator*(const Mobius& x, const Mobius& y)
    {
        return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
                x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
    }

    friend std::ostream& operator<<(std::ostream& os, const Mobius& m)
    {
        return os << "[[" << m.a << ", " << m.b << "], [" << m.c << ", " << m.d << "]]";
    }
};

} // namespace maskit
