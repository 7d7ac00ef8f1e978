#pragma once

// Arbitrary-precision Gaussian integers and polynomials over them.

#include <complex>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace maskit {

using BigInt = boost::multiprecision::cpp_int;

struct GaussInt {
    BigInt re;
    BigInt im;

    GaussInt() = default;
    GaussInt(BigInt r, BigInt i = 0) : re(std::move(r)), im(std::move(i)) {}
    GaussInt(long long r, long long i = 0) : re(r), im(i) {}
    GaussInt(int r, int i = 0) : re(r), im(i) {}

    bool is_zero() const { return re.is_zero() && im.is_zero(); }

    GaussInt conj() const { return {re, -im}; }

    /// |z|^2, exact.
    BigInt norm() const { return re * re + im * im; }

    template <typename T>
    std::complex<T> to_complex() const
    {
        return {re.convert_to<T>(), im.convert_to<T>()};
    }

    GaussInt& operator+=(const GaussInt& o)
    {
        re += o.re;
        im += o.im;
        return *this;
    }
    GaussInt& operator-=(const GaussInt& o)
    {
        re -= o.re;
        im -= o.im;
        return *this;
    }

    friend GaussInt operator+(GaussInt x, const GaussInt& y) { return x += y; }
    friend GaussInt operator-(GaussInt x, const GaussInt& y) { return x -= y; }
    friend GaussInt operator-(const GaussInt& x) { return {-x.re, -x.im}; }
    friend GaussInt operator*(const GaussInt& x, const GaussInt& y)
    {
        return {x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re};
    }
    friend bool operator==(const GaussInt& x, const GaussInt& y) { return x.re == y.re && x.im == y.im; }
};

/// Polynomial in one variable with Gaussian-integer coefficients, constant
/// term first. Trailing zero coefficients are always trimmed.
class GaussPoly {
public:
    GaussPoly() = default;
    explicit GaussPoly(std::vector<GaussInt> coeffs) : c_(std::move(coeffs)) { trim(); }

    static GaussPoly constant(GaussInt v) { return GaussPoly({std::move(v)}); }
    static GaussPoly monomial(GaussInt v, std::size_t degree)
    {
        std::vector<GaussInt> c(degree + 1);
        c[degree] = std::move(v);
        return GaussPoly(std::move(c));
    }

    const std::vector<GaussInt>& coefficients() const { return c_; }
    bool is_zero() const { return c_.empty(); }

    /// Degree; -1 for the zero polynomial.
    int degree() const { return static_cast<int>(c_.size()) - 1; }

    const GaussInt& leading() const { return c_.back(); }

    GaussPoly derivative() const
    {
        std::vector<GaussInt> d;
        for (std::size_t k = 1; k < c_.size(); ++k) {
            d.push_back(c_[k] * GaussInt(static_cast<long long>(k)));
        }
        return GaussPoly(std::move(d));
    }

    /// P(x + shift), computed exactly by repeated synthetic division.
    GaussPoly shifted(const GaussInt& shift) const
    {
        std::vector<GaussInt> a = c_;
        const std::size_t n = a.size();
        for (std::size_t i = 0; i + 1 < n; ++i) {
            for (std::size_t k = n - 1; k > i; --k) {
                a[k - 1] += a[k] * shift;
            }
        }
        return GaussPoly(std::move(a));
    }

    /// Horner evaluation after converting coefficients to floating point.
    template <typename T>
    std::complex<T> evaluate(std::complex<T> x) const
    {
        std::complex<T> acc{};
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) {
            acc = acc * x + it->template to_complex<T>();
        }
        return acc;
    }

    GaussPoly& operator+=(const GaussPoly& o)
    {
        if (o.c_.size() > c_.size()) {
            c_.resize(o.c_.size());
        }
        for (std::size_t k = 0; k < o.c_.size(); ++k) {
            c_[k] += o.c_[k];
        }
        trim();
        return *this;
    }
    GaussPoly& operator-=(const GaussPoly& o)
    {
        if (o.c_.size() > c_.size()) {
            c_.resize(o.c_.size());
        }
        for (std::size_t k = 0; k < o.c_.size(); ++k) {
            c_[k] -= o.c_[k];
        }
        trim();
        return *this;
    }

    friend GaussPoly operator+(GaussPoly x, const GaussPoly& y) { return x += y; }
    friend GaussPoly operator-(GaussPoly x, const GaussPoly& y) { return x -= y; }
    friend GaussPoly operator*(const GaussPoly& x, const GaussPoly& y)
    {
        if (x.is_zero() || y.is_zero()) {
            return {};
        }
        std::vector<GaussInt> out(x.c_.size() + y.c_.size() - 1);
        for (std::size_t i = 0; i < x.c_.size(); ++i) {
            if (x.c_[i].is_zero()) {
                continue;
            }
            for (std::size_t j = 0; j < y.c_.size(); ++j) {
                out[i + j] += x.c_[i] * y.c_[j];
            }
        }
        return GaussPoly(std::move(out));
    }
    friend bool operator==(const GaussPoly& x, const GaussPoly& y) { return x.c_ == y.c_; }

private:
    void trim()
    {
        while (!c_.empty() && c_.back().is_zero()) {
            c_.pop_back();
        }
    }

    std::vector<GaussInt> c_;
};

} // namespace maskit
