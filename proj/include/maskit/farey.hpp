#pragma once

// Slopes p/q in Q ∪ {∞}, Stern–Brocot ancestry and continued fractions.
// Everything here is exact integer arithmetic.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "maskit/error.hpp"

namespace maskit {

/// A canonical slope p/q: gcd(|p|, q) = 1, q >= 0, and 1/0 is the unique
/// representative of ∞.
class Slope {
public:
    constexpr Slope() = default;

    Slope(std::int64_t p, std::int64_t q)
    {
        if (p == 0 && q == 0) {
            throw Error(ErrorKind::domain, "0/0 is not a slope");
        }
        if (q < 0) {
            p = -p;
            q = -q;
        }
        if (q == 0) {
            p = 1;
        }
        const std::int64_t g = std::gcd(p < 0 ? -p : p, q);
        p_ = p / g;
        q_ = q / g;
    }

    static Slope infinity() { return Slope(1, 0); }

    constexpr std::int64_t p() const noexcept { return p_; }
    constexpr std::int64_t q() const noexcept { return q_; }
    constexpr bool is_infinity() const noexcept { return q_ == 0; }
    constexpr bool is_integer() const noexcept { return q_ == 1; }

    double value() const noexcept
    {
        return is_infinity() ? INFINITY : static_cast<double>(p_) / static_cast<double>(q_);
    }

    friend constexpr bool operator==(const Slope&, const Slope&) = default;

    /// Orders by value, with 1/0 treated as +∞.
    friend std::strong_ordering operator<=>(const Slope& a, const Slope& b) noexcept
    {
        if (a.is_infinity() || b.is_infinity()) {
            return a.is_infinity() <=> b.is_infinity();
        }
        const __int128 lhs = static_cast<__int128>(a.p_) * b.q_;
        const __int128 rhs = static_cast<__int128>(b.p_) * a.q_;
        return lhs <=> rhs;
    }

    std::string str() const { return std::to_string(p_) + "/" + std::to_string(q_); }

    friend std::ostream& operator<<(std::ostream& os, const Slope& s) { return os << s.str(); }

private:
    std::int64_t p_ = 0;
    std::int64_t q_ = 1;
};

struct SlopeHash {
    std::size_t operator()(const Slope& s) const noexcept
    {
        return std::hash<std::int64_t>{}(s.p()) * 1000003u ^ std::hash<std::int64_t>{}(s.q());
    }
};

/// Parses "p/q" or a bare integer "p".
inline Slope parse_slope(std::string_view text)
{
    auto parse_int = [&](std::string_view part) {
        if (part.empty()) {
            throw Error(ErrorKind::parse, "malformed slope '" + std::string(text) + "'");
        }
        std::size_t i = 0;
        bool negative = false;
        if (part[0] == '+' || part[0] == '-') {
            negative = part[0] == '-';
            i = 1;
        }
        if (i == part.size()) {
            throw Error(ErrorKind::parse, "malformed slope '" + std::string(text) + "'");
        }
        std::int64_t v = 0;
        for (; i < part.size(); ++i) {
            const char c = part[i];
            if (c < '0' || c > '9' || v > (INT64_MAX - 9) / 10) {
                throw Error(ErrorKind::parse, "malformed slope '" + std::string(text) + "'");
            }
            v = v * 10 + (c - '0');
        }
        return negative ? -v : v;
    };
    const auto slash = text.find('/');
    const std::int64_t p = parse_int(text.substr(0, slash));
    const std::int64_t q = slash == std::string_view::npos ? 1 : parse_int(text.substr(slash + 1));
    if (q < 0) {
        throw Error(ErrorKind::parse, "slope denominator must be non-negative: '" + std::string(text) + "'");
    }
    try {
        return Slope(p, q);
    } catch (const Error& e) {
        throw Error(ErrorKind::parse, e.what());
    }
}

inline Slope mediant(const Slope& l, const Slope& r) { return Slope(l.p() + r.p(), l.q() + r.q()); }

/// Geometric intersection number |p q' - q p'| of the two simple closed curves.
inline std::int64_t intersection_number(const Slope& s, const Slope& t)
{
    const std::int64_t d = s.p() * t.q() - s.q() * t.p();
    return d < 0 ? -d : d;
}

namespace detail {

// x with a*x ≡ 1 (mod m), returned in [1, m].
inline std::int64_t mod_inverse(std::int64_t a, std::int64_t m)
{
    std::int64_t old_r = a % m, r = m;
    std::int64_t old_s = 1, s = 0;
    while (r != 0) {
        const std::int64_t quot = old_r / r;
        std::tie(old_r, r) = std::make_pair(r, old_r - quot * r);
        std::tie(old_s, s) = std::make_pair(s, old_s - quot * s);
    }
    std::int64_t x = old_s % m;
    if (x <= 0) {
        x += m;
    }
    return x;
}

} // namespace detail

/// Stern–Brocot parents (l, r) of s, so that s = mediant(l, r) and the two
/// parents are Farey neighbours. Negative slopes use the reflected tree; there
/// the left parent may be 1/0, standing for -∞.
inline std::pair<Slope, Slope> farey_parents(const Slope& s)
{
    if (s.is_infinity() || s.p() == 0) {
        throw Error(ErrorKind::no_parents, "slope " + s.str() + " is a root of the Stern-Brocot tree and has no parents");
    }
    if (s.p() < 0) {
        const auto [l, r] = farey_parents(Slope(-s.p(), s.q()));
        return {Slope(-r.p(), r.q()), Slope(-l.p(), l.q())};
    }
    const std::int64_t p = s.p();
    const std::int64_t q = s.q();
    // Left parent a/b solves p*b - q*a = 1 with 0 < b <= q.
    const std::int64_t b = q == 1 ? 1 : detail::mod_inverse(p % q, q);
    const std::int64_t a = (p * b - 1) / q;
    return {Slope(a, b), Slope(p - a, q - b)};
}

/// Partial quotients [a0; a1, ..., an] with a1..an >= 1 and an >= 2 when n > 0.
struct ContinuedFraction {
    std::vector<std::int64_t> quotients;

    friend bool operator==(const ContinuedFraction&, const ContinuedFraction&) = default;
};

inline ContinuedFraction continued_fraction(const Slope& s)
{
    if (s.is_infinity()) {
        throw Error(ErrorKind::domain, "1/0 has no continued fraction expansion");
    }
    ContinuedFraction cf;
    std::int64_t num = s.p();
    std::int64_t den = s.q();
    while (den != 0) {
        std::int64_t a = num / den;
        if (num % den != 0 && (num < 0) != (den < 0)) {
            --a; // floor division
        }
        cf.quotients.push_back(a);
        const std::int64_t rem = num - a * den;
        num = den;
        den = rem;
    }
    return cf;
}

inline std::vector<Slope> convergents(const ContinuedFraction& cf)
{
    std::vector<Slope> out;
    std::int64_t h_prev = 1, h = cf.quotients.empty() ? 0 : cf.quotients.front();
    std::int64_t k_prev = 0, k = 1;
    if (cf.quotients.empty()) {
        return out;
    }
    out.emplace_back(h, k);
    for (std::size_t i = 1; i < cf.quotients.size(); ++i) {
        const std::int64_t a = cf.quotients[i];
        std::tie(h_prev, h) = std::make_pair(h, a * h + h_prev);
        std::tie(k_prev, k) = std::make_pair(k, a * k + k_prev);
        out.emplace_back(h, k);
    }
    return out;
}

/// Continued-fraction convergents of a real number, up to `depth` terms. Stops
/// early if the expansion terminates (the input was exactly rational).
inline std::vector<Slope> convergents(double x, int depth)
{
    if (depth <= 0) {
        throw Error(ErrorKind::domain, "convergent depth must be positive");
    }
    if (!std::isfinite(x)) {
        throw Error(ErrorKind::domain, "cannot expand a non-finite real");
    }
    ContinuedFraction cf;
    long double rest = x;
    for (int i = 0; i < depth; ++i) {
        const long double a = std::floor(rest);
        if (std::fabs(a) > 1e15L) {
            break;
        }
        cf.quotients.push_back(static_cast<std::int64_t>(a));
        const long double frac = rest - a;
        if (frac == 0.0L) {
            break;
        }
        rest = 1.0L / frac;
    }
    return convergents(cf);
}

/// All canonical slopes p/q with 1 <= q <= q_max and lo <= p/q <= hi, increasing.
inline std::vector<Slope> enumerate_slopes(int q_max, double lo, double hi)
{
    if (q_max < 1) {
        throw Error(ErrorKind::domain, "q_max must be at least 1");
    }
    if (!(lo <= hi)) {
        throw Error(ErrorKind::domain, "empty slope range");
    }
    std::vector<Slope> out;
    for (std::int64_t q = 1; q <= q_max; ++q) {
        const auto p_lo = static_cast<std::int64_t>(std::ceil(lo * static_cast<double>(q) - 1e-9));
        const auto p_hi = static_cast<std::int64_t>(std::floor(hi * static_cast<double>(q) + 1e-9));
        for (std::int64_t p = p_lo; p <= p_hi; ++p) {
            if (std::gcd(p < 0 ? -p : p, q) != 1) {
                continue;
            }
            const double v = static_cast<double>(p) / static_cast<double>(q);
            if (v < lo - 1e-12 || v > hi + 1e-12) {
                continue;
            }
            out.emplace_back(p, q);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace maskit
