#pragma once

// The marked groups G_mu of the Maskit slice and the trace polynomials of the
// words W_{p/q}, built by walking the Stern–Brocot tree.
//
// Normalization: A = [[-i mu, -i], [-i, 0]], B = [[1, 2], [0, 1]].
// Words: W_{0/1} = A, W_{1/0} = B^-1 (B on the negative side), and
// W_{mediant(l, r)} = W_l W_r.

#include <complex>
#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "maskit/error.hpp"
#include "maskit/farey.hpp"
#include "maskit/gaussian.hpp"
#include "maskit/mobius.hpp"

namespace maskit {

using cplx = std::complex<double>;
using lcplx = std::complex<long double>;

struct GroupMarking {
    cplx mu;
    Mobius<double> A;
    Mobius<double> B;
};

template <typename T>
Mobius<T> generator_A(std::complex<T> mu)
{
    const std::complex<T> i{0, 1};
    return {-i * mu, -i, -i, std::complex<T>{0}};
}

template <typename T>
Mobius<T> generator_B()
{
    return {std::complex<T>{1}, std::complex<T>{2}, std::complex<T>{0}, std::complex<T>{1}};
}

inline GroupMarking generators(cplx mu) { return {mu, generator_A(mu), generator_B<double>()}; }

// ---------------------------------------------------------------------------
// Stern–Brocot walk

/// Walks from the root interval down to `s`, combining values attached to the
/// current interval (left, right) and to the "difference" W_left W_right^-1.
/// combine(left, right, diff) must return the value for the mediant.
template <typename V, typename Combine>
V farey_walk(const Slope& s, V left, V right, V diff, Combine&& combine)
{
    // Positive side starts from (0/1, 1/0); negative side from (-1/0, 0/1).
    std::int64_t lp = 0, lq = 1, rp = 1, rq = 0;
    if (s.p() < 0) {
        lp = -1;
        lq = 0;
        rp = 0;
        rq = 1;
    }
    const __int128 sp = s.p(), sq = s.q();
    for (;;) {
        const std::int64_t mp = lp + rp;
        const std::int64_t mq = lq + rq;
        V mid = combine(left, right, diff);
        if (mp == s.p() && mq == s.q()) {
            return mid;
        }
        // Compare s against the mediant: s < m  <=>  sp*mq < mp*sq.
        if (sp * mq < static_cast<__int128>(mp) * sq) {
            diff = std::move(right);
            right = std::move(mid);
            rp = mp;
            rq = mq;
        } else {
            diff = std::move(left);
            left = std::move(mid);
            lp = mp;
            lq = mq;
        }
    }
}

// ---------------------------------------------------------------------------
// Words

enum class Letter : std::uint8_t { A, B, A_inv, B_inv };

using Word = std::vector<Letter>;

inline Letter inverse(Letter x)
{
    switch (x) {
    case Letter::A: return Letter::A_inv;
    case Letter::B: return Letter::B_inv;
    case Letter::A_inv: return Letter::A;
    case Letter::B_inv: return Letter::B;
    }
    return x;
}

inline std::string to_string(const Word& w)
{
    std::string out;
    for (Letter x : w) {
        if (!out.empty()) {
            out += ' ';
        }
        switch (x) {
        case Letter::A: out += "A"; break;
        case Letter::B: out += "B"; break;
        case Letter::A_inv: out += "A⁻¹"; break;
        case Letter::B_inv: out += "B⁻¹"; break;
        }
    }
    return out;
}

inline Word word_for_slope(const Slope& s)
{
    if (s == Slope(0, 1)) {
        return {Letter::A};
    }
    if (s.is_infinity()) {
        return {Letter::B_inv};
    }
    const Word a{Letter::A};
    const Word inf{s.p() < 0 ? Letter::B : Letter::B_inv};
    auto concat = [](const Word& l, const Word& r, const Word&) {
        Word w = l;
        w.insert(w.end(), r.begin(), r.end());
        return w;
    };
    return s.p() < 0 ? farey_walk(s, inf, a, Word{}, concat) : farey_walk(s, a, inf, Word{}, concat);
}

template <typename T>
Mobius<T> word_matrix(const Word& w, std::complex<T> mu)
{
    const Mobius<T> A = generator_A(mu);
    const Mobius<T> B = generator_B<T>();
    Mobius<T> m;
    for (Letter x : w) {
        switch (x) {
        case Letter::A: m = m * A; break;
        case Letter::B: m = m * B; break;
        case Letter::A_inv: m = m * A.inverse(); break;
        case Letter::B_inv: m = m * B.inverse(); break;
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// Trace evaluation

/// A trace value together with its derivative in mu.
template <typename T>
struct TraceJet {
    std::complex<T> value{};
    std::complex<T> derivative{};

    friend TraceJet operator*(const TraceJet& x, const TraceJet& y)
    {
        return {x.value * y.value, x.derivative * y.value + x.value * y.derivative};
    }
    friend TraceJet operator-(const TraceJet& x, const TraceJet& y)
    {
        return {x.value - y.value, x.derivative - y.derivative};
    }
};

/// tr W_s(mu) and its derivative by the recursion
/// tr W_m = tr W_l tr W_r - tr(W_l W_r^-1), one step per Stern–Brocot level.
template <typename T>
TraceJet<T> eval_trace_recursive(const Slope& s, std::complex<T> mu)
{
    using C = std::complex<T>;
    const C i{0, 1};
    const TraceJet<T> tr_a{-i * mu, -i};
    const TraceJet<T> tr_inf{C{2}, C{0}};
    if (s.is_infinity()) {
        return tr_inf;
    }
    if (s.p() == 0) {
        return tr_a;
    }
    auto step = [](const TraceJet<T>& l, const TraceJet<T>& r, const TraceJet<T>& d) { return l * r - d; };
    if (s.p() < 0) {
        // tr(B A^-1) = tr(A B^-1) = -i(mu - 2)
        const TraceJet<T> diff{-i * (mu - T(2)), -i};
        return farey_walk(s, tr_inf, tr_a, diff, step);
    }
    // tr(A B) = -i(mu + 2)
    const TraceJet<T> diff{-i * (mu + T(2)), -i};
    return farey_walk(s, tr_a, tr_inf, diff, step);
}

struct TracePolynomial {
    Slope slope;
    GaussPoly poly;

    int degree() const { return poly.degree(); }
};

/// Default ceiling on q for exact coefficient computation.
inline constexpr std::int64_t default_max_exact_q = 64;

inline TracePolynomial trace_polynomial(const Slope& s, std::int64_t max_exact_q = default_max_exact_q)
{
    if (s.q() > max_exact_q) {
        throw Error(ErrorKind::resource_cap,
                    "exact trace polynomial for " + s.str() + " exceeds max q = " + std::to_string(max_exact_q));
    }
    // mu is the indeterminate; tr A = -i mu.
    const GaussPoly tr_a({GaussInt(0), GaussInt(0, -1)});
    const GaussPoly tr_inf = GaussPoly::constant(GaussInt(2));
    if (s.is_infinity()) {
        return {s, tr_inf};
    }
    if (s.p() == 0) {
        return {s, tr_a};
    }
    auto step = [](const GaussPoly& l, const GaussPoly& r, const GaussPoly& d) { return l * r - d; };
    if (s.p() < 0) {
        const GaussPoly diff({GaussInt(0, 2), GaussInt(0, -1)}); // -i(mu - 2)
        return {s, farey_walk(s, tr_inf, tr_a, diff, step)};
    }
    const GaussPoly diff({GaussInt(0, -2), GaussInt(0, -1)}); // -i(mu + 2)
    return {s, farey_walk(s, tr_a, tr_inf, diff, step)};
}

/// Memoized exact trace polynomials; safe to share between threads.
class TraceCache {
public:
    explicit TraceCache(std::int64_t max_exact_q = default_max_exact_q) : max_exact_q_(max_exact_q) {}

    std::int64_t max_exact_q() const { return max_exact_q_; }

    const TracePolynomial& get(const Slope& s)
    {
        {
            std::lock_guard lock(mutex_);
            if (auto it = cache_.find(s); it != cache_.end()) {
                return it->second;
            }
        }
        TracePolynomial tp = trace_polynomial(s, max_exact_q_);
        std::lock_guard lock(mutex_);
        return cache_.emplace(s, std::move(tp)).first->second;
    }

private:
    std::int64_t max_exact_q_;
    std::mutex mutex_;
    std::map<Slope, TracePolynomial> cache_;
};

enum class EvalMode { recursion, exact_polynomial };

/// Value and derivative of tr W_s at mu. Exact mode evaluates the cached
/// polynomial and its formal derivative; recursion mode propagates value and
/// derivative pairs through the trace identity.
template <typename T = double>
TraceJet<T> eval_trace(const Slope& s, std::complex<T> mu, EvalMode mode = EvalMode::recursion,
                       TraceCache* cache = nullptr)
{
    if (mode == EvalMode::recursion) {
        return eval_trace_recursive(s, mu);
    }
    TracePolynomial local;
    const TracePolynomial* tp = nullptr;
    if (cache != nullptr) {
        tp = &cache->get(s);
    } else {
        local = trace_polynomial(s);
        tp = &local;
    }
    return {tp->poly.evaluate(mu), tp->poly.derivative().evaluate(mu)};
}

inline cplx commutator_trace(cplx mu)
{
    const auto g = generators(mu);
    return (g.A * g.B * g.A.inverse() * g.B.inverse()).trace();
}

inline nlohmann::json to_json(const TracePolynomial& tp)
{
    nlohmann::json coeffs = nlohmann::json::array();
    for (const auto& c : tp.poly.coefficients()) {
        coeffs.push_back({c.re.str(), c.im.str()});
    }
    return {{"slope", tp.slope.str()}, {"coeffs", coeffs}};
}

} // namespace maskit
