#pragma once

// Cusp points and pleating rays. A pleating ray of slope p/q is traced as the
// branch of { mu : tr W_{p/q}(mu) = t, t real > 2 } that is asymptotic to the
// vertical line Re mu = 2p/q, by continuation in t from a large value down
// to the cusp where t = 2.

#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "maskit/error.hpp"
#include "maskit/farey.hpp"
#include "maskit/lengths.hpp"
#include "maskit/traces.hpp"

namespace maskit {

struct SolverOptions {
    double tol = 1e-10;          // root residual |tr - target|
    double realness_tol = 1e-9;  // |Im tr| on accepted ray samples
    double t_max = 1e6;
    double ratio = 0.8;          // geometric spacing of (t - 2) between samples
    double min_gap = 1e-6;       // smallest t - 2 sampled before the cusp
    int max_halvings = 20;
    int max_iter = 60;
};

struct NewtonResult {
    cplx mu;
    double residual = 0.0;
    int iterations = 0;
    cplx derivative;
};

struct CuspPoint {
    Slope slope;
    cplx mu;
    double residual = 0.0;
    int iterations = 0;
    cplx derivative;
    std::string method; // "newton" or "continuation"
};

struct RaySample {
    cplx mu;
    double t = 0.0;
    double length = 0.0;
    double residual = 0.0; // |tr W(mu) - t| at the stored mu
    cplx derivative;
};

struct PleatingRay {
    Slope slope;
    std::vector<RaySample> samples; // t strictly decreasing, all t > 2
    CuspPoint endpoint;
};

/// Continuation failure; carries the last sample that was accepted.
class ContinuationError : public Error {
public:
    ContinuationError(ErrorKind kind, const std::string& message, std::optional<RaySample> last_good)
        : Error(kind, message), last_good_(std::move(last_good)) {}

    const std::optional<RaySample>& last_good() const { return last_good_; }

private:
    std::optional<RaySample> last_good_;
};

namespace detail {

inline constexpr long double singular_threshold = 1e-14L;

inline long double asymptotic_height(const Slope& s)
{
    return 3.0L + 2.0L * std::sqrt(static_cast<long double>(s.q()));
}

/// Starting trace for continuation: large enough that the asymptotic seed
/// c + i t^(1/q) lies in the regime where tr ~ (-i(mu - c))^q.
inline long double start_trace(const Slope& s, long double t_max)
{
    return std::max(t_max, std::pow(asymptotic_height(s), static_cast<long double>(s.q())));
}

inline long double escape_radius(const Slope& s, long double t)
{
    const long double c = 2.0L * std::fabs(static_cast<long double>(s.p()) / static_cast<long double>(s.q()));
    return 10.0L + c + 1.5L * std::pow(std::max(t, 2.0L), 1.0L / static_cast<long double>(s.q()));
}

struct LdNewton {
    lcplx mu;
    long double residual = 0;
    int iterations = 0;
    lcplx derivative;
};

/// Newton on tr W_s(mu) = target in extended precision.
inline LdNewton newton_ld(const Slope& s, lcplx target, lcplx mu, long double tol, int max_iter,
                          long double escape)
{
    constexpr long double eps = std::numeric_limits<long double>::epsilon();
    for (int it = 0; it <= max_iter; ++it) {
        const auto jet = eval_trace_recursive(s, mu);
        const lcplx f = jet.value - target;
        const long double res = std::abs(f);
        // Residual floor set by rounding in the evaluation itself.
        const long double floor = 64 * eps * (std::abs(target) + std::abs(jet.derivative) * std::abs(mu));
        if (res <= tol || res <= floor) {
            // One polishing step; keep it only if it helps.
            if (std::abs(jet.derivative) >= singular_threshold) {
                const lcplx polished = mu - f / jet.derivative;
                const auto pj = eval_trace_recursive(s, polished);
                const long double pres = std::abs(pj.value - target);
                if (pres < res) {
                    return {polished, pres, it + 1, pj.derivative};
                }
            }
            return {mu, res, it, jet.derivative};
        }
        if (std::abs(jet.derivative) < singular_threshold) {
            throw Error(ErrorKind::singular, "trace derivative vanishes near mu = " + std::to_string(double(mu.real())) +
                                                 "+" + std::to_string(double(mu.imag())) + "i for slope " + s.str());
        }
        if (it == max_iter) {
            break;
        }
        mu -= f / jet.derivative;
        if (!std::isfinite(mu.real()) || !std::isfinite(mu.imag()) || std::abs(mu) > escape) {
            throw Error(ErrorKind::escaped, "Newton iterate escaped |mu| <= " + std::to_string(double(escape)) +
                                                " for slope " + s.str());
        }
    }
    throw Error(ErrorKind::no_convergence, "Newton did not converge within " + std::to_string(max_iter) +
                                               " iterations for slope " + s.str());
}

/// Follows the branch of tr W_s(mu) = 2 + gap as gap varies.
class RayTracker {
public:
    RayTracker(const Slope& s, const SolverOptions& opts) : s_(s), opts_(opts)
    {
        if (s.is_infinity()) {
            throw Error(ErrorKind::domain, "slope 1/0 has constant trace 2 and no pleating ray");
        }
    }

    /// Places the tracker on the branch at trace t_start from the asymptotic seed.
    void seed(long double t_start)
    {
        const long double q = static_cast<long double>(s_.q());
        const long double c = 2.0L * static_cast<long double>(s_.p()) / q;
        escape_ = escape_radius(s_, t_start);
        auto abs_tr = [&](long double y) { return std::abs(eval_trace_recursive(s_, lcplx(c, y)).value); };
        long double hi = std::pow(t_start, 1.0L / q);
        while (abs_tr(hi) < t_start) {
            hi *= 1.5L;
        }
        long double lo = hi;
        while (lo > 1e-3L && abs_tr(lo) >= t_start) {
            lo /= 1.5L;
        }
        for (int k = 0; k < 80; ++k) {
            const long double mid = 0.5L * (lo + hi);
            (abs_tr(mid) < t_start ? lo : hi) = mid;
        }
        const auto r = newton_ld(s_, lcplx(t_start), lcplx(c, hi), opts_.tol, opts_.max_iter, escape_);
        mu_ = r.mu;
        derivative_ = r.derivative;
        gap_ = t_start - 2.0L;
    }

    /// Moves along the branch to the given gap, halving the step on failure.
    void advance_to(long double gap_target)
    {
        long double h = gap_target - gap_;
        int failures = 0;
        while (gap_ != gap_target) {
            const long double next = std::fabs(h) >= std::fabs(gap_target - gap_) ? gap_target : gap_ + h;
            if (try_step(next)) {
                failures = 0;
                h *= 2.0L;
                continue;
            }
            if (++failures > opts_.max_halvings) {
                throw ContinuationError(ErrorKind::continuation,
                                        "continuation stalled for slope " + s_.str() + " at t = " +
                                            std::to_string(double(2.0L + gap_)),
                                        current_sample());
            }
            h = (next - gap_) / 2.0L;
        }
    }

    lcplx mu() const { return mu_; }
    long double gap() const { return gap_; }
    lcplx derivative() const { return derivative_; }

    RaySample current_sample() const
    {
        RaySample out;
        out.mu = cplx(static_cast<double>(mu_.real()), static_cast<double>(mu_.imag()));
        out.t = static_cast<double>(2.0L + gap_);
        out.length = static_cast<double>(translation_length_from_gap(gap_) / static_cast<long double>(s_.q()));
        const auto jet = eval_trace_recursive(s_, lcplx(out.mu));
        out.residual = static_cast<double>(std::abs(jet.value - (2.0L + gap_)));
        out.derivative = cplx(jet.derivative);
        return out;
    }

    /// Newton for the cusp tr = 2 from the current point.
    LdNewton refine_cusp() const
    {
        return newton_ld(s_, lcplx(2), mu_, opts_.tol, opts_.max_iter, escape_);
    }

private:
    bool try_step(long double next_gap)
    {
        if (std::abs(derivative_) < singular_threshold) {
            throw ContinuationError(ErrorKind::singular,
                                    "singular point on the ray of slope " + s_.str() +
                                        " (the traced branch should contain none)",
                                    current_sample());
        }
        const lcplx predicted = mu_ + (next_gap - gap_) / derivative_;
        const long double predictor_step = std::abs(predicted - mu_);
        LdNewton r;
        try {
            r = newton_ld(s_, lcplx(2.0L + next_gap), predicted, opts_.tol, 8, escape_);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::singular) {
                throw;
            }
            return false;
        }
        const long double correction = std::abs(r.mu - predicted);
        if (correction > 0.5L * predictor_step + 1e-12L * (1.0L + std::abs(mu_))) {
            return false;
        }
        mu_ = r.mu;
        derivative_ = r.derivative;
        gap_ = next_gap;
        return true;
    }

    Slope s_;
    SolverOptions opts_;
    lcplx mu_;
    lcplx derivative_;
    long double gap_ = 0;
    long double escape_ = 0;
};

inline CuspPoint make_cusp(const Slope& s, const LdNewton& r, std::string method)
{
    CuspPoint c;
    c.slope = s;
    c.mu = cplx(static_cast<double>(r.mu.real()), static_cast<double>(r.mu.imag()));
    const auto jet = eval_trace_recursive(s, lcplx(c.mu));
    c.residual = static_cast<double>(std::abs(jet.value - 2.0L));
    c.iterations = r.iterations;
    c.derivative = cplx(jet.derivative);
    c.method = std::move(method);
    return c;
}

} // namespace detail

/// Newton's method for tr W_s(mu) = target from mu0.
inline NewtonResult newton(const Slope& s, cplx target, cplx mu0, double tol = 1e-10, int max_iter = 60)
{
    if (!(tol > 0)) {
        throw Error(ErrorKind::domain, "Newton tolerance must be positive");
    }
    if (s.is_infinity()) {
        throw Error(ErrorKind::domain, "slope 1/0 has constant trace 2");
    }
    const auto r = detail::newton_ld(s, lcplx(target), lcplx(mu0), tol, max_iter,
                                     detail::escape_radius(s, std::abs(lcplx(target))));
    const cplx mu(static_cast<double>(r.mu.real()), static_cast<double>(r.mu.imag()));
    return {mu, static_cast<double>(std::abs(eval_trace_recursive(s, lcplx(mu)).value - lcplx(target))), r.iterations,
            cplx(r.derivative)};
}

/// Samples needed to go from t_max down to min_gap with the default ratio.
inline int default_ray_samples(const SolverOptions& opts)
{
    const double steps = std::log(opts.min_gap / (opts.t_max - 2.0)) / std::log(opts.ratio);
    return 2 + static_cast<int>(std::ceil(steps));
}

/// Traces the pleating ray of slope s. The ray has n_samples - 1 samples with
/// t - 2 geometric from t_max - 2 down to min_gap, plus the cusp endpoint.
inline PleatingRay trace_ray(const Slope& s, double t_max, int n_samples, double tol, SolverOptions opts = {})
{
    if (!(t_max > 2.0)) {
        throw Error(ErrorKind::domain, "t_max must exceed 2");
    }
    if (n_samples < 2) {
        throw Error(ErrorKind::domain, "a ray needs at least 2 samples");
    }
    opts.tol = tol;
    opts.t_max = t_max;
    detail::RayTracker tracker(s, opts);
    tracker.seed(detail::start_trace(s, t_max));

    const long double top_gap = static_cast<long double>(t_max) - 2.0L;
    const long double min_gap = std::min<long double>(opts.min_gap, top_gap);
    const long double ratio =
        n_samples > 2 ? std::pow(min_gap / top_gap, 1.0L / static_cast<long double>(n_samples - 2)) : 1.0L;

    PleatingRay ray;
    ray.slope = s;
    ray.samples.reserve(static_cast<std::size_t>(n_samples - 1));
    long double gap = top_gap;
    for (int k = 0; k + 1 < n_samples; ++k) {
        if (k + 2 == n_samples && n_samples > 2) {
            gap = min_gap;
        }
        tracker.advance_to(gap);
        ray.samples.push_back(tracker.current_sample());
        gap *= ratio;
    }
    detail::LdNewton end;
    try {
        end = tracker.refine_cusp();
    } catch (const Error& e) {
        throw ContinuationError(e.kind(), std::string("cusp refinement failed: ") + e.what(), ray.samples.back());
    }
    ray.endpoint = detail::make_cusp(s, end, "continuation");
    return ray;
}

inline PleatingRay trace_ray(const Slope& s, const SolverOptions& opts = {})
{
    return trace_ray(s, opts.t_max, default_ray_samples(opts), opts.tol, opts);
}

/// The point of the ray with tr W_s = 2 + gap (gap > 0).
inline cplx ray_point_at_gap(const Slope& s, long double gap, const SolverOptions& opts = {})
{
    if (!(gap > 0)) {
        throw Error(ErrorKind::domain, "ray points need t > 2");
    }
    detail::RayTracker tracker(s, opts);
    const long double t = 2.0L + gap;
    tracker.seed(std::max(detail::start_trace(s, opts.t_max), t));
    const long double floor_gap = 1e-12L;
    if (gap >= floor_gap) {
        tracker.advance_to(gap);
        const lcplx mu = tracker.mu();
        return {static_cast<double>(mu.real()), static_cast<double>(mu.imag())};
    }
    // Below the floor, linearize at the cusp: mu = cusp + gap / tr'(cusp).
    tracker.advance_to(floor_gap);
    const auto cusp = tracker.refine_cusp();
    const lcplx mu = cusp.mu + gap / cusp.derivative;
    return {static_cast<double>(mu.real()), static_cast<double>(mu.imag())};
}

inline cplx ray_point_at_trace(const Slope& s, double t, double tol = 1e-10, SolverOptions opts = {})
{
    if (!(t > 2.0)) {
        throw Error(ErrorKind::domain, "ray points need t > 2");
    }
    opts.tol = tol;
    return ray_point_at_gap(s, static_cast<long double>(t) - 2.0L, opts);
}

/// Cusp finder with memoized parent cusps; safe to share between threads.
class CuspSolver {
public:
    explicit CuspSolver(SolverOptions opts = {}) : opts_(opts) {}

    const SolverOptions& options() const { return opts_; }

    CuspPoint find(const Slope& s)
    {
        if (s.is_infinity()) {
            throw Error(ErrorKind::domain, "slope ∞ has constant trace 2; no cusp");
        }
        {
            std::lock_guard lock(mutex_);
            if (auto it = memo_.find(s); it != memo_.end()) {
                return it->second;
            }
        }
        CuspPoint c = solve(s);
        std::lock_guard lock(mutex_);
        return memo_.emplace(s, std::move(c)).first->second;
    }

    /// Seed for Newton: midpoint of the parent cusps; a parent at ∞ is
    /// replaced by the other parent's cusp shifted by the twist 2.
    cplx seed(const Slope& s)
    {
        if (s.p() == 0) {
            return {0.0, 2.0};
        }
        const auto [l, r] = farey_parents(s);
        if (l.is_infinity()) {
            return find(r).mu - 2.0;
        }
        if (r.is_infinity()) {
            return find(l).mu + 2.0;
        }
        return 0.5 * (find(l).mu + find(r).mu);
    }

private:
    bool acceptable(const Slope& s, const CuspPoint& c) const
    {
        const double center = 2.0 * static_cast<double>(s.p()) / static_cast<double>(s.q());
        // Allow for rounding mu to double precision.
        const double rounding = 4 * std::numeric_limits<double>::epsilon() * std::abs(c.mu) * std::abs(c.derivative);
        return c.residual <= 10 * opts_.tol + rounding && c.mu.imag() > 0 &&
               std::abs(c.mu.real() - center) <= 1.0 && std::abs(c.derivative) >= detail::singular_threshold;
    }

    CuspPoint solve(const Slope& s)
    {
        std::string diagnostics;
        try {
            const cplx start = seed(s);
            const auto r = detail::newton_ld(s, lcplx(2), lcplx(start), opts_.tol, opts_.max_iter,
                                             detail::escape_radius(s, 2.0L));
            CuspPoint c = detail::make_cusp(s, r, "newton");
            if (acceptable(s, c)) {
                return c;
            }
            std::ostringstream os;
            os << "Newton from parent midpoint landed outside the expected region at " << c.mu;
            diagnostics = os.str();
        } catch (const Error& e) {
            diagnostics = std::string("Newton from parent midpoint failed: ") + e.what();
        }
        try {
            CuspPoint c = trace_ray(s, opts_).endpoint;
            if (acceptable(s, c)) {
                return c;
            }
            std::ostringstream os;
            os << "; continuation endpoint rejected at " << c.mu;
            diagnostics += os.str();
        } catch (const Error& e) {
            diagnostics += std::string("; continuation failed: ") + e.what();
        }
        throw Error(ErrorKind::cusp_not_found, "no cusp found for slope " + s.str() + ": " + diagnostics);
    }

    SolverOptions opts_;
    std::mutex mutex_;
    std::map<Slope, CuspPoint> memo_;
};

inline CuspPoint find_cusp(const Slope& s, double tol = 1e-10)
{
    SolverOptions opts;
    opts.tol = tol;
    CuspSolver solver(opts);
    return solver.find(s);
}

// ---------------------------------------------------------------------------
// Export

/// Fixed 9-significant-digit rendering used by every text output.
inline std::string format_number(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x == 0.0 ? 0.0 : x);
    return buf;
}

/// Rounds to 9 significant digits so JSON output is stable across platforms.
inline double round9(double x) { return std::strtod(format_number(x).c_str(), nullptr); }

inline std::string format_full(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline nlohmann::json to_json(const CuspPoint& c)
{
    return {{"slope", c.slope.str()},
            {"mu", {round9(c.mu.real()), round9(c.mu.imag())}},
            {"mu_full", {format_full(c.mu.real()), format_full(c.mu.imag())}},
            {"residual", round9(c.residual)},
            {"iterations", c.iterations},
            {"method", c.method}};
}

inline void write_ray_csv(std::ostream& os, const PleatingRay& ray)
{
    os << "slope,t,Re(mu),Im(mu),pleating_length,residual\n";
    for (const auto& s : ray.samples) {
        os << ray.slope.str() << ',' << format_number(s.t) << ',' << format_number(s.mu.real()) << ','
           << format_number(s.mu.imag()) << ',' << format_number(s.length) << ',' << format_number(s.residual)
           << '\n';
    }
    const auto& e = ray.endpoint;
    os << ray.slope.str() << ',' << format_number(2.0) << ',' << format_number(e.mu.real()) << ','
       << format_number(e.mu.imag()) << ',' << format_number(0.0) << ',' << format_number(e.residual) << '\n';
}

} // namespace maskit
