#pragma once

// Pleating coordinates: the L functions, the (lambda, length) <-> mu maps and
// assembly of the coordinate grid.

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "maskit/error.hpp"
#include "maskit/farey.hpp"
#include "maskit/lengths.hpp"
#include "maskit/parallel.hpp"
#include "maskit/solver.hpp"
#include "maskit/traces.hpp"

namespace maskit {

struct PleatingCoordinates {
    double lambda = 0.0;
    double length = 0.0;
};

namespace detail {

/// The value of arccosh(w) (any branch: ±a + 2πik) closest to ref.
inline lcplx nearest_arccosh(lcplx w, lcplx ref)
{
    constexpr long double two_pi = 2.0L * std::numbers::pi_v<long double>;
    const lcplx a = std::acosh(w);
    lcplx best = a;
    long double best_dist = std::numeric_limits<long double>::infinity();
    for (const long double sign : {1.0L, -1.0L}) {
        lcplx v = sign * a;
        v += lcplx(0, two_pi * std::round((ref.imag() - v.imag()) / two_pi));
        if (const long double d = std::abs(v - ref); d < best_dist) {
            best_dist = d;
            best = v;
        }
    }
    return best;
}

/// Step budget for one continuation segment. F grows like q log|mu|, so
/// the number of steps needed scales with q.
inline int arccosh_step_budget(const Slope& s) { return 4000 + 40 * static_cast<int>(std::min<std::int64_t>(s.q(), 100000)); }

/// Continues F = arccosh(tr W_s / 2) along the segment from z0 to z1,
/// starting from the value f0 at z0.
inline lcplx continue_arccosh(const Slope& s, lcplx z0, lcplx z1, lcplx f0, int* steps_used = nullptr)
{
    int steps = 0;
    lcplx f = f0;
    long double at = 0.0L;
    long double ds = 1.0L / 16.0L;
    const lcplx dz = z1 - z0;
    if (std::abs(dz) == 0.0L) {
        return f;
    }
    while (at < 1.0L) {
        if (++steps > arccosh_step_budget(s)) {
            std::ostringstream os;
            os << "arccosh branch continuation for slope " << s.str() << " exceeded " << arccosh_step_budget(s)
               << " steps near mu = " << cplx(z0 + at * dz) << " (trace close to +-2)";
            throw Error(ErrorKind::branch, os.str());
        }
        const long double next = std::min(1.0L, at + ds);
        const lcplx z_prev = z0 + at * dz;
        const lcplx z = z0 + next * dz;
        const auto prev_jet = eval_trace_recursive(s, z_prev);
        // dF/dz = (tr'/2) / sinh F
        const lcplx sinh_f = std::sinh(f);
        const lcplx predicted =
            std::abs(sinh_f) > 1e-300L ? f + (prev_jet.derivative / 2.0L) / sinh_f * (z - z_prev) : f;
        const lcplx candidate = nearest_arccosh(eval_trace_recursive(s, z).value / 2.0L, predicted);
        const long double jump = std::abs(candidate - f);
        // Steps stay well below the 2πi spacing of the branches.
        if (jump <= 2.0L && std::abs(candidate - predicted) <= 0.2L + 0.2L * std::abs(predicted - f)) {
            f = candidate;
            at = next;
            ds = std::min(ds * 2.0L, 0.25L);
            continue;
        }
        ds /= 2.0L;
        if (ds < 1e-14L) {
            std::ostringstream os;
            os << "arccosh branch cannot be continued past mu = " << cplx(z) << " for slope " << s.str()
               << " (trace passes through +-2)";
            throw Error(ErrorKind::branch, os.str());
        }
    }
    if (steps_used) {
        *steps_used += steps;
    }
    return f;
}

} // namespace detail

/// L_{p/q}(mu) = 2 arccosh(tr W_{p/q}(mu) / 2) / q on the branch that is
/// real and positive far up the ray. The branch is continued from
/// 2p/q + iY (Y above the asymptotic regime) horizontally to Re mu, then
/// straight down to mu.
inline cplx L_function(const Slope& s, cplx mu)
{
    if (s.is_infinity()) {
        throw Error(ErrorKind::domain, "slope 1/0 has constant trace 2; L is undefined");
    }
    const long double q = static_cast<long double>(s.q());
    const long double c = 2.0L * static_cast<long double>(s.p()) / q;
    const long double height = std::max<long double>(mu.imag(), detail::asymptotic_height(s));
    const lcplx top(c, height);
    const lcplx corner(mu.real(), height);
    const lcplx t0 = eval_trace_recursive(s, top).value;
    // Far up, arccosh(t/2) ~ log t ~ q log(height).
    const lcplx f0 = detail::nearest_arccosh(t0 / 2.0L, lcplx(q * std::log(height), 0));
    lcplx f = detail::continue_arccosh(s, top, corner, f0);
    f = detail::continue_arccosh(s, corner, lcplx(mu), f);
    const lcplx l = 2.0L * f / q;
    return {static_cast<double>(l.real()), static_cast<double>(l.imag())};
}

struct LambdaReport {
    cplx value;
    std::vector<Slope> convergents;
    std::vector<cplx> values;
    std::vector<double> differences; // |L_{n+1} - L_n|
    bool eventually_decreasing = false;
    double final_difference = 0.0;
};

/// True when the differences decrease strictly over their last half.
inline bool eventually_decreasing(const std::vector<double>& d)
{
    if (d.size() < 2) {
        return false;
    }
    const std::size_t from = d.size() / 2;
    for (std::size_t k = std::max<std::size_t>(from, 1); k < d.size(); ++k) {
        if (!(d[k] < d[k - 1])) {
            return false;
        }
    }
    return true;
}

/// L_lambda(mu) approximated at the first `depth` continued-fraction
/// convergents of lambda. Slow convergence is reported, not thrown.
inline LambdaReport L_irrational(double lambda, cplx mu, int depth)
{
    if (depth < 2) {
        throw Error(ErrorKind::domain, "convergent depth must be at least 2");
    }
    LambdaReport r;
    r.convergents = convergents(lambda, depth);
    for (const Slope& s : r.convergents) {
        r.values.push_back(L_function(s, mu));
        if (r.values.size() > 1) {
            r.differences.push_back(std::abs(r.values.back() - r.values[r.values.size() - 2]));
        }
    }
    r.value = r.values.back();
    r.eventually_decreasing = eventually_decreasing(r.differences);
    r.final_difference = r.differences.empty() ? 0.0 : r.differences.back();
    return r;
}

/// lambda as a slope if it is within tol of a rational with q <= max_q.
inline std::optional<Slope> rational_slope(double lambda, std::int64_t max_q = 1000, double tol = 1e-12)
{
    if (!std::isfinite(lambda)) {
        throw Error(ErrorKind::domain, "lambda must be finite");
    }
    for (const Slope& s : convergents(lambda, 64)) {
        if (s.q() > max_q) {
            break;
        }
        const double value = static_cast<double>(s.p()) / static_cast<double>(s.q());
        if (std::abs(value - lambda) <= tol * std::max(1.0, std::abs(lambda))) {
            return s;
        }
    }
    return std::nullopt;
}

struct CoordsResult {
    cplx mu;
    std::optional<Slope> slope;   // set when lambda was recognized as rational
    std::vector<Slope> convergents;
    std::vector<cplx> points;     // one per convergent (irrational lambda)
    std::vector<double> differences;
    double spread = 0.0;          // last difference, 0 for rational lambda
};

/// mu with pleating coordinates c. Rational lambda lands exactly on its ray;
/// irrational lambda is the limit of the convergents' ray points.
inline CoordsResult coords_to_mu(const PleatingCoordinates& c, double tol = 1e-10, int depth = 8,
                                 SolverOptions opts = {})
{
    if (!(c.length > 0.0)) {
        throw Error(ErrorKind::domain, "pleating length must be positive");
    }
    if (!std::isfinite(c.lambda)) {
        throw Error(ErrorKind::domain, "lambda must be finite");
    }
    opts.tol = tol;
    CoordsResult r;
    if (const auto s = rational_slope(c.lambda)) {
        r.slope = *s;
        r.convergents = {*s};
        r.mu = ray_point_at_gap(*s, gap_for_length(*s, c.length), opts);
        r.points = {r.mu};
        return r;
    }
    if (depth < 2) {
        throw Error(ErrorKind::domain, "convergent depth must be at least 2");
    }
    r.convergents = convergents(c.lambda, depth);
    for (const Slope& s : r.convergents) {
        r.points.push_back(ray_point_at_gap(s, gap_for_length(s, c.length), opts));
        if (r.points.size() > 1) {
            r.differences.push_back(std::abs(r.points.back() - r.points[r.points.size() - 2]));
        }
    }
    r.mu = r.points.back();
    r.spread = r.differences.empty() ? 0.0 : r.differences.back();
    return r;
}

struct MuCoords {
    double lambda = 0.0;
    double length = 0.0;
    bool on_ray = false;
    Slope left;          // bracketing slopes; equal when on_ray
    Slope right;
    cplx L_left;
    cplx L_right;
    int side_tests = 0;
};

struct MuCoordsOptions {
    double lambda_tol = 1e-6;
    std::int64_t q_max = 1000;
    double on_ray_tol = 1e-8;  // |Im L| below this counts as on the ray
    double max_bracket_im = 1.0; // |Im L| above this at the final bracket: not localized
};

/// Pleating coordinates of mu to grid resolution: bisection over the
/// Stern-Brocot tree with the side-of-ray test sign(Im L_{p/q}(mu)).
inline MuCoords mu_to_coords(cplx mu, const MuCoordsOptions& o = {})
{
    if (!(o.lambda_tol > 0.0) || o.q_max < 1) {
        throw Error(ErrorKind::domain, "lambda tolerance must be positive and q_max >= 1");
    }
    auto not_localized = [&](const std::string& why) {
        std::ostringstream os;
        os << "not localized: mu = " << mu << ": " << why;
        return Error(ErrorKind::not_localized, os.str());
    };
    if (!(mu.imag() > 0.0) || !std::isfinite(mu.real()) || !std::isfinite(mu.imag())) {
        throw not_localized("mu must lie in the upper half plane");
    }
    MuCoords r;
    // +1: mu is right of the ray (larger lambda); -1: left; 0: on it.
    auto side = [&](const Slope& s, cplx& L) {
        ++r.side_tests;
        try {
            L = L_function(s, mu);
        } catch (const Error& e) {
            throw not_localized(e.what());
        }
        // Every W_{p/q} is loxodromic in M, so Re L stays positive there.
        if (!(L.real() > 0.0)) {
            std::ostringstream os;
            os << "L_" << s << " = " << L << " has no positive real part, so mu is outside the slice";
            throw not_localized(os.str());
        }
        if (std::abs(L.imag()) <= o.on_ray_tol) {
            return 0;
        }
        return L.imag() < 0 ? 1 : -1;
    };
    auto on_ray = [&](const Slope& s, cplx L) {
        r.on_ray = true;
        r.left = r.right = s;
        r.L_left = r.L_right = L;
        r.lambda = static_cast<double>(s.p()) / static_cast<double>(s.q());
        r.length = L.real();
        return r;
    };

    // Integer bracket n/1 < lambda < (n+1)/1.
    std::int64_t n = static_cast<std::int64_t>(std::floor(mu.real() / 2.0));
    cplx Ll, Lr;
    int sl = side(Slope(n, 1), Ll);
    for (int k = 0; sl < 0 && k < 3; ++k) {
        sl = side(Slope(--n, 1), Ll);
    }
    if (sl == 0) {
        return on_ray(Slope(n, 1), Ll);
    }
    if (sl < 0) {
        throw not_localized("no integer ray to its left");
    }
    int sr = side(Slope(n + 1, 1), Lr);
    for (int k = 0; sr > 0 && k < 3; ++k) {
        ++n;
        Ll = Lr;
        sr = side(Slope(n + 1, 1), Lr);
    }
    if (sr == 0) {
        return on_ray(Slope(n + 1, 1), Lr);
    }
    if (sr > 0) {
        throw not_localized("no integer ray to its right");
    }

    std::int64_t lp = n, lq = 1, rp = n + 1, rq = 1;
    while (true) {
        const double width = 1.0 / (static_cast<double>(lq) * static_cast<double>(rq));
        if (width <= o.lambda_tol || lq + rq > o.q_max) {
            break;
        }
        const Slope m(lp + rp, lq + rq);
        cplx Lm;
        const int sm = side(m, Lm);
        if (sm == 0) {
            return on_ray(m, Lm);
        }
        if (sm > 0) {
            lp = m.p();
            lq = m.q();
            Ll = Lm;
        } else {
            rp = m.p();
            rq = m.q();
            Lr = Lm;
        }
    }
    r.left = Slope(lp, lq);
    r.right = Slope(rp, rq);
    r.L_left = Ll;
    r.L_right = Lr;
    if (std::max(std::abs(Ll.imag()), std::abs(Lr.imag())) > o.max_bracket_im) {
        std::ostringstream os;
        os << "bracket " << r.left << ", " << r.right << " has L values " << Ll << ", " << Lr
           << " far from the rays";
        throw not_localized(os.str());
    }
    // Interpolate lambda and the length linearly in Im L across the bracket.
    const double w = -Ll.imag() / (Lr.imag() - Ll.imag());
    const double a = static_cast<double>(lp) / static_cast<double>(lq);
    const double b = static_cast<double>(rp) / static_cast<double>(rq);
    r.lambda = a + w * (b - a);
    r.length = (1.0 - w) * Ll.real() + w * Lr.real();
    return r;
}

// ---------------------------------------------------------------------------
// Grid

struct Viewport {
    double x_min = 0.0;
    double x_max = 0.0;
    double y_min = 0.0;
    double y_max = 0.0;
};

struct LevelCurve {
    double length = 0.0;
    std::vector<Slope> slopes;
    std::vector<cplx> points; // one per slope, ordered by slope
};

struct SlopeFailure {
    Slope slope;
    std::string what;     // "ray", "level <length>" or "cusp"
    std::string kind;
    std::string message;
};

struct GridFigure {
    std::vector<PleatingRay> rays;
    std::vector<LevelCurve> level_curves;
    std::vector<CuspPoint> boundary;
    Viewport viewport;
    std::vector<SlopeFailure> failures;
    std::size_t rays_attempted = 0;

    double ray_success_fraction() const
    {
        return rays_attempted == 0 ? 1.0 : static_cast<double>(rays.size()) / static_cast<double>(rays_attempted);
    }
};

struct GridOptions {
    SolverOptions solver;
    std::int64_t boundary_depth = 0;  // 0: same as q_max
    std::optional<Viewport> viewport; // computed from the data when empty
    unsigned workers = 0;             // 0: one per hardware thread
};

inline Viewport auto_viewport(const GridFigure& g, double lo, double hi)
{
    Viewport v{2.0 * lo - 0.5, 2.0 * hi + 0.5, 0.0, 3.0};
    for (const auto& c : g.level_curves) {
        for (const auto& p : c.points) {
            v.y_max = std::max(v.y_max, 1.15 * p.imag());
        }
    }
    for (const auto& c : g.boundary) {
        v.y_max = std::max(v.y_max, c.mu.imag() + 1.0);
    }
    v.y_max = std::ceil(v.y_max * 2.0) / 2.0;
    return v;
}

/// Rays for all slopes with q <= q_max in [lo, hi], one level curve per
/// length and the boundary through all cusps with q <= boundary_depth.
/// Per-slope failures are recorded and the rest of the figure is kept.
inline GridFigure build_grid(std::int64_t q_max, const std::vector<double>& lengths, double lo, double hi,
                             const GridOptions& o = {})
{
    if (q_max < 1) {
        throw Error(ErrorKind::domain, "q_max must be at least 1");
    }
    for (const double l : lengths) {
        if (!(l > 0.0)) {
            throw Error(ErrorKind::domain, "level lengths must be positive");
        }
    }
    GridFigure g;
    const auto slopes = enumerate_slopes(q_max, lo, hi);
    g.rays_attempted = slopes.size();

    struct SlopeResult {
        std::optional<PleatingRay> ray;
        std::vector<std::optional<cplx>> levels;
        std::vector<SlopeFailure> failures;
    };
    auto fail = [](const Slope& s, std::string what, const Error& e) {
        return SlopeFailure{s, std::move(what), std::string(to_string(e.kind())), e.what()};
    };
    const auto results = parallel_map<SlopeResult>(
        slopes.size(),
        [&](std::size_t i) {
            const Slope& s = slopes[i];
            SlopeResult r;
            try {
                r.ray = trace_ray(s, o.solver);
            } catch (const Error& e) {
                r.failures.push_back(fail(s, "ray", e));
            }
            for (const double l : lengths) {
                try {
                    r.levels.emplace_back(ray_point_at_gap(s, gap_for_length(s, l), o.solver));
                } catch (const Error& e) {
                    r.levels.emplace_back(std::nullopt);
                    r.failures.push_back(fail(s, "level " + format_number(l), e));
                }
            }
            return r;
        },
        o.workers);

    for (std::size_t k = 0; k < lengths.size(); ++k) {
        g.level_curves.push_back({lengths[k], {}, {}});
    }
    for (std::size_t i = 0; i < slopes.size(); ++i) {
        const auto& r = results[i];
        if (r.ray) {
            g.rays.push_back(*r.ray);
        }
        for (std::size_t k = 0; k < lengths.size(); ++k) {
            if (r.levels[k]) {
                g.level_curves[k].slopes.push_back(slopes[i]);
                g.level_curves[k].points.push_back(*r.levels[k]);
            }
        }
        g.failures.insert(g.failures.end(), r.failures.begin(), r.failures.end());
    }

    const auto cusp_slopes = enumerate_slopes(o.boundary_depth > 0 ? o.boundary_depth : q_max, lo, hi);
    CuspSolver cusps(o.solver);
    const auto boundary = parallel_map<std::optional<CuspPoint>>(
        cusp_slopes.size(),
        [&](std::size_t i) -> std::optional<CuspPoint> {
            try {
                return cusps.find(cusp_slopes[i]);
            } catch (const Error&) {
                return std::nullopt;
            }
        },
        o.workers);
    for (std::size_t i = 0; i < cusp_slopes.size(); ++i) {
        if (boundary[i]) {
            g.boundary.push_back(*boundary[i]);
        } else {
            try {
                cusps.find(cusp_slopes[i]);
            } catch (const Error& e) {
                g.failures.push_back(fail(cusp_slopes[i], "cusp", e));
            }
        }
    }
    g.viewport = o.viewport ? *o.viewport : auto_viewport(g, lo, hi);
    return g;
}

inline nlohmann::json pair_json(cplx z) { return {round9(z.real()), round9(z.imag())}; }

inline nlohmann::json to_json(const GridFigure& g)
{
    using nlohmann::json;
    json rays = json::array();
    for (const auto& ray : g.rays) {
        json samples = json::array();
        for (const auto& s : ray.samples) {
            samples.push_back({round9(s.mu.real()), round9(s.mu.imag()), round9(s.t), round9(s.length)});
        }
        rays.push_back({{"slope", ray.slope.str()},
                        {"samples", samples},
                        {"sample_fields", {"re", "im", "t", "pleating_length"}},
                        {"cusp", pair_json(ray.endpoint.mu)}});
    }
    json levels = json::array();
    for (const auto& c : g.level_curves) {
        json points = json::array();
        json slopes = json::array();
        for (std::size_t i = 0; i < c.points.size(); ++i) {
            points.push_back(pair_json(c.points[i]));
            slopes.push_back(c.slopes[i].str());
        }
        levels.push_back({{"length", round9(c.length)}, {"slopes", slopes}, {"points", points}});
    }
    json boundary = json::array();
    for (const auto& c : g.boundary) {
        boundary.push_back(to_json(c));
    }
    json failures = json::array();
    for (const auto& f : g.failures) {
        failures.push_back({{"slope", f.slope.str()}, {"what", f.what}, {"kind", f.kind}, {"message", f.message}});
    }
    const auto& v = g.viewport;
    return {{"rays", rays},
            {"level_curves", levels},
            {"boundary", boundary},
            {"viewport", {{"x_min", round9(v.x_min)}, {"x_max", round9(v.x_max)},
                          {"y_min", round9(v.y_min)}, {"y_max", round9(v.y_max)}}},
            {"failures", failures},
            {"rays_attempted", g.rays_attempted},
            {"ray_success_fraction", round9(g.ray_success_fraction())}};
}

namespace detail {

inline std::string svg_points(const std::vector<cplx>& pts)
{
    std::string out;
    for (const auto& p : pts) {
        if (!out.empty()) {
            out += ' ';
        }
        out += format_number(p.real()) + ',' + format_number(p.imag());
    }
    return out;
}

/// Tick spacing giving roughly 4 to 10 ticks over the span.
inline double tick_step(double span)
{
    for (const double step : {0.25, 0.5, 1.0, 2.0, 5.0, 10.0}) {
        if (span / step <= 10.0) {
            return step;
        }
    }
    return std::pow(10.0, std::ceil(std::log10(span / 10.0)));
}

} // namespace detail

/// SVG of the grid. Geometry is drawn in mu-plane coordinates under a single
/// transform, so polyline vertices are the mu values themselves.
inline void write_grid_svg(std::ostream& os, const GridFigure& g)
{
    const auto& v = g.viewport;
    const double plot_w = 800.0;
    const double scale = plot_w / (v.x_max - v.x_min);
    const double plot_h = scale * (v.y_max - v.y_min);
    const double margin = 50.0;
    const double width = plot_w + 2 * margin;
    const double height = plot_h + 2 * margin;
    auto px = [&](double x) { return margin + scale * (x - v.x_min); };
    auto py = [&](double y) { return margin + scale * (v.y_max - y); };
    const std::string n = "\n";

    os << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << format_number(width) << R"(" height=")"
       << format_number(height) << R"(" viewBox="0 0 )" << format_number(width) << ' ' << format_number(height)
       << R"(">)" << n;
    os << "<title>Maskit slice with pleating coordinates</title>" << n;
    os << R"(<rect x="0" y="0" width=")" << format_number(width) << R"(" height=")" << format_number(height)
       << R"(" fill="white"/>)" << n;
    os << R"(<defs><clipPath id="plot"><rect x=")" << format_number(v.x_min) << R"(" y=")" << format_number(v.y_min)
       << R"(" width=")" << format_number(v.x_max - v.x_min) << R"(" height=")" << format_number(v.y_max - v.y_min)
       << R"("/></clipPath></defs>)" << n;

    // Axes and labels in pixel space.
    os << R"(<g font-family="sans-serif" font-size="12" fill="black" stroke="none">)" << n;
    const double xs = detail::tick_step(v.x_max - v.x_min);
    for (double x = std::ceil(v.x_min / xs) * xs; x <= v.x_max + 1e-9; x += xs) {
        os << R"(<line x1=")" << format_number(px(x)) << R"(" y1=")" << format_number(py(v.y_min))
           << R"(" x2=")" << format_number(px(x)) << R"(" y2=")" << format_number(py(v.y_min) + 5)
           << R"(" stroke="black"/>)";
        os << R"(<text x=")" << format_number(px(x)) << R"(" y=")" << format_number(py(v.y_min) + 18)
           << R"(" text-anchor="middle">)" << format_number(x) << "</text>" << n;
    }
    const double ys = detail::tick_step(v.y_max - v.y_min);
    for (double y = std::ceil(v.y_min / ys) * ys; y <= v.y_max + 1e-9; y += ys) {
        os << R"(<line x1=")" << format_number(px(v.x_min) - 5) << R"(" y1=")" << format_number(py(y))
           << R"(" x2=")" << format_number(px(v.x_min)) << R"(" y2=")" << format_number(py(y))
           << R"(" stroke="black"/>)";
        os << R"(<text x=")" << format_number(px(v.x_min) - 8) << R"(" y=")" << format_number(py(y) + 4)
           << R"(" text-anchor="end">)" << format_number(y) << "i</text>" << n;
    }
    os << R"(<text x=")" << format_number(margin + plot_w / 2) << R"(" y=")" << format_number(height - 8)
       << R"(" text-anchor="middle">Re mu</text>)" << n;
    os << R"(<text x="14" y=")" << format_number(margin + plot_h / 2) << R"(" text-anchor="middle" transform="rotate(-90 14 )"
       << format_number(margin + plot_h / 2) << R"~()">Im mu</text>)~" << n;
    os << R"(<rect x=")" << format_number(margin) << R"(" y=")" << format_number(margin) << R"(" width=")"
       << format_number(plot_w) << R"(" height=")" << format_number(plot_h) << R"(" fill="none" stroke="black"/>)"
       << n;
    os << "</g>" << n;

    os << R"~(<g clip-path="url(#plot)" transform="matrix()~" << format_number(scale) << " 0 0 "
       << format_number(-scale) << ' ' << format_number(px(0.0)) << ' ' << format_number(py(0.0))
       << R"~()" fill="none" stroke-linejoin="round">)~" << n;

    // Rays: keep samples up to a bit above the viewport, then the cusp.
    const double y_cut = v.y_max + 0.5 * (v.y_max - v.y_min);
    // Geometry is in mu units, so stroke widths are pixel widths over the scale.
    auto stroke = [&](double pixels) { return format_number(pixels / scale); };
    os << R"(<g id="rays" stroke="#1f4e9c" stroke-width=")" << stroke(0.8) << R"(">)" << n;
    for (const auto& ray : g.rays) {
        std::vector<cplx> pts;
        for (std::size_t k = 0; k < ray.samples.size(); ++k) {
            const bool next_inside = k + 1 < ray.samples.size() && ray.samples[k + 1].mu.imag() <= y_cut;
            if (ray.samples[k].mu.imag() <= y_cut || next_inside) {
                pts.push_back(ray.samples[k].mu);
            }
        }
        pts.push_back(ray.endpoint.mu);
        os << R"(<polyline class="ray" data-slope=")" << ray.slope.str() << R"(" points=")"
           << detail::svg_points(pts) << R"("/>)" << n;
    }
    os << "</g>" << n;

    os << R"(<g id="level-curves" stroke="#b8321a" stroke-width=")" << stroke(1.2) << R"(">)" << n;
    for (const auto& c : g.level_curves) {
        os << R"(<polyline class="level" data-length=")" << format_number(c.length)
           << R"(" points=")" << detail::svg_points(c.points) << R"("/>)" << n;
    }
    os << "</g>" << n;

    std::vector<cplx> cusp_pts;
    for (const auto& c : g.boundary) {
        cusp_pts.push_back(c.mu);
    }
    os << R"(<g id="boundary" stroke="black" stroke-width=")" << stroke(1.2) << R"(">)" << n;
    os << R"(<polyline class="boundary" points=")" << detail::svg_points(cusp_pts)
       << R"("/>)" << n;
    os << "</g>" << n;
    os << "</g>" << n;
    os << "</svg>" << n;
}

} // namespace maskit
