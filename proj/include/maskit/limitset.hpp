#pragma once

// Limit sets of G_mu as point clouds: depth-first enumeration of reduced
// words applied to fixed-point seeds, pruned once a branch's seed images are
// within prune_eps of each other.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <unordered_map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "maskit/error.hpp"
#include "maskit/mobius.hpp"
#include "maskit/parallel.hpp"
#include "maskit/pleatmap.hpp"
#include "maskit/solver.hpp"
#include "maskit/traces.hpp"

namespace maskit {

enum class FixedPointType { parabolic, loxodromic, elliptic };

inline std::string to_string(FixedPointType t)
{
    switch (t) {
    case FixedPointType::parabolic: return "parabolic";
    case FixedPointType::loxodromic: return "loxodromic";
    case FixedPointType::elliptic: return "elliptic";
    }
    return "?";
}

struct FixedPoints {
    FixedPointType type;
    // One point when parabolic. Loxodromic: attracting point first.
    std::vector<SpherePoint<double>> points;
};

/// Fixed points of z -> (az + b)/(cz + d), the roots of cz^2 + (d - a)z - b = 0.
/// Parabolic when |tr^2 - 4| <= parabolic_tol after normalizing to det 1.
inline FixedPoints fixed_points(const Mobius<double>& m, double parabolic_tol = 1e-10)
{
    const auto det = m.det();
    if (std::abs(det) == 0.0) {
        throw Error(ErrorKind::domain, "singular matrix has no Mobius action");
    }
    const Mobius<double> n = m.normalized();
    const double scale = std::max({std::abs(n.a), std::abs(n.b), std::abs(n.c), std::abs(n.d), 1.0});
    if (std::abs(n.b) <= 1e-14 * scale && std::abs(n.c) <= 1e-14 * scale && std::abs(n.a - n.d) <= 1e-14 * scale) {
        throw Error(ErrorKind::domain, "the identity fixes every point");
    }
    const cplx tr = n.trace();
    const cplx disc = tr * tr - 4.0;
    FixedPoints out;
    if (std::abs(disc) <= parabolic_tol) {
        out.type = FixedPointType::parabolic;
        if (n.c == cplx{}) {
            out.points.push_back(SpherePoint<double>::infinity());
        } else {
            out.points.push_back({(n.a - n.d) / (2.0 * n.c), false});
        }
        return out;
    }
    out.type = (std::abs(tr.imag()) <= parabolic_tol && std::abs(tr.real()) < 2.0) ? FixedPointType::elliptic
                                                                                    : FixedPointType::loxodromic;
    std::array<SpherePoint<double>, 2> z;
    if (n.c == cplx{}) {
        // Affine map az/d + b/d: finite point b/(d - a) and infinity.
        z = {SpherePoint<double>{n.b / (n.d - n.a), false}, SpherePoint<double>::infinity()};
    } else {
        const cplx root = std::sqrt(disc);
        // Pick the sign that avoids cancellation, then use the product of roots -b/c.
        const cplx u = (n.a - n.d) + (std::abs((n.a - n.d) + root) >= std::abs((n.a - n.d) - root) ? root : -root);
        const cplx z1 = u / (2.0 * n.c);
        const cplx z2 = z1 == cplx{} ? (n.a - n.d) / n.c : -n.b / (n.c * z1);
        z = {SpherePoint<double>{z1, false}, SpherePoint<double>{z2, false}};
    }
    // |multiplier|: 1/|cz + d|^2 at a finite point, |d/a| at infinity (affine case).
    auto multiplier = [&](const SpherePoint<double>& p) {
        if (p.at_infinity) {
            return std::abs(n.d / n.a);
        }
        return 1.0 / std::norm(n.c * p.z + n.d);
    };
    if (multiplier(z[1]) < multiplier(z[0])) {
        std::swap(z[0], z[1]);
    }
    out.points = {z[0], z[1]};
    return out;
}

struct LimitSample {
    std::vector<SpherePoint<double>> points; // in DFS order
    int depth_reached = 0;
    cplx mu;
    std::string seed_description;
    bool truncated = false;
    std::size_t leaves = 0;
};

struct LimitOptions {
    int max_depth = 14;
    double prune_eps = 1e-3;
    std::size_t max_points = 2'000'000;
    unsigned workers = 0;
};

namespace detail {

/// Generators in the cyclic order A, B, A^-1, B^-1; the inverse of g[i] is g[i+2].
inline std::array<Mobius<double>, 4> limit_generators(cplx mu)
{
    const auto A = generator_A(mu);
    const auto B = generator_B<double>();
    return {A, B, A.inverse(), B.inverse()};
}

/// The fixed point used as a seed: the attracting one when loxodromic.
inline SpherePoint<double> seed_point(const Mobius<double>& m)
{
    return fixed_points(m, 1e-9).points.front();
}

/// Seeds for words ending in g[i]: the fixed points of the two commutators
/// ending in g[i] and of g[i] itself, ordered around the limit set.
inline std::array<std::array<SpherePoint<double>, 3>, 4> limit_seeds(const std::array<Mobius<double>, 4>& g)
{
    std::array<std::array<SpherePoint<double>, 3>, 4> seeds;
    for (int i = 0; i < 4; ++i) {
        auto at = [&](int k) { return g[static_cast<std::size_t>(((i + k) % 4 + 4) % 4)]; };
        seeds[static_cast<std::size_t>(i)] = {seed_point(at(1) * at(2) * at(3) * at(0)), seed_point(at(0)),
                                              seed_point(at(-1) * at(-2) * at(-3) * at(0))};
    }
    return seeds;
}

struct DfsState {
    const std::array<Mobius<double>, 4>* g;
    const std::array<std::array<SpherePoint<double>, 3>, 4>* seeds;
    const LimitOptions* o;
    std::vector<SpherePoint<double>> points;
    std::size_t leaves = 0;
    int depth_reached = 0;
    bool truncated = false;
};

/// Images of the seeds of the word's last letter; true when all are finite
/// and consecutive images are within eps.
inline bool seed_images(const Mobius<double>& w, const std::array<SpherePoint<double>, 3>& seeds, double eps,
                        std::array<SpherePoint<double>, 3>& img)
{
    bool close = true;
    for (std::size_t k = 0; k < 3; ++k) {
        img[k] = w.apply(seeds[k]);
        if (img[k].at_infinity || !std::isfinite(img[k].z.real()) || !std::isfinite(img[k].z.imag())) {
            close = false;
        }
    }
    for (std::size_t k = 0; close && k + 1 < 3; ++k) {
        close = std::abs(img[k].z - img[k + 1].z) <= eps;
    }
    return close;
}

inline void dfs(DfsState& st, const Mobius<double>& w, int last, int depth)
{
    if (st.truncated) {
        return;
    }
    st.depth_reached = std::max(st.depth_reached, depth);
    std::array<SpherePoint<double>, 3> img;
    const bool close = seed_images(w, (*st.seeds)[static_cast<std::size_t>(last)], st.o->prune_eps, img);
    if (close || depth >= st.o->max_depth) {
        ++st.leaves;
        for (const auto& p : img) {
            if (st.points.size() >= st.o->max_points) {
                st.truncated = true;
                return;
            }
            st.points.push_back(p);
        }
        return;
    }
    for (const int step : {1, 0, -1}) {
        const int next = ((last + step) % 4 + 4) % 4;
        dfs(st, w * (*st.g)[static_cast<std::size_t>(next)], next, depth + 1);
    }
}

} // namespace detail

/// Depth-first limit-set sample of G_mu. Subtrees from depth 2 run in
/// parallel and are concatenated in DFS order, so the output is deterministic.
inline LimitSample limit_points(cplx mu, const LimitOptions& o = {})
{
    if (o.max_depth < 1) {
        throw Error(ErrorKind::domain, "max_depth must be at least 1");
    }
    if (!(o.prune_eps > 0.0)) {
        throw Error(ErrorKind::domain, "prune_eps must be positive");
    }
    const auto g = detail::limit_generators(mu);
    const auto seeds = detail::limit_seeds(g);

    LimitSample out;
    out.mu = mu;
    out.seed_description = "fixed points of the two commutators ending in the last letter and of the last letter "
                           "(attracting point when loxodromic); generators A, B, A^-1, B^-1";

    // Work units in DFS order: a depth-1 word that is already a leaf, or
    // each of its three children.
    struct Unit {
        Mobius<double> w;
        int last;
        int depth;
    };
    std::vector<Unit> units;
    for (int i = 0; i < 4; ++i) {
        const auto& gi = g[static_cast<std::size_t>(i)];
        std::array<SpherePoint<double>, 3> img;
        if (o.max_depth == 1 || detail::seed_images(gi, seeds[static_cast<std::size_t>(i)], o.prune_eps, img)) {
            units.push_back({gi, i, 1});
            continue;
        }
        for (const int step : {1, 0, -1}) {
            const int next = ((i + step) % 4 + 4) % 4;
            units.push_back({gi * g[static_cast<std::size_t>(next)], next, 2});
        }
    }

    const auto parts = parallel_map<detail::DfsState>(
        units.size(),
        [&](std::size_t u) {
            detail::DfsState st{&g, &seeds, &o, {}, 0, 0, false};
            detail::dfs(st, units[u].w, units[u].last, units[u].depth);
            return st;
        },
        o.workers);

    for (const auto& st : parts) {
        out.leaves += st.leaves;
        out.depth_reached = std::max(out.depth_reached, st.depth_reached);
        out.truncated = out.truncated || st.truncated;
        for (const auto& p : st.points) {
            if (out.points.size() >= o.max_points) {
                out.truncated = true;
                break;
            }
            out.points.push_back(p);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Export

inline void write_points_csv(std::ostream& os, const LimitSample& s)
{
    os << "re,im\n";
    for (const auto& p : s.points) {
        if (!p.at_infinity) {
            os << format_number(p.z.real()) << ',' << format_number(p.z.imag()) << '\n';
        }
    }
}

struct RenderStyle {
    double width_px = 800.0;
    double point_radius = 0.6;
    std::string color = "#1a1a1a";
};

struct RenderedDocument {
    std::string svg;
    std::vector<std::string> warnings;
    std::size_t drawn = 0;
    std::size_t clipped = 0;
};

/// SVG with one mark per point inside the viewport.
inline RenderedDocument render_points(const LimitSample& sample, const Viewport& v, const RenderStyle& style = {})
{
    if (sample.points.empty()) {
        throw Error(ErrorKind::domain, "cannot render an empty sample");
    }
    if (!(v.x_max > v.x_min) || !(v.y_max > v.y_min)) {
        throw Error(ErrorKind::domain, "viewport must have positive width and height");
    }
    RenderedDocument doc;
    const double scale = style.width_px / (v.x_max - v.x_min);
    const double height = scale * (v.y_max - v.y_min);
    std::ostringstream os;
    os << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << format_number(style.width_px) << R"(" height=")"
       << format_number(height) << R"(" viewBox="0 0 )" << format_number(style.width_px) << ' '
       << format_number(height) << R"(">)" << '\n';
    os << "<title>Limit set at mu = " << format_number(sample.mu.real()) << (sample.mu.imag() < 0 ? "" : "+")
       << format_number(sample.mu.imag()) << "i</title>\n";
    os << R"(<rect x="0" y="0" width=")" << format_number(style.width_px) << R"(" height=")" << format_number(height)
       << R"(" fill="white"/>)" << '\n';
    os << R"(<g fill=")" << style.color << R"(" stroke="none">)" << '\n';
    std::size_t infinite = 0;
    for (const auto& p : sample.points) {
        if (p.at_infinity) {
            ++infinite;
            continue;
        }
        if (p.z.real() < v.x_min || p.z.real() > v.x_max || p.z.imag() < v.y_min || p.z.imag() > v.y_max) {
            ++doc.clipped;
            continue;
        }
        os << R"(<circle cx=")" << format_number(scale * (p.z.real() - v.x_min)) << R"(" cy=")"
           << format_number(scale * (v.y_max - p.z.imag())) << R"(" r=")" << format_number(style.point_radius)
           << R"("/>)" << '\n';
        ++doc.drawn;
    }
    os << "</g>\n</svg>\n";
    if (infinite > 0) {
        doc.warnings.push_back(std::to_string(infinite) + " point(s) at infinity omitted");
    }
    doc.svg = os.str();
    return doc;
}

// ---------------------------------------------------------------------------
// Generator invariance

namespace detail {

/// Uniform-grid index answering "nearest point within one cell".
class PointIndex {
public:
    PointIndex(std::vector<cplx> pts, double cell) : pts_(std::move(pts)), cell_(cell)
    {
        for (std::size_t i = 0; i < pts_.size(); ++i) {
            grid_[key(cell_of(pts_[i].real()), cell_of(pts_[i].imag()))].push_back(i);
        }
    }

    /// Distance to the nearest point, or infinity if none is within one cell.
    double nearest(cplx z) const
    {
        double best = std::numeric_limits<double>::infinity();
        const std::int64_t cx = cell_of(z.real());
        const std::int64_t cy = cell_of(z.imag());
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                const auto it = grid_.find(key(cx + dx, cy + dy));
                if (it == grid_.end()) {
                    continue;
                }
                for (const std::size_t i : it->second) {
                    best = std::min(best, std::abs(pts_[i] - z));
                }
            }
        }
        return best <= cell_ ? best : std::numeric_limits<double>::infinity();
    }

private:
    std::int64_t cell_of(double x) const { return static_cast<std::int64_t>(std::floor(x / cell_)); }
    static std::uint64_t key(std::int64_t x, std::int64_t y)
    {
        return (static_cast<std::uint64_t>(x) << 32) ^ (static_cast<std::uint64_t>(y) & 0xffffffffULL);
    }

    std::vector<cplx> pts_;
    double cell_;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> grid_;
};

} // namespace detail

struct InvarianceReport {
    double tolerance = 0.0;
    std::size_t subsample = 0;
    std::array<double, 4> worst{};      // per generator A, B, A^-1, B^-1
    std::array<std::size_t, 4> misses{}; // images with no sample point within tolerance
    bool pass = false;
};

/// Maps a random subsample (points with |Re z - Re mu| <= half_width) by each
/// generator and measures the distance from each image to the full sample.
inline InvarianceReport generator_invariance(const LimitSample& s, double tolerance, std::size_t n = 100,
                                             std::uint64_t seed = 1, double half_width = 3.0)
{
    std::vector<cplx> finite;
    std::vector<cplx> window;
    for (const auto& p : s.points) {
        if (!p.at_infinity) {
            finite.push_back(p.z);
            if (std::abs(p.z.real() - s.mu.real()) <= half_width) {
                window.push_back(p.z);
            }
        }
    }
    if (window.empty()) {
        throw Error(ErrorKind::domain, "no sample points near Re mu to test invariance on");
    }
    InvarianceReport r;
    r.tolerance = tolerance;
    r.subsample = n;
    const detail::PointIndex index(std::move(finite), tolerance);
    const auto g = detail::limit_generators(s.mu);
    std::mt19937_64 rng(seed);
    std::vector<cplx> chosen(n);
    for (auto& z : chosen) {
        z = window[rng() % window.size()];
    }
    r.pass = true;
    for (std::size_t k = 0; k < 4; ++k) {
        for (const cplx z : chosen) {
            const double d = index.nearest(g[k].apply(z));
            if (!std::isfinite(d)) {
                ++r.misses[k];
                r.pass = false;
            } else {
                r.worst[k] = std::max(r.worst[k], d);
            }
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// Parabolic dynamics witness

struct ParabolicWitness {
    Slope slope;
    cplx mu;
    double trace_error = 0.0;  // |tr W - 2|
    cplx fixed_point;
    double offset = 0.0;       // distance of the test point from the fixed point
    std::vector<int> powers;
    std::vector<double> displacements; // |W^n(z) - z|
    bool linear = false;       // displacement ratios within 25% of the power ratios
};

/// Iterates W_{p/q}(mu) on a point near its (nearly) parabolic fixed point.
/// Parabolic maps move such points by ~ n |z - z0|^2, loxodromic ones
/// by a factor growing exponentially in n.
inline ParabolicWitness parabolic_witness(const Slope& s, cplx mu, double offset = 1e-2,
                                          std::vector<int> powers = {1, 2, 4})
{
    const Mobius<double> w = word_matrix(word_for_slope(s), mu);
    if (w.c == cplx{}) {
        throw Error(ErrorKind::domain, "word fixes infinity; no finite parabolic point");
    }
    ParabolicWitness r;
    r.slope = s;
    r.mu = mu;
    r.trace_error = std::abs(w.trace() - 2.0);
    r.fixed_point = (w.a - w.d) / (2.0 * w.c);
    r.offset = offset;
    r.powers = powers;
    const cplx z = r.fixed_point + cplx(offset, 0.0);
    for (const int n : powers) {
        Mobius<double> wn;
        for (int k = 0; k < n; ++k) {
            wn = wn * w;
        }
        r.displacements.push_back(std::abs(wn.apply(z) - z));
    }
    r.linear = true;
    for (std::size_t k = 1; k < powers.size(); ++k) {
        const double expected = static_cast<double>(powers[k]) / static_cast<double>(powers[0]);
        const double got = r.displacements[k] / r.displacements[0];
        r.linear = r.linear && std::abs(got / expected - 1.0) <= 0.25;
    }
    return r;
}

} // namespace maskit
