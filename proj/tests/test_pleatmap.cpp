#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "maskit/pleatmap.hpp"

using namespace maskit;

namespace {

const cplx I{0, 1};
const double sqrt3 = std::sqrt(3.0);

ErrorKind kind_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected an Error";
    return ErrorKind::io;
}

// Oracle: arccosh(x) = log(x + sqrt(x^2 - 1)) for real x >= 1.
double arccosh_oracle(double x) { return std::log(x + std::sqrt(x * x - 1.0)); }

} // namespace

TEST(TranslationLength, Examples)
{
    EXPECT_NEAR(std::abs(translation_length(2.0)), 0.0, 1e-15);
    EXPECT_NEAR(translation_length(2.0 * std::cosh(1.0)).real(), 2.0, 1e-14);
    EXPECT_NEAR(translation_length(3.0).real(), 2.0 * arccosh_oracle(1.5), 1e-14);
    EXPECT_NEAR(translation_length(3.0).real(), 1.9248473, 1e-7);
    EXPECT_EQ(translation_length(3.0).imag(), 0.0);
}

TEST(TranslationLength, SlitIsRejected)
{
    for (const double t : {-2.0, 0.0, 1.999}) {
        EXPECT_EQ(kind_of([t] { translation_length(t); }), ErrorKind::branch) << t;
    }
    EXPECT_NO_THROW(translation_length(cplx(0.0, 1e-3)));
    EXPECT_NO_THROW(translation_length(-3.0));
}

TEST(PleatingLength, Examples)
{
    EXPECT_NEAR(pleating_length(Slope(0, 1), 2.0 * std::cosh(0.5)), 1.0, 1e-14);
    EXPECT_NEAR(pleating_length(Slope(1, 2), 2.0 * std::cosh(1.0)), 1.0, 1e-14);
    EXPECT_LT(pleating_length(Slope(3, 7), 2.0 + 1e-14), 1e-6);
    EXPECT_EQ(kind_of([] { pleating_length(Slope(1, 2), 2.0); }), ErrorKind::domain);
    EXPECT_EQ(kind_of([] { pleating_length(Slope(1, 2), 1.0); }), ErrorKind::domain);
}

TEST(PleatingLength, StrictlyIncreasingInTrace)
{
    double previous = 0.0;
    for (double t = 2.001; t < 1e6; t *= 1.7) {
        const double l = pleating_length(Slope(2, 5), t);
        EXPECT_GT(l, previous);
        previous = l;
    }
}

TEST(TraceForLength, Examples)
{
    EXPECT_NEAR(trace_for_length(Slope(0, 1), 1.0), 2.2552519, 1e-7);
    EXPECT_NEAR(trace_for_length(Slope(1, 2), 1.0), 3.0861613, 1e-7);
    EXPECT_EQ(kind_of([] { trace_for_length(Slope(1, 2), 0.0); }), ErrorKind::domain);
}

TEST(TraceForLength, InverseOfPleatingLength)
{
    for (const Slope& s : enumerate_slopes(12, 0, 1)) {
        for (double l = 1e-3; l <= 10.0; l *= 1.3) {
            EXPECT_NEAR(pleating_length(s, trace_for_length(s, l)), l, 1e-12) << s << " l=" << l;
        }
    }
}

TEST(LFunction, Examples)
{
    const double t = 2.0 * std::cosh(1.0);
    const cplx on_ray(1.0, std::sqrt(t + 1.0)); // -mu^2 + 2mu - 2 = t on Re mu = 1
    const cplx l = L_function(Slope(1, 2), on_ray);
    EXPECT_NEAR(l.real(), 1.0, 1e-12);
    EXPECT_NEAR(l.imag(), 0.0, 1e-12);

    EXPECT_LT(std::abs(L_function(Slope(1, 2), cplx(1, sqrt3))), 1e-7);

    const cplx l0 = L_function(Slope(0, 1), 4.0 * I);
    EXPECT_NEAR(l0.real(), 2.0 * arccosh_oracle(2.0), 1e-12);
    EXPECT_NEAR(l0.real(), 2.6339158, 1e-7);
    EXPECT_EQ(l0.imag(), 0.0);

    EXPECT_EQ(kind_of([] { L_function(Slope::infinity(), 4.0 * I); }), ErrorKind::domain);
}

TEST(LFunction, RealOnRaysAndEqualToPleatingLength)
{
    for (const Slope& s : enumerate_slopes(8, 0, 1)) {
        const auto ray = trace_ray(s);
        for (const auto& smp : ray.samples) {
            const cplx l = L_function(s, smp.mu);
            EXPECT_NEAR(l.imag(), 0.0, 1e-10) << s << " t=" << smp.t;
            EXPECT_NEAR(l.real(), smp.length, 1e-10) << s << " t=" << smp.t;
        }
    }
}

TEST(LFunction, TwistAndReflectionSymmetry)
{
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> x(-1.0, 3.0), y(2.2, 5.0);
    for (const Slope& s : enumerate_slopes(7, 0, 1)) {
        for (int k = 0; k < 5; ++k) {
            const cplx mu(x(rng), y(rng));
            const cplx l = L_function(s, mu);
            const cplx twisted = L_function(Slope(s.p() + s.q(), s.q()), mu + 2.0);
            const cplx reflected = L_function(Slope(-s.p(), s.q()), -std::conj(mu));
            EXPECT_LT(std::abs(twisted - l), 1e-9 * (1 + std::abs(l))) << s << " " << mu;
            EXPECT_LT(std::abs(reflected - std::conj(l)), 1e-9 * (1 + std::abs(l))) << s << " " << mu;
        }
    }
}

TEST(LFunction, HolomorphicOffTheRay)
{
    // Cauchy-Riemann by central differences: dL/dx = -i dL/dy.
    const double h = 1e-5;
    for (const Slope& s : {Slope(1, 3), Slope(2, 5), Slope(3, 4)}) {
        for (const cplx mu : {cplx(0.4, 2.5), cplx(1.3, 3.1), cplx(1.9, 2.2)}) {
            const cplx dx = (L_function(s, mu + h) - L_function(s, mu - h)) / (2 * h);
            const cplx dy = (L_function(s, mu + h * I) - L_function(s, mu - h * I)) / (2 * h);
            EXPECT_LT(std::abs(dx + I * dy), 1e-6 * std::abs(dx)) << s << " " << mu;
        }
    }
}

TEST(LIrrational, DepthTwoBookkeeping)
{
    const auto r = L_irrational(0.3, cplx(1, 5), 2);
    ASSERT_EQ(r.values.size(), 2u);
    ASSERT_EQ(r.differences.size(), 1u);
    EXPECT_EQ(r.convergents[1], Slope(1, 3));
    EXPECT_EQ(r.value, L_function(Slope(1, 3), cplx(1, 5)));
    EXPECT_EQ(kind_of([] { L_irrational(0.3, cplx(1, 5), 1); }), ErrorKind::domain);
}

TEST(LIrrational, GoldenMeanDifferencesDecrease)
{
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    const auto r = L_irrational(phi, cplx(1, 5), 8);
    ASSERT_EQ(r.differences.size(), 7u);
    for (std::size_t k = 1; k < r.differences.size(); ++k) {
        EXPECT_LT(r.differences[k], r.differences[k - 1]);
    }
    EXPECT_TRUE(r.eventually_decreasing);
}

TEST(LIrrational, ContinuousInLambda)
{
    // k/(2k+1) -> 1/2
    const cplx mu(0.7, 3.0);
    const cplx target = L_function(Slope(1, 2), mu);
    double previous = 1e9;
    for (std::int64_t k = 1; k <= 256; k *= 2) {
        const double d = std::abs(L_function(Slope(k, 2 * k + 1), mu) - target);
        EXPECT_LT(d, previous);
        previous = d;
    }
    EXPECT_LT(previous, 3e-3);
}

TEST(RationalSlope, Detection)
{
    EXPECT_EQ(rational_slope(0.5), Slope(1, 2));
    EXPECT_EQ(rational_slope(-2.0), Slope(-2, 1));
    EXPECT_EQ(rational_slope(3.0 / 7.0), Slope(3, 7));
    EXPECT_FALSE(rational_slope(0.6180339887).has_value());
    EXPECT_FALSE(rational_slope(std::sqrt(2.0)).has_value());
}

TEST(CoordsToMu, Examples)
{
    const auto a = coords_to_mu({0.0, 1.0});
    EXPECT_LT(std::abs(a.mu - 2.0 * std::cosh(0.5) * I), 1e-10);
    EXPECT_EQ(a.slope, Slope(0, 1));
    const auto b = coords_to_mu({1.0, 1.0});
    EXPECT_LT(std::abs(b.mu - (2.0 + 2.0 * std::cosh(0.5) * I)), 1e-10);
    const auto c = coords_to_mu({0.5, 1e-9});
    EXPECT_LT(std::abs(c.mu - cplx(1, sqrt3)), 1e-9);
    // 1/2 ray in closed form: mu = 1 + i sqrt(t + 1).
    const auto d = coords_to_mu({0.5, 0.7});
    EXPECT_LT(std::abs(d.mu - cplx(1, std::sqrt(trace_for_length(Slope(1, 2), 0.7) + 1))), 1e-10);
    EXPECT_EQ(kind_of([] { coords_to_mu({0.5, 0.0}); }), ErrorKind::domain);
}

TEST(CoordsToMu, IrrationalUsesConvergents)
{
    const auto r = coords_to_mu({0.6180339887, 1.0}, 1e-10, 8);
    EXPECT_FALSE(r.slope.has_value());
    ASSERT_EQ(r.points.size(), 8u);
    EXPECT_EQ(r.differences.size(), 7u);
    EXPECT_EQ(r.spread, r.differences.back());
    EXPECT_LT(r.spread, 0.02);
    // Each convergent point lies on its ray at the requested length.
    for (std::size_t k = 0; k < r.points.size(); ++k) {
        const Slope& s = r.convergents[k];
        const cplx t = eval_trace(s, r.points[k]).value;
        EXPECT_LT(std::abs(t - trace_for_length(s, 1.0)), 1e-8 * std::abs(t)) << s;
    }
}

TEST(MuToCoords, Examples)
{
    const auto a = mu_to_coords(cplx(2, 3));
    EXPECT_TRUE(a.on_ray);
    EXPECT_EQ(a.left, Slope(1, 1));
    EXPECT_EQ(a.lambda, 1.0);
    EXPECT_NEAR(a.length, 2.0 * arccosh_oracle(1.5), 1e-10);

    const auto b = mu_to_coords(4.0 * I);
    EXPECT_EQ(b.lambda, 0.0);
    EXPECT_NEAR(b.length, 2.0 * arccosh_oracle(2.0), 1e-10);

    const auto c = mu_to_coords(coords_to_mu({0.5, 0.7}).mu);
    EXPECT_EQ(c.lambda, 0.5);
    EXPECT_NEAR(c.length, 0.7, 1e-6);
}

TEST(MuToCoords, OffRayPointIsBracketed)
{
    MuCoordsOptions o;
    o.lambda_tol = 1e-4;
    const auto r = mu_to_coords(cplx(0.3, 2.5), o);
    EXPECT_FALSE(r.on_ray);
    EXPECT_EQ(intersection_number(r.left, r.right), 1);
    const double a = static_cast<double>(r.left.p()) / static_cast<double>(r.left.q());
    const double b = static_cast<double>(r.right.p()) / static_cast<double>(r.right.q());
    EXPECT_LE(b - a, 1e-4);
    EXPECT_GE(r.lambda, a);
    EXPECT_LE(r.lambda, b);
    EXPECT_LT(r.L_left.imag(), 0.0);
    EXPECT_GT(r.L_right.imag(), 0.0);
    // Near the real axis of both bracketing L functions, the length is their common value.
    EXPECT_NEAR(r.L_left.real(), r.L_right.real(), 1e-3);
}

TEST(MuToCoords, RoundTripOnGrid)
{
    std::mt19937 rng(2024);
    const auto slopes = enumerate_slopes(8, 0, 2);
    std::uniform_int_distribution<std::size_t> pick(0, slopes.size() - 1);
    std::uniform_real_distribution<double> length(0.05, 3.0);
    for (int k = 0; k < 50; ++k) {
        const Slope s = slopes[pick(rng)];
        const double l = length(rng);
        const double lambda = static_cast<double>(s.p()) / static_cast<double>(s.q());
        const auto back = mu_to_coords(coords_to_mu({lambda, l}).mu);
        EXPECT_TRUE(back.on_ray) << s << " l=" << l;
        EXPECT_EQ(back.left, s);
        EXPECT_NEAR(back.length, l, 1e-6) << s;
    }
}

TEST(MuToCoords, NotLocalized)
{
    for (const cplx mu : {cplx(1, 1), cplx(0.1, 0.5), cplx(0.5, -3), cplx(0.5, 0)}) {
        EXPECT_EQ(kind_of([mu] { mu_to_coords(mu); }), ErrorKind::not_localized) << mu;
    }
    EXPECT_EQ(kind_of([] {
                  MuCoordsOptions o;
                  o.lambda_tol = 0;
                  mu_to_coords(4.0 * I, o);
              }),
              ErrorKind::domain);
}

TEST(BuildGrid, SmallExample)
{
    const auto g = build_grid(2, {1.0}, 0, 1);
    ASSERT_EQ(g.rays.size(), 3u);
    EXPECT_EQ(g.rays[0].slope, Slope(0, 1));
    EXPECT_EQ(g.rays[1].slope, Slope(1, 2));
    EXPECT_EQ(g.rays[2].slope, Slope(1, 1));
    ASSERT_EQ(g.level_curves.size(), 1u);
    ASSERT_EQ(g.level_curves[0].points.size(), 3u);
    EXPECT_LT(std::abs(g.level_curves[0].points[0] - 2.0 * std::cosh(0.5) * I), 1e-10);
    EXPECT_LT(std::abs(g.level_curves[0].points[1] - cplx(1, std::sqrt(2.0 * std::cosh(1.0) + 1))), 1e-10);
    ASSERT_EQ(g.boundary.size(), 3u);
    EXPECT_LT(std::abs(g.boundary[1].mu - cplx(1, sqrt3)), 1e-10);
    EXPECT_TRUE(g.failures.empty());
    EXPECT_EQ(g.ray_success_fraction(), 1.0);
}

TEST(BuildGrid, IntegerSlopes)
{
    GridOptions o;
    o.boundary_depth = 1;
    const auto g = build_grid(1, {}, 0, 2, o);
    ASSERT_EQ(g.rays.size(), 3u);
    EXPECT_TRUE(g.level_curves.empty());
    const std::vector<cplx> cusps{2.0 * I, cplx(2, 2), cplx(4, 2)};
    ASSERT_EQ(g.boundary.size(), 3u);
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_EQ(g.rays[k].slope, Slope(static_cast<std::int64_t>(k), 1));
        EXPECT_LT(std::abs(g.boundary[k].mu - cusps[k]), 1e-12);
    }
    EXPECT_EQ(kind_of([] { build_grid(0, {}, 0, 1); }), ErrorKind::domain);
    EXPECT_EQ(kind_of([] { build_grid(2, {-1.0}, 0, 1); }), ErrorKind::domain);
}

TEST(BuildGrid, LevelCurvesLieOnRaysAndRiseWithLength)
{
    const std::vector<double> lengths{0.25, 0.5, 1.0, 2.0};
    const auto g = build_grid(8, lengths, 0, 1);
    ASSERT_EQ(g.level_curves.size(), lengths.size());
    for (const auto& c : g.level_curves) {
        ASSERT_EQ(c.points.size(), g.rays.size());
        EXPECT_TRUE(std::is_sorted(c.slopes.begin(), c.slopes.end()));
        for (std::size_t i = 0; i < c.points.size(); ++i) {
            const cplx t = eval_trace(c.slopes[i], c.points[i]).value;
            const double expected = trace_for_length(c.slopes[i], c.length);
            EXPECT_LT(std::abs(t - expected), 1e-8 * expected) << c.slopes[i] << " l=" << c.length;
            EXPECT_NEAR(L_function(c.slopes[i], c.points[i]).real(), c.length, 1e-9);
        }
    }
    for (std::size_t k = 1; k < g.level_curves.size(); ++k) {
        for (std::size_t i = 0; i < g.rays.size(); ++i) {
            EXPECT_GT(g.level_curves[k].points[i].imag(), g.level_curves[k - 1].points[i].imag())
                << g.level_curves[k].slopes[i];
        }
    }
}

TEST(BuildGrid, BoundaryOrderingAndSymmetry)
{
    GridOptions o;
    o.boundary_depth = 12;
    const auto g = build_grid(1, {}, 0, 1, o);
    ASSERT_EQ(g.boundary.size(), enumerate_slopes(12, 0, 1).size());
    for (std::size_t k = 1; k < g.boundary.size(); ++k) {
        EXPECT_LT(g.boundary[k - 1].slope, g.boundary[k].slope);
        EXPECT_LT(g.boundary[k - 1].mu.real(), g.boundary[k].mu.real()) << g.boundary[k].slope;
    }
    CuspSolver cusps;
    for (const auto& c : g.boundary) {
        const Slope& s = c.slope;
        EXPECT_LT(std::abs(cusps.find(Slope(s.p() + s.q(), s.q())).mu - (c.mu + 2.0)), 1e-9) << s;
        if (s.p() != 0) {
            EXPECT_LT(std::abs(cusps.find(Slope(-s.p(), s.q())).mu + std::conj(c.mu)), 1e-9) << s;
        }
    }
}

TEST(BuildGrid, JsonAndSvgAreDeterministic)
{
    auto render = [] {
        const auto g = build_grid(2, {1.0}, 0, 1);
        std::ostringstream svg;
        write_grid_svg(svg, g);
        return std::make_pair(to_json(g).dump(), svg.str());
    };
    const auto a = render();
    const auto b = render();
    EXPECT_EQ(a.first, b.first);
    EXPECT_EQ(a.second, b.second);

    const auto j = nlohmann::json::parse(a.first);
    EXPECT_EQ(j["rays"].size(), 3u);
    EXPECT_EQ(j["level_curves"][0]["length"], 1.0);
    EXPECT_EQ(j["level_curves"][0]["points"].size(), 3u);
    EXPECT_EQ(j["boundary"][1]["mu"][1], 1.73205081);

    const std::string& svg = a.second;
    std::size_t rays = 0;
    for (std::size_t at = svg.find("class=\"ray\""); at != std::string::npos; at = svg.find("class=\"ray\"", at + 1)) {
        ++rays;
    }
    EXPECT_EQ(rays, 3u);
    EXPECT_NE(svg.find("class=\"level\""), std::string::npos);
    const auto boundary = svg.find("class=\"boundary\"");
    ASSERT_NE(boundary, std::string::npos);
    EXPECT_NE(svg.find("1,1.73205081", boundary), std::string::npos);
}

TEST(BuildGrid, EmptyLengthsGiveNoLevelCurves)
{
    const auto g = build_grid(2, {}, 0, 1);
    std::ostringstream svg;
    write_grid_svg(svg, g);
    EXPECT_EQ(svg.str().find("class=\"level\""), std::string::npos);
    EXPECT_TRUE(to_json(g)["level_curves"].empty());
}
