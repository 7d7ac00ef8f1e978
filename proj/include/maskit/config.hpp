#pragma once

// Run configuration: a flat "key = value" text document that fully
// determines a CLI run.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "maskit/error.hpp"
#include "maskit/pleatmap.hpp"
#include "maskit/solver.hpp"

namespace maskit {

struct RunConfig {
    // Tolerances
    double tol = 1e-10;          // root residual
    double realness_tol = 1e-9;  // |Im tr| on ray samples
    double lambda_tol = 1e-6;    // bracket width in mu -> coordinates
    // Enumeration bounds
    std::int64_t q_max = 12;
    std::int64_t boundary_depth = 0; // 0: same as q_max
    double t_max = 1e6;
    int samples = 0;                 // rows per ray CSV; 0: derived from min_gap
    double min_gap = 1e-6;
    std::vector<double> lengths{0.25, 0.5, 1.0, 2.0};
    double strip_lo = 0.0;
    double strip_hi = 2.0;
    int depth = 8;                   // continued-fraction convergents for irrational lambda
    // Limit sets
    int max_depth = 14;
    double prune_eps = 1e-3;
    std::int64_t max_points = 2'000'000;
    // Output
    std::optional<Viewport> viewport; // empty: chosen from the data
    std::string out = ".";
    std::uint64_t seed = 20240601;    // test-point sampling

    SolverOptions solver() const
    {
        SolverOptions o;
        o.tol = tol;
        o.realness_tol = realness_tol;
        o.t_max = t_max;
        o.min_gap = min_gap;
        return o;
    }

    int ray_samples() const { return samples > 0 ? samples : default_ray_samples(solver()); }
    std::int64_t effective_boundary_depth() const { return boundary_depth > 0 ? boundary_depth : q_max; }
};

namespace detail {

inline std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline std::string number_text(double x)
{
    // Shortest of %.15g / %.17g that reads back exactly.
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    if (std::strtod(buf, nullptr) != x) {
        std::snprintf(buf, sizeof buf, "%.17g", x);
    }
    return buf;
}

inline double parse_double(const std::string& key, const std::string& text)
{
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || text.empty() || !std::isfinite(v)) {
        throw Error(ErrorKind::parse, "config key '" + key + "': not a number: '" + text + "'");
    }
    return v;
}

inline std::int64_t parse_int(const std::string& key, const std::string& text)
{
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || text.empty()) {
        throw Error(ErrorKind::parse, "config key '" + key + "': not an integer: '" + text + "'");
    }
    return v;
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text)
{
    std::vector<double> out;
    if (trim(text).empty()) {
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(parse_double(key, trim(item)));
    }
    return out;
}

inline std::string list_text(const std::vector<double>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out += (i ? "," : "") + number_text(v[i]);
    }
    return out;
}

} // namespace detail

/// Rejects configurations that violate the documented invariants.
inline void validate(const RunConfig& c)
{
    auto fail = [](const std::string& m) { throw Error(ErrorKind::parse, "invalid config: " + m); };
    if (!(c.tol > 0) || !(c.realness_tol > 0) || !(c.lambda_tol > 0) || !(c.prune_eps > 0) || !(c.min_gap > 0)) {
        fail("tolerances must be positive");
    }
    if (c.q_max < 1) {
        fail("q_max must be at least 1");
    }
    if (c.boundary_depth < 0) {
        fail("boundary_depth must be >= 0");
    }
    if (!(c.t_max > 2)) {
        fail("t_max must exceed 2");
    }
    if (c.samples != 0 && c.samples < 2) {
        fail("samples must be 0 (automatic) or at least 2");
    }
    for (const double l : c.lengths) {
        if (!(l > 0)) {
            fail("lengths must be positive");
        }
    }
    if (!(c.strip_hi >= c.strip_lo)) {
        fail("strip must satisfy lo <= hi");
    }
    if (c.depth < 2) {
        fail("depth must be at least 2");
    }
    if (c.max_depth < 1 || c.max_points < 1) {
        fail("max_depth and max_points must be positive");
    }
    if (c.viewport && (!(c.viewport->x_max > c.viewport->x_min) || !(c.viewport->y_max > c.viewport->y_min))) {
        fail("viewport must have positive width and height");
    }
}

/// Sets one key from its text value.
inline void set_config_value(RunConfig& c, const std::string& key, const std::string& value)
{
    using namespace detail;
    if (key == "tol") {
        c.tol = parse_double(key, value);
    } else if (key == "realness_tol") {
        c.realness_tol = parse_double(key, value);
    } else if (key == "lambda_tol") {
        c.lambda_tol = parse_double(key, value);
    } else if (key == "q_max") {
        c.q_max = parse_int(key, value);
    } else if (key == "boundary_depth") {
        c.boundary_depth = parse_int(key, value);
    } else if (key == "t_max") {
        c.t_max = parse_double(key, value);
    } else if (key == "samples") {
        c.samples = static_cast<int>(parse_int(key, value));
    } else if (key == "min_gap") {
        c.min_gap = parse_double(key, value);
    } else if (key == "lengths") {
        c.lengths = parse_list(key, value);
    } else if (key == "strip") {
        const auto v = parse_list(key, value);
        if (v.size() != 2) {
            throw Error(ErrorKind::parse, "config key 'strip' needs two numbers lo,hi");
        }
        c.strip_lo = v[0];
        c.strip_hi = v[1];
    } else if (key == "depth") {
        c.depth = static_cast<int>(parse_int(key, value));
    } else if (key == "max_depth") {
        c.max_depth = static_cast<int>(parse_int(key, value));
    } else if (key == "prune_eps") {
        c.prune_eps = parse_double(key, value);
    } else if (key == "max_points") {
        c.max_points = parse_int(key, value);
    } else if (key == "viewport") {
        if (value == "auto") {
            c.viewport.reset();
        } else {
            const auto v = parse_list(key, value);
            if (v.size() != 4) {
                throw Error(ErrorKind::parse, "config key 'viewport' needs 'auto' or x_min,x_max,y_min,y_max");
            }
            c.viewport = Viewport{v[0], v[1], v[2], v[3]};
        }
    } else if (key == "out") {
        c.out = value;
    } else if (key == "seed") {
        c.seed = static_cast<std::uint64_t>(parse_int(key, value));
    } else {
        throw Error(ErrorKind::parse, "unknown config key '" + key + "'");
    }
}

/// Canonical text form: every key, fixed order, full precision.
inline std::string serialize(const RunConfig& c)
{
    using detail::number_text;
    std::ostringstream os;
    os << "tol = " << number_text(c.tol) << '\n'
       << "realness_tol = " << number_text(c.realness_tol) << '\n'
       << "lambda_tol = " << number_text(c.lambda_tol) << '\n'
       << "q_max = " << c.q_max << '\n'
       << "boundary_depth = " << c.boundary_depth << '\n'
       << "t_max = " << number_text(c.t_max) << '\n'
       << "samples = " << c.samples << '\n'
       << "min_gap = " << number_text(c.min_gap) << '\n'
       << "lengths = " << detail::list_text(c.lengths) << '\n'
       << "strip = " << number_text(c.strip_lo) << ',' << number_text(c.strip_hi) << '\n'
       << "depth = " << c.depth << '\n'
       << "max_depth = " << c.max_depth << '\n'
       << "prune_eps = " << number_text(c.prune_eps) << '\n'
       << "max_points = " << c.max_points << '\n'
       << "viewport = "
       << (c.viewport ? detail::list_text({c.viewport->x_min, c.viewport->x_max, c.viewport->y_min, c.viewport->y_max})
                      : std::string("auto"))
       << '\n'
       << "out = " << c.out << '\n'
       << "seed = " << c.seed << '\n';
    return os.str();
}

/// Parses a config document on top of `base`. Blank lines and '#' comments
/// are ignored.
inline RunConfig parse_config(const std::string& text, RunConfig base = {})
{
    std::istringstream is(text);
    std::string line;
    int number = 0;
    while (std::getline(is, line)) {
        ++number;
        const std::string body = detail::trim(line.substr(0, line.find('#')));
        if (body.empty()) {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorKind::parse, "config line " + std::to_string(number) + ": expected key = value");
        }
        set_config_value(base, detail::trim(body.substr(0, eq)), detail::trim(body.substr(eq + 1)));
    }
    validate(base);
    return base;
}

inline RunConfig load_config(const std::string& path, RunConfig base = {})
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::io, "cannot read config file '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), std::move(base));
}

/// FNV-1a of the canonical config text, excluding the output directory so
/// that file names do not depend on where they are written.
inline std::string config_hash(const RunConfig& c)
{
    RunConfig k = c;
    k.out = ".";
    std::uint64_t h = 1469598103934665603ULL;
    for (const unsigned char ch : serialize(k)) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%08llx", static_cast<unsigned long long>(h >> 32));
    return buf;
}

} // namespace maskit
