#pragma once

// Command-line front end: cusp, ray, grid, coords and limitset.
// Exit codes: 0 success, 1 solver failure, 2 bad input.

#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "maskit/config.hpp"
#include "maskit/error.hpp"
#include "maskit/farey.hpp"
#include "maskit/limitset.hpp"
#include "maskit/pleatmap.hpp"
#include "maskit/solver.hpp"

namespace maskit {

/// Parses "a", "a+bi", "a-bi" or "bi" (no spaces).
inline cplx parse_complex(const std::string& text)
{
    auto fail = [&] { return Error(ErrorKind::parse, "not a complex number of the form a+bi: '" + text + "'"); };
    auto number = [&](const std::string& s) {
        if (s.empty() || s.find_first_of(" \t") != std::string::npos) {
            throw fail();
        }
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (end != s.c_str() + s.size() || !std::isfinite(v)) {
            throw fail();
        }
        return v;
    };
    if (text.empty()) {
        throw fail();
    }
    if (text.back() != 'i') {
        return {number(text), 0.0};
    }
    const std::string body = text.substr(0, text.size() - 1);
    std::size_t split = std::string::npos;
    for (std::size_t k = body.size(); k-- > 1;) {
        if ((body[k] == '+' || body[k] == '-') && body[k - 1] != 'e' && body[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    auto imag = [&](const std::string& s) {
        if (s == "+" || s.empty()) {
            return 1.0;
        }
        if (s == "-") {
            return -1.0;
        }
        return number(s);
    };
    if (split == std::string::npos) {
        return {0.0, imag(body)};
    }
    return {number(body.substr(0, split)), imag(body.substr(split))};
}

inline std::string format_complex(cplx z)
{
    return format_number(z.real()) + (std::signbit(z.imag()) ? "" : "+") + format_number(z.imag()) + "i";
}

namespace detail {

inline std::string slope_token(const Slope& s) { return std::to_string(s.p()) + "_" + std::to_string(s.q()); }

inline std::string mu_token(cplx mu) { return format_number(mu.real()) + "_" + format_number(mu.imag()); }

inline std::filesystem::path write_text(const RunConfig& c, const std::string& name, const std::string& body)
{
    std::error_code ec;
    std::filesystem::create_directories(c.out, ec);
    const auto path = std::filesystem::path(c.out) / name;
    std::ofstream f(path, std::ios::binary);
    f << body;
    if (!f) {
        throw Error(ErrorKind::io, "cannot write '" + path.string() + "'");
    }
    return path;
}

inline int exit_code(ErrorKind k) { return (k == ErrorKind::parse || k == ErrorKind::domain) ? 2 : 1; }

inline nlohmann::json error_json(const Error& e)
{
    return {{"error", std::string(to_string(e.kind()))}, {"message", e.what()}};
}

inline int cmd_cusp(const std::string& text, const RunConfig& c, std::ostream& out)
{
    const Slope s = parse_slope(text);
    CuspSolver solver(c.solver());
    const CuspPoint p = solver.find(s);
    auto j = to_json(p);
    j["tol"] = c.tol;
    out << j.dump(2) << '\n';
    return 0;
}

inline int cmd_ray(const std::string& text, const RunConfig& c, std::ostream& out)
{
    const Slope s = parse_slope(text);
    const PleatingRay ray = trace_ray(s, c.t_max, c.ray_samples(), c.tol, c.solver());
    std::ostringstream csv;
    write_ray_csv(csv, ray);
    const auto path = write_text(c, "ray_" + slope_token(s) + ".csv", csv.str());
    out << nlohmann::json{{"slope", s.str()},
                          {"file", path.string()},
                          {"rows", ray.samples.size() + 1},
                          {"cusp", {round9(ray.endpoint.mu.real()), round9(ray.endpoint.mu.imag())}}}
               .dump(2)
        << '\n';
    return 0;
}

inline int cmd_grid(const RunConfig& c, std::ostream& out, std::ostream& err)
{
    GridOptions o;
    o.solver = c.solver();
    o.boundary_depth = c.effective_boundary_depth();
    o.viewport = c.viewport;
    const GridFigure g = build_grid(c.q_max, c.lengths, c.strip_lo, c.strip_hi, o);
    std::ostringstream svg;
    write_grid_svg(svg, g);
    const std::string stem = "grid_" + config_hash(c);
    const auto svg_path = write_text(c, stem + ".svg", svg.str());
    const auto json_path = write_text(c, stem + ".json", to_json(g).dump(1) + "\n");
    for (const auto& f : g.failures) {
        err << "warning: " << f.what << " for slope " << f.slope << " failed: " << f.message << '\n';
    }
    const double ok = g.ray_success_fraction();
    out << nlohmann::json{{"svg", svg_path.string()},
                          {"json", json_path.string()},
                          {"rays", g.rays.size()},
                          {"rays_attempted", g.rays_attempted},
                          {"boundary_cusps", g.boundary.size()},
                          {"failures", g.failures.size()},
                          {"ray_success_fraction", round9(ok)}}
               .dump(2)
        << '\n';
    return ok >= 0.9 ? 0 : 1;
}

inline nlohmann::json complex_json(cplx z) { return {round9(z.real()), round9(z.imag())}; }

inline int cmd_coords(const std::string& direction, const std::vector<std::string>& values, const RunConfig& c,
                      std::ostream& out)
{
    using nlohmann::json;
    if (direction == "to-mu") {
        if (values.size() != 2) {
            throw Error(ErrorKind::parse, "coords to-mu needs two values: lambda length");
        }
        const PleatingCoordinates pc{parse_double("lambda", values[0]), parse_double("length", values[1])};
        const auto r = coords_to_mu(pc, c.tol, c.depth, c.solver());
        json conv = json::array(), points = json::array(), diffs = json::array();
        for (const auto& s : r.convergents) {
            conv.push_back(s.str());
        }
        for (const auto& p : r.points) {
            points.push_back(complex_json(p));
        }
        for (const double d : r.differences) {
            diffs.push_back(round9(d));
        }
        json j{{"lambda", pc.lambda},
               {"length", pc.length},
               {"mu", complex_json(r.mu)},
               {"mu_full", {format_full(r.mu.real()), format_full(r.mu.imag())}},
               {"rational", r.slope.has_value()}};
        if (r.slope) {
            j["slope"] = r.slope->str();
        } else {
            j["convergents"] = conv;
            j["convergent_points"] = points;
            j["differences"] = diffs;
            j["spread"] = round9(r.spread);
            j["eventually_decreasing"] = eventually_decreasing(r.differences);
        }
        out << j.dump(2) << '\n';
        return 0;
    }
    if (direction == "from-mu") {
        cplx mu;
        if (values.size() == 2) {
            mu = {parse_double("re", values[0]), parse_double("im", values[1])};
        } else if (values.size() == 1) {
            mu = parse_complex(values[0]);
        } else {
            throw Error(ErrorKind::parse, "coords from-mu needs 're im' or 'a+bi'");
        }
        MuCoordsOptions o;
        o.lambda_tol = c.lambda_tol;
        const auto r = mu_to_coords(mu, o);
        out << json{{"mu", complex_json(mu)},
                    {"lambda", round9(r.lambda)},
                    {"length", round9(r.length)},
                    {"on_ray", r.on_ray},
                    {"bracket", {r.left.str(), r.right.str()}},
                    {"L_left", complex_json(r.L_left)},
                    {"L_right", complex_json(r.L_right)},
                    {"side_tests", r.side_tests}}
                   .dump(2)
            << '\n';
        return 0;
    }
    throw Error(ErrorKind::parse, "coords direction must be to-mu or from-mu, got '" + direction + "'");
}

inline int cmd_limitset(const std::string& text, const RunConfig& c, std::ostream& out, std::ostream& err)
{
    const cplx mu = parse_complex(text);
    LimitOptions o;
    o.max_depth = c.max_depth;
    o.prune_eps = c.prune_eps;
    o.max_points = static_cast<std::size_t>(c.max_points);
    const LimitSample s = limit_points(mu, o);
    const Viewport v = c.viewport ? *c.viewport
                                  : Viewport{mu.real() - 3.0, mu.real() + 3.0, -0.5, std::max(mu.imag(), 0.0) + 0.5};
    const auto doc = render_points(s, v);
    std::ostringstream csv;
    write_points_csv(csv, s);
    const std::string stem = "limitset_" + mu_token(mu) + "_" + config_hash(c);
    const auto csv_path = write_text(c, stem + ".csv", csv.str());
    const auto svg_path = write_text(c, stem + ".svg", doc.svg);
    if (s.truncated) {
        err << "warning: point cap " << c.max_points << " reached; sample truncated\n";
    }
    for (const auto& w : doc.warnings) {
        err << "warning: " << w << '\n';
    }
    nlohmann::json j{{"mu", complex_json(mu)},
                     {"csv", csv_path.string()},
                     {"svg", svg_path.string()},
                     {"points", s.points.size()},
                     {"leaves", s.leaves},
                     {"depth_reached", s.depth_reached},
                     {"truncated", s.truncated},
                     {"drawn", doc.drawn},
                     {"clipped", doc.clipped}};
    try {
        const auto inv = generator_invariance(s, 3.0 * c.prune_eps, 100, c.seed);
        j["invariance"] = {{"tolerance", inv.tolerance},
                           {"worst", {round9(inv.worst[0]), round9(inv.worst[1]), round9(inv.worst[2]),
                                      round9(inv.worst[3])}},
                           {"misses", {inv.misses[0], inv.misses[1], inv.misses[2], inv.misses[3]}},
                           {"pass", inv.pass}};
    } catch (const Error& e) {
        j["invariance"] = error_json(e);
    }
    out << j.dump(2) << '\n';
    return 0;
}

} // namespace detail

/// Runs the CLI with the given arguments; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Maskit slice: cusps, pleating rays, pleating-coordinate grids and limit sets", "maskit"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string save_config;
    app.add_option("--config", config_path, "Read settings from a key = value file");
    app.add_option("--save-config", save_config, "Write the effective settings to this file");

    // Flags map one-to-one onto config keys and override the config file.
    const std::vector<std::pair<std::string, std::string>> flag_keys{
        {"--tol", "tol"},
        {"--realness-tol", "realness_tol"},
        {"--lambda-tol", "lambda_tol"},
        {"--q-max", "q_max"},
        {"--boundary-depth", "boundary_depth"},
        {"--t-max", "t_max"},
        {"--samples", "samples"},
        {"--min-gap", "min_gap"},
        {"--lengths", "lengths"},
        {"--strip", "strip"},
        {"--depth", "depth"},
        {"--max-depth", "max_depth"},
        {"--prune-eps", "prune_eps"},
        {"--max-points", "max_points"},
        {"--viewport", "viewport"},
        {"--out", "out"},
        {"--seed", "seed"},
    };
    std::map<std::string, std::string> flag_values;
    std::vector<std::pair<CLI::Option*, std::string>> flag_options;
    for (const auto& [flag, key] : flag_keys) {
        flag_options.emplace_back(app.add_option(flag, flag_values[key], "config key " + key), key);
    }

    std::string slope_text, mu_text, direction;
    std::vector<std::string> values;
    auto* cusp = app.add_subcommand("cusp", "Cusp of a rational pleating ray (tr W = 2)");
    cusp->add_option("slope", slope_text, "p/q")->required();
    auto* ray = app.add_subcommand("ray", "Trace a pleating ray to CSV");
    ray->add_option("slope", slope_text, "p/q")->required();
    auto* grid = app.add_subcommand("grid", "Pleating-coordinate grid as SVG and JSON");
    auto* coords = app.add_subcommand("coords", "Convert between mu and pleating coordinates");
    coords->add_option("direction", direction, "to-mu or from-mu")->required();
    coords->add_option("values", values, "lambda length | re im")->required();
    auto* limitset = app.add_subcommand("limitset", "Limit-set point cloud as CSV and SVG");
    limitset->add_option("mu", mu_text, "a+bi")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    RunConfig c;
    try {
        if (!config_path.empty()) {
            c = load_config(config_path);
        }
        for (const auto& [opt, key] : flag_options) {
            if (opt->count() > 0) {
                const std::string& v = flag_values[key];
                set_config_value(c, key, (key == "lengths" && v == "none") ? std::string() : v);
            }
        }
        validate(c);
        if (!save_config.empty()) {
            std::ofstream f(save_config, std::ios::binary);
            f << serialize(c);
            if (!f) {
                throw Error(ErrorKind::io, "cannot write config file '" + save_config + "'");
            }
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.kind() == ErrorKind::io ? 1 : 2;
    }

    try {
        if (cusp->parsed()) {
            return detail::cmd_cusp(slope_text, c, out);
        }
        if (ray->parsed()) {
            return detail::cmd_ray(slope_text, c, out);
        }
        if (grid->parsed()) {
            return detail::cmd_grid(c, out, err);
        }
        if (coords->parsed()) {
            return detail::cmd_coords(direction, values, c, out);
        }
        if (limitset->parsed()) {
            return detail::cmd_limitset(mu_text, c, out, err);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        const int code = detail::exit_code(e.kind());
        if (code == 1) {
            out << detail::error_json(e).dump(2) << '\n';
        }
        return code;
    }
    return 2;
}

} // namespace maskit
