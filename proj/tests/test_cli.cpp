#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "maskit/cli.hpp"

using namespace maskit;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run_cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "maskit");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name)
{
    const auto d = fs::temp_directory_path() / ("maskit_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> csv_rows(const fs::path& p)
{
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(p));
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ',')) {
            cells.push_back(c);
        }
        rows.push_back(cells);
    }
    return rows;
}

std::vector<fs::path> files_with_extension(const fs::path& dir, const std::string& ext)
{
    std::vector<fs::path> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() == ext) {
            out.push_back(e.path());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

TEST(Config, SerializeParseRoundTrip)
{
    RunConfig c;
    c.tol = 3.5e-11;
    c.q_max = 7;
    c.lengths = {0.1, 3};
    c.strip_lo = -1;
    c.viewport = Viewport{-1, 2, 0, 3.25};
    c.out = "some/dir";
    const std::string text = serialize(c);
    const RunConfig back = parse_config(text);
    EXPECT_EQ(serialize(back), text);
    EXPECT_EQ(back.tol, c.tol);
    EXPECT_EQ(back.lengths, c.lengths);
    ASSERT_TRUE(back.viewport);
    EXPECT_EQ(back.viewport->y_max, 3.25);
}

TEST(Config, NumbersAreShortestExact)
{
    EXPECT_NE(serialize(RunConfig{}).find("realness_tol = 1e-09\n"), std::string::npos);
    RunConfig c;
    c.tol = 0.1 + 0.2;
    EXPECT_EQ(parse_config(serialize(c)).tol, c.tol);
}

TEST(Config, CommentsBlankLinesAndPartialDocuments)
{
    const auto c = parse_config("# header\n\n q_max = 5  # inline\nlengths =\n");
    EXPECT_EQ(c.q_max, 5);
    EXPECT_TRUE(c.lengths.empty());
    EXPECT_EQ(c.tol, RunConfig{}.tol);
}

TEST(Config, RejectsBadDocuments)
{
    EXPECT_THROW(parse_config("nonsense"), Error);
    EXPECT_THROW(parse_config("colour = red"), Error);
    EXPECT_THROW(parse_config("tol = abc"), Error);
    EXPECT_THROW(parse_config("tol = -1"), Error);
    EXPECT_THROW(parse_config("q_max = 0"), Error);
    EXPECT_THROW(parse_config("q_max = 2.5"), Error);
    EXPECT_THROW(parse_config("strip = 2,0"), Error);
    EXPECT_THROW(parse_config("strip = 1"), Error);
    EXPECT_THROW(parse_config("viewport = 0,1,2"), Error);
    EXPECT_THROW(parse_config("lengths = 1,-2"), Error);
    try {
        parse_config("colour = red");
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::parse);
    }
}

TEST(Config, HashIgnoresOutputDirectoryOnly)
{
    RunConfig a, b;
    b.out = "/elsewhere";
    EXPECT_EQ(config_hash(a), config_hash(b));
    EXPECT_EQ(config_hash(a).size(), 8u);
    b.tol = 1e-11;
    EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(ParseComplex, Forms)
{
    EXPECT_EQ(parse_complex("0+4i"), cplx(0, 4));
    EXPECT_EQ(parse_complex("1-2.5i"), cplx(1, -2.5));
    EXPECT_EQ(parse_complex("-1.5e-1+2e+1i"), cplx(-0.15, 20));
    EXPECT_EQ(parse_complex("3i"), cplx(0, 3));
    EXPECT_EQ(parse_complex("-i"), cplx(0, -1));
    EXPECT_EQ(parse_complex("2+i"), cplx(2, 1));
    EXPECT_EQ(parse_complex("2.5"), cplx(2.5, 0));
    for (const char* bad : {"", "i+", "1+2j", "1 + 2i", "abc", "1+2i3", "++2i"}) {
        EXPECT_THROW(parse_complex(bad), Error) << bad;
    }
}

TEST(Cli, CuspClosedForms)
{
    auto r = run_cli({"cusp", "0/1"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    EXPECT_NEAR(j["mu"][0].get<double>(), 0.0, 1e-9);
    EXPECT_NEAR(j["mu"][1].get<double>(), 2.0, 1e-9);

    r = run_cli({"cusp", "1/2"});
    ASSERT_EQ(r.code, 0);
    j = json::parse(r.out);
    EXPECT_NEAR(j["mu"][0].get<double>(), 1.0, 1e-9);
    EXPECT_NEAR(j["mu"][1].get<double>(), std::sqrt(3.0), 1e-8);
    EXPECT_EQ(j["mu_full"][1].get<std::string>().substr(0, 10), "1.73205080");
}

TEST(Cli, CuspNegativeSlopeIsPositional)
{
    const auto r = run_cli({"cusp", "-1/2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(json::parse(r.out)["mu"][0].get<double>(), -1.0, 1e-9);
}

TEST(Cli, CuspAtInfinityIsExitTwo)
{
    const auto r = run_cli({"cusp", "1/0"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("slope ∞ has constant trace 2; no cusp"), std::string::npos);
}

TEST(Cli, ParseErrorsAreExitTwo)
{
    EXPECT_EQ(run_cli({"cusp", "one/two"}).code, 2);
    EXPECT_EQ(run_cli({"cusp"}).code, 2);
    EXPECT_EQ(run_cli({}).code, 2);
    EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
    EXPECT_EQ(run_cli({"--tol", "x", "cusp", "1/2"}).code, 2);
    EXPECT_EQ(run_cli({"--q-max", "0", "grid"}).code, 2);
    EXPECT_EQ(run_cli({"coords", "sideways", "1", "2"}).code, 2);
    EXPECT_EQ(run_cli({"coords", "to-mu", "1"}).code, 2);
    EXPECT_EQ(run_cli({"limitset", "4 i"}).code, 2);
    EXPECT_EQ(run_cli({"limitset", "x+yi"}).code, 2);
    EXPECT_EQ(run_cli({"--config", "/nonexistent/maskit.cfg", "cusp", "1/2"}).code, 1);
}

TEST(Cli, RayClosedFormLines)
{
    const auto d = fresh_dir("ray");
    for (const auto& [slope, file, re] : {std::tuple{"0/1", "ray_0_1.csv", 0.0}, std::tuple{"1/1", "ray_1_1.csv", 2.0}}) {
        const auto r = run_cli({"--out", d.string(), "--t-max", "1000", "--samples", "30", "ray", slope});
        ASSERT_EQ(r.code, 0) << r.err;
        const auto rows = csv_rows(d / file);
        ASSERT_EQ(rows.size(), 30u);
        for (const auto& row : rows) {
            EXPECT_NEAR(std::stod(row[2]), re, 1e-9);
        }
    }
}

TEST(Cli, RaySamplingContract)
{
    const auto d = fresh_dir("ray_sampling");
    const auto r = run_cli({"ray", "1/2", "--t-max", "100", "--samples", "50", "--out", d.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = csv_rows(d / "ray_1_2.csv");
    ASSERT_EQ(rows.size(), 50u);
    EXPECT_EQ(std::stod(rows.front()[1]), 100.0);
    for (std::size_t k = 1; k < rows.size(); ++k) {
        EXPECT_LT(std::stod(rows[k][1]), std::stod(rows[k - 1][1]));
    }
    EXPECT_NEAR(std::stod(rows.back()[1]), 2.0, 1e-12);
    EXPECT_NEAR(std::stod(rows.back()[3]), std::sqrt(3.0), 1e-8);
}

TEST(Cli, GridSmallExample)
{
    const auto d = fresh_dir("grid_small");
    const auto r = run_cli({"--q-max", "2", "--lengths", "1", "--strip", "0,1", "--out", d.string(), "grid"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto svgs = files_with_extension(d, ".svg");
    ASSERT_EQ(svgs.size(), 1u);
    const std::string svg = slurp(svgs[0]);
    const std::regex ray(R"~(<polyline class="ray")~");
    EXPECT_EQ(std::distance(std::sregex_iterator(svg.begin(), svg.end(), ray), std::sregex_iterator()), 3);
    const auto j = json::parse(slurp(files_with_extension(d, ".json")[0]));
    ASSERT_EQ(j["boundary"].size(), 3u);
    EXPECT_NEAR(j["boundary"][1]["mu"][0].get<double>(), 1.0, 1e-9);
    EXPECT_NEAR(j["boundary"][1]["mu"][1].get<double>(), 1.7320508, 1e-7);
    EXPECT_NE(svg.find("1,1.73205081"), std::string::npos);
    EXPECT_NE(svg.find(R"(class="level")"), std::string::npos);
}

TEST(Cli, GridEmptyLengthsHasNoLevelCurves)
{
    const auto d = fresh_dir("grid_empty");
    const auto r = run_cli({"--q-max", "3", "--lengths", "none", "--out", d.string(), "grid"});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string svg = slurp(files_with_extension(d, ".svg")[0]);
    EXPECT_EQ(svg.find(R"(class="level")"), std::string::npos);
    EXPECT_NE(svg.find(R"(class="ray")"), std::string::npos);
}

TEST(Cli, GridIsByteDeterministicAndNamedByConfig)
{
    const auto a = fresh_dir("grid_det_a");
    const auto b = fresh_dir("grid_det_b");
    ASSERT_EQ(run_cli({"--q-max", "5", "--out", a.string(), "grid"}).code, 0);
    ASSERT_EQ(run_cli({"--q-max", "5", "--out", b.string(), "grid"}).code, 0);
    const auto fa = files_with_extension(a, ".svg");
    const auto fb = files_with_extension(b, ".svg");
    ASSERT_EQ(fa.size(), 1u);
    EXPECT_EQ(fa[0].filename(), fb[0].filename());
    EXPECT_EQ(slurp(fa[0]), slurp(fb[0]));
    EXPECT_EQ(slurp(files_with_extension(a, ".json")[0]), slurp(files_with_extension(b, ".json")[0]));
    RunConfig c;
    c.q_max = 5;
    EXPECT_EQ(fa[0].filename().string(), "grid_" + config_hash(c) + ".svg");
}

TEST(Cli, SavedConfigReproducesOutputs)
{
    const auto a = fresh_dir("cfg_a");
    const auto cfg = a / "run.cfg";
    ASSERT_EQ(run_cli({"--q-max", "4", "--lengths", "0.5,1.5", "--strip", "-1,1", "--save-config", cfg.string(),
                       "--out", a.string(), "grid"})
                  .code,
              0);
    const auto b = fresh_dir("cfg_b");
    ASSERT_EQ(run_cli({"--config", cfg.string(), "--out", b.string(), "grid"}).code, 0);
    const auto fa = files_with_extension(a, ".svg");
    const auto fb = files_with_extension(b, ".svg");
    ASSERT_EQ(fa.size(), 1u);
    ASSERT_EQ(fb.size(), 1u);
    EXPECT_EQ(fa[0].filename(), fb[0].filename());
    EXPECT_EQ(slurp(fa[0]), slurp(fb[0]));
}

TEST(Cli, FlagsOverrideConfigFile)
{
    const auto d = fresh_dir("precedence");
    {
        std::ofstream f(d / "c.cfg");
        f << "tol = 1e-6\nq_max = 3\n";
    }
    const auto saved = d / "effective.cfg";
    ASSERT_EQ(run_cli({"--config", (d / "c.cfg").string(), "--tol", "1e-12", "--save-config", saved.string(), "cusp",
                       "1/3"})
                  .code,
              0);
    const auto c = load_config(saved.string());
    EXPECT_EQ(c.tol, 1e-12);
    EXPECT_EQ(c.q_max, 3);
}

TEST(Cli, CoordsExamples)
{
    auto r = run_cli({"coords", "to-mu", "0", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    EXPECT_NEAR(j["mu"][0].get<double>(), 0.0, 1e-9);
    EXPECT_NEAR(j["mu"][1].get<double>(), 2.0 * std::cosh(0.5), 1e-8);

    r = run_cli({"coords", "from-mu", "2", "3"});
    ASSERT_EQ(r.code, 0) << r.err;
    j = json::parse(r.out);
    EXPECT_NEAR(j["lambda"].get<double>(), 1.0, 1e-9);
    EXPECT_NEAR(j["length"].get<double>(), 2.0 * std::acosh(1.5), 1e-8);
    EXPECT_NEAR(j["length"].get<double>(), 1.9248473, 1e-7);

    r = run_cli({"coords", "from-mu", "2+3i"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NEAR(json::parse(r.out)["lambda"].get<double>(), 1.0, 1e-9);

    r = run_cli({"coords", "to-mu", "0.6180339887", "1", "--depth", "8"});
    ASSERT_EQ(r.code, 0) << r.err;
    j = json::parse(r.out);
    EXPECT_FALSE(j["rational"].get<bool>());
    EXPECT_EQ(j["convergents"].size(), 8u);
    EXPECT_EQ(j["differences"].size(), 7u);
    EXPECT_TRUE(j["eventually_decreasing"].get<bool>());
}

TEST(Cli, CoordsNotLocalizedIsExitOne)
{
    const auto r = run_cli({"coords", "from-mu", "1", "1"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("not localized"), std::string::npos);
    EXPECT_EQ(json::parse(r.out)["error"], "not_localized");
}

TEST(Cli, LimitsetTranslationInvariant)
{
    const auto d = fresh_dir("limitset");
    const auto r = run_cli({"--out", d.string(), "limitset", "0+4i"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = json::parse(r.out);
    EXPECT_GT(j["points"].get<int>(), 0);
    EXPECT_TRUE(j["invariance"]["pass"].get<bool>());
    EXPECT_LE(j["invariance"]["worst"][1].get<double>(), 3e-3);

    // B-translation checked independently on the written CSV.
    const auto csv = files_with_extension(d, ".csv");
    ASSERT_EQ(csv.size(), 1u);
    std::vector<cplx> pts;
    for (const auto& row : csv_rows(csv[0])) {
        pts.emplace_back(std::stod(row[0]), std::stod(row[1]));
    }
    ASSERT_FALSE(pts.empty());
    // Near parabolic points on the real axis the depth cap leaves gaps wider
    // than 3 eps, so a small fraction of translates can miss.
    detail::PointIndex index(pts, 3e-3);
    std::size_t tested = 0, missed = 0;
    for (std::size_t k = 0; k < pts.size(); k += 17) {
        if (std::abs(pts[k].real()) <= 2) {
            ++tested;
            missed += index.nearest(pts[k] + 2.0) > 3e-3 ? 1 : 0;
        }
    }
    EXPECT_GT(tested, 1000u);
    EXPECT_LE(static_cast<double>(missed), 0.005 * static_cast<double>(tested));
}

TEST(Cli, LimitsetNamingAtCusp)
{
    const auto d = fresh_dir("limitset_name");
    RunConfig c;
    c.max_depth = 8;
    const auto r = run_cli({"--max-depth", "8", "--out", d.string(), "limitset", "1+1.7320508075688772i"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(d / ("limitset_1_1.73205081_" + config_hash(c) + ".svg")));
    EXPECT_TRUE(fs::exists(d / ("limitset_1_1.73205081_" + config_hash(c) + ".csv")));
    const std::string first = slurp(d / ("limitset_1_1.73205081_" + config_hash(c) + ".svg"));
    ASSERT_EQ(run_cli({"--max-depth", "8", "--out", d.string(), "limitset", "1+1.7320508075688772i"}).code, 0);
    EXPECT_EQ(slurp(d / ("limitset_1_1.73205081_" + config_hash(c) + ".svg")), first);
}

TEST(Cli, LimitsetTruncationWarnsButSucceeds)
{
    const auto d = fresh_dir("limitset_cap");
    const auto r = run_cli({"--max-points", "500", "--out", d.string(), "limitset", "0+4i"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.err.find("truncated"), std::string::npos);
    EXPECT_TRUE(json::parse(r.out)["truncated"].get<bool>());
}
