#include "cdnozzle/config.hpp"
#include "cdnozzle/errors.hpp"
#include "cdnozzle/output.hpp"
#include "cdnozzle/runner.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

using namespace cdnozzle;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kConfigs = CDNOZZLE_CONFIG_DIR;

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::string bundled(const char* name)
{
    return slurp(fs::path(kConfigs) / name);
}

fs::path scratch(const std::string& tag)
{
    const fs::path p = fs::temp_directory_path() / ("cdnozzle_cli_" + std::to_string(::getpid()) + "_" + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string binary()
{
    const char* b = std::getenv("NOZZLE_CD_BIN");
    return b ? b : "";
}

// exit status of `nozzle_cd args`, stdout and stderr to files in dir
int run_cli(const std::string& args, const fs::path& dir)
{
    const std::string cmd = "\"" + binary() + "\" " + args + " > \"" + (dir / "stdout.txt").string() + "\" 2> \"" +
                            (dir / "stderr.txt").string() + "\"";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string with_replaced(std::string text, const std::string& from, const std::string& to)
{
    const size_t k = text.find(from);
    if (k != std::string::npos)
        text.replace(k, from.size(), to);
    return text;
}

std::string config_error(const std::string& text)
{
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

void expect_same_profile(const Profile& a, const Profile& b)
{
    EXPECT_EQ(a.origin(), b.origin());
    EXPECT_EQ(a.scale(), b.scale());
    // same numbers reached along two different scaling paths
    const size_t n = std::max(a.coeffs().size(), b.coeffs().size());
    for (size_t k = 0; k < n; ++k) {
        const double x = k < a.coeffs().size() ? a.coeffs()[k] : 0.0;
        const double y = k < b.coeffs().size() ? b.coeffs()[k] : 0.0;
        EXPECT_NEAR(x, y, 1e-14 * std::max(1.0, std::abs(y))) << "coefficient " << k;
    }
}

}  // namespace

TEST(Config, BackgroundBundle)
{
    const ProblemConfig c = parse_config(bundled("background.cfg"));
    EXPECT_EQ(perturbation_size(c.problem).total, 0.0);
    EXPECT_EQ(c.mode, Mode::solve);
    EXPECT_EQ(c.domain.n1, 65);
    EXPECT_DOUBLE_EQ(c.solver.tol_q_rel, 1e-9);
}

TEST(Config, ReferenceBundleMatchesReferenceProblem)
{
    const ProblemConfig c = parse_config(bundled("reference_sigma1e-2.cfg"));
    const PhysicalProblem ref = cdnozzle::testing::reference_problem(1e-2);
    EXPECT_NEAR(perturbation_size(c.problem).total, 1e-2, 1e-15);
    expect_same_profile(c.problem.geometry.wall_upper, ref.geometry.wall_upper);
    expect_same_profile(c.problem.geometry.wall_lower, ref.geometry.wall_lower);
    expect_same_profile(c.problem.data.exit_angle, ref.data.exit_angle);
    expect_same_profile(c.problem.data.upper.a, ref.data.upper.a);
    expect_same_profile(c.problem.data.upper.b, ref.data.upper.b);
    expect_same_profile(c.problem.data.upper.j, ref.data.upper.j);
    expect_same_profile(c.problem.data.lower.a, ref.data.lower.a);
    expect_same_profile(c.problem.data.lower.b, ref.data.lower.b);
    expect_same_profile(c.problem.data.lower.j, ref.data.lower.j);
    ASSERT_EQ(c.amplitudes.size(), 3u);
    EXPECT_EQ(c.grids, (std::vector<int>{33, 65, 129}));
}

TEST(Config, BadGammaNamesTheField)
{
    const std::string msg = config_error(with_replaced(bundled("background.cfg"), "\"gamma\": 1.4", "\"gamma\": 0.9"));
    EXPECT_NE(msg.find("gas.gamma"), std::string::npos) << msg;
}

TEST(Config, UnknownKeysRejected)
{
    std::string msg = config_error(with_replaced(bundled("background.cfg"), "\"n1\": 65", "\"n1\": 65, \"nodes\": 3"));
    EXPECT_NE(msg.find("numerics.nodes"), std::string::npos) << msg;
    msg = config_error(with_replaced(bundled("background.cfg"), "\"gas\"", "\"solver\": {}, \"gas\""));
    EXPECT_NE(msg.find("solver"), std::string::npos) << msg;
    msg = config_error(with_replaced(bundled("reference_sigma1e-2.cfg"), "\"scale\": 1.0", "\"scal\": 1.0"));
    EXPECT_NE(msg.find("geometry.wall_upper.scal"), std::string::npos) << msg;
}

TEST(Config, TolerancesMustBePositive)
{
    for (const char* key : {"picard_tol", "tol_q_rel"}) {
        const std::string text = with_replaced(bundled("background.cfg"), std::string("\"") + key + "\": 1e-",
                                               std::string("\"") + key + "\": -1e-");
        const std::string msg = config_error(text);
        EXPECT_NE(msg.find(std::string("numerics.") + key), std::string::npos) << msg;
    }
    const std::string msg =
        config_error(with_replaced(bundled("background.cfg"), "\"alpha\": 0.5", "\"alpha\": 0.5, \"closure_tol\": 0"));
    EXPECT_NE(msg.find("numerics.closure_tol"), std::string::npos) << msg;
}

TEST(Config, MalformedInputs)
{
    EXPECT_NE(config_error("{ not json"), "");
    EXPECT_NE(config_error("[]"), "");
    const std::string msg = config_error(with_replaced(bundled("background.cfg"), "\"u\": 0.7},\n    \"pressure\": 1.0", "\"u\": 0.7}"));
    EXPECT_NE(msg.find("background.pressure"), std::string::npos) << msg;
    EXPECT_NE(config_error(with_replaced(bundled("background.cfg"), "\"n1\": 65", "\"n1\": 6.5")), "");
    EXPECT_NE(config_error(with_replaced(bundled("background.cfg"), "\"solve\"", "\"explore\"")), "");
}

TEST(Config, AmplitudesAndGrids)
{
    EXPECT_NO_THROW(validate_amplitudes({1e-2, 5e-3, 0.0}));
    EXPECT_THROW(validate_amplitudes({5e-3, 1e-2}), ConfigError);
    EXPECT_THROW(validate_amplitudes({1e-2, 1e-2}), ConfigError);
    EXPECT_THROW(validate_amplitudes({0.0, 1e-3}), ConfigError);
    EXPECT_THROW(validate_amplitudes({1e-2, -1e-3}), ConfigError);
    EXPECT_THROW(validate_amplitudes({}), ConfigError);
    EXPECT_NO_THROW(validate_grids({33, 65}));
    EXPECT_THROW(validate_grids({65, 33}), ConfigError);
    EXPECT_THROW(validate_grids({3}), ConfigError);
}

TEST(Config, ZeroSigmaIsTheBackground)
{
    const ProblemConfig c = parse_config(bundled("reference_sigma1e-2.cfg"));
    EXPECT_EQ(perturbation_size(problem_at_sigma(c, 0.0)).total, 0.0);
    EXPECT_NEAR(perturbation_size(problem_at_sigma(c, 3e-3)).total, 3e-3, 1e-16);
}

TEST(Runner, SweepRatiosAndZeroRow)
{
    ProblemConfig c = parse_config(bundled("reference_sigma1e-2.cfg"));
    c.domain.n1 = c.domain.n2 = 33;
    const SweepResult s = run_sweep(c, {1e-2, 5e-3, 2.5e-3, 0.0});
    ASSERT_FALSE(s.failed) << s.error;
    ASSERT_EQ(s.rows.size(), 4u);
    double lo = 1e300, hi = 0.0, glo = 1e300, ghi = 0.0;
    for (int k = 0; k < 3; ++k) {
        const SweepRow& r = s.rows[k];
        EXPECT_NEAR(r.sigma, r.amplitude, 1e-15);
        lo = std::min(lo, r.state_deviation / r.sigma);
        hi = std::max(hi, r.state_deviation / r.sigma);
        glo = std::min(glo, r.g_sup / r.sigma);
        ghi = std::max(ghi, r.g_sup / r.sigma);
    }
    EXPECT_LE((hi - lo) / lo, 0.25);
    EXPECT_LE((ghi - glo) / glo, 0.25);
    const SweepRow& z = s.rows[3];
    EXPECT_EQ(z.sigma, 0.0);
    EXPECT_EQ(z.g_sup, 0.0);
    EXPECT_EQ(z.g_weighted, 0.0);
    EXPECT_EQ(z.outer_iterations, 0);
    // the background state comes back up to round-off only
    EXPECT_LE(z.state_deviation, 1e-12);
}

TEST(Runner, SweepFailureKeepsCompletedRows)
{
    ProblemConfig c = parse_config(bundled("reference_sigma1e-2.cfg"));
    c.domain.n1 = c.domain.n2 = 17;
    c.solver.max_iters = 1;
    // zero needs no step; any positive amplitude needs two
    const SweepResult s = run_sweep(c, {1e-2});
    EXPECT_TRUE(s.failed);
    EXPECT_EQ(s.error_kind, ErrorKind::convergence);
    EXPECT_TRUE(s.rows.empty());
    const SweepResult z = run_sweep(c, {0.0});
    EXPECT_FALSE(z.failed);
    EXPECT_EQ(z.rows.size(), 1u);
    const json j = json::parse(sweep_json(s));
    EXPECT_FALSE(j["complete"].get<bool>());
    EXPECT_EQ(j["error"]["amplitude"].get<double>(), 1e-2);
    EXPECT_EQ(sweep_csv(s), std::string(kSweepHeader) + "\n");
}

TEST(Runner, ExitCodes)
{
    EXPECT_EQ(exit_code(ErrorKind::config), 2);
    EXPECT_EQ(exit_code(ErrorKind::closure), 3);
    EXPECT_EQ(exit_code(ErrorKind::range), 3);
    EXPECT_EQ(exit_code(ErrorKind::convergence), 4);
    EXPECT_EQ(exit_code(ErrorKind::numeric), 4);
    EXPECT_EQ(exit_code(ErrorKind::consistency), 5);
}

TEST(Output, SvgIsSelfContained)
{
    const std::string svg = svg_line_plot("a < b & c", "x", "y", {{"s", {0.0, 1.0}, {2.0, 2.0}}});
    EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
    EXPECT_NE(svg.find("a &lt; b &amp; c"), std::string::npos);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST(Cli, BackgroundSolve)
{
    ASSERT_FALSE(binary().empty());
    const fs::path dir = scratch("bg");
    ASSERT_EQ(run_cli("solve \"" + kConfigs + "/background.cfg\" --out \"" + dir.string() + "\"", dir), 0)
        << slurp(dir / "stderr.txt");
    const json r = json::parse(slurp(dir / "report.json"));
    EXPECT_EQ(r["sigma"].get<double>(), 0.0);
    EXPECT_TRUE(r["convergence"]["converged"].get<bool>());
    EXPECT_LE(r["convergence"]["outer_iterations"].get<int>(), 1);
    const json& res = r["residuals"];
    for (const char* k : {"q_max", "pressure_jump", "tangency_upper", "tangency_lower", "wall_defect_upper",
                          "wall_defect_lower"})
        EXPECT_LE(res[k].get<double>(), 1e-10) << k;
    EXPECT_LE(res["conservation_upper"]["max_mass_defect"].get<double>(), 1e-10);
    EXPECT_LE(res["conservation_lower"]["max_slip"].get<double>(), 1e-10);
    EXPECT_LE(r["norms"]["state_deviation_sup"].get<double>(), 1e-10);
    EXPECT_EQ(r["norms"]["g_cd_sup"].get<double>(), 0.0);
    EXPECT_EQ(r.find("timing"), r.end());
}

TEST(Cli, ReferenceSolveAndOutputs)
{
    const fs::path dir = scratch("ref");
    const fs::path again = scratch("ref2");
    const std::string cfg = "\"" + kConfigs + "/reference_sigma1e-2.cfg\"";
    ASSERT_EQ(run_cli("solve " + cfg + " --out \"" + dir.string() + "\"", dir), 0) << slurp(dir / "stderr.txt");
    ASSERT_EQ(run_cli("solve " + cfg + " --out \"" + again.string() + "\" --threads 2", again), 0);

    const json r = json::parse(slurp(dir / "report.json"));
    EXPECT_NEAR(r["sigma"].get<double>(), 1e-2, 1e-15);
    const std::vector<double> h = r["convergence"]["residual_history"].get<std::vector<double>>();
    ASSERT_GE(h.size(), 2u);
    for (size_t k = 2; k < h.size(); ++k)
        EXPECT_LT(h[k], h[k - 1]);
    EXPECT_LE(h.back(), r["convergence"]["tol_q"].get<double>());

    for (const char* f : {"fields_upper.csv", "fields_lower.csv", "interface.csv", "report.json", "interface.svg",
                          "pressure_jump.svg"})
        EXPECT_EQ(slurp(dir / f), slurp(again / f)) << f << " differs between identical runs";

    auto first_line = [](const std::string& s) { return s.substr(0, s.find('\n')); };
    const std::string up = slurp(dir / "fields_upper.csv");
    EXPECT_EQ(first_line(up), kFieldsHeader);
    EXPECT_EQ(std::count(up.begin(), up.end(), '\n'), 65 * 65 + 1);
    EXPECT_EQ(first_line(slurp(dir / "fields_lower.csv")), kFieldsHeader);
    const std::string itf = slurp(dir / "interface.csv");
    EXPECT_EQ(first_line(itf), kInterfaceHeader);
    EXPECT_EQ(std::count(itf.begin(), itf.end(), '\n'), 65 + 1);
}

TEST(Cli, ConfigErrorsExitTwo)
{
    const fs::path dir = scratch("bad");
    const fs::path cfg = dir / "gamma.cfg";
    write_file(cfg.string(), with_replaced(bundled("background.cfg"), "\"gamma\": 1.4", "\"gamma\": 0.9"));
    EXPECT_EQ(run_cli("solve \"" + cfg.string() + "\" --out \"" + (dir / "o").string() + "\"", dir), 2);
    EXPECT_NE(slurp(dir / "stderr.txt").find("gas.gamma"), std::string::npos);
    EXPECT_EQ(run_cli("solve \"" + (dir / "missing.cfg").string() + "\"", dir), 2);
    EXPECT_EQ(run_cli("sweep \"" + kConfigs + "/reference_sigma1e-2.cfg\" --amps 1e-3,2e-3 --out \"" +
                          (dir / "o").string() + "\"",
                      dir),
              2);
    EXPECT_NE(slurp(dir / "stderr.txt").find("descending"), std::string::npos);
}

TEST(Cli, SweepAndRefineTables)
{
    const fs::path dir = scratch("sweep");
    const fs::path cfg = dir / "coarse.cfg";
    std::string text = bundled("reference_sigma1e-2.cfg");
    text = with_replaced(text, "\"n1\": 65, \"n2\": 65", "\"n1\": 33, \"n2\": 33");
    write_file(cfg.string(), text);
    ASSERT_EQ(run_cli("sweep \"" + cfg.string() + "\" --amps 1e-2,5e-3,2.5e-3,0 --out \"" + dir.string() + "\"", dir),
              0)
        << slurp(dir / "stderr.txt");
    const std::string csv = slurp(dir / "sweep.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), kSweepHeader);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 5);
    const json s = json::parse(slurp(dir / "sweep.json"));
    EXPECT_TRUE(s["complete"].get<bool>());
    EXPECT_LE(s["state_ratio_spread"].get<double>(), 0.25);
    EXPECT_LE(s["g_ratio_spread"].get<double>(), 0.25);

    ASSERT_EQ(run_cli("refine \"" + cfg.string() + "\" --grids 17,33 --out \"" + dir.string() + "\"", dir), 0)
        << slurp(dir / "stderr.txt");
    const std::string rc = slurp(dir / "refine.csv");
    EXPECT_EQ(rc.substr(0, rc.find('\n')), kRefineHeader);
    const json rj = json::parse(slurp(dir / "refine.json"));
    ASSERT_EQ(rj["rows"].size(), 2u);
    ASSERT_EQ(rj["orders"].size(), 1u);
    EXPECT_GT(rj["orders"][0]["tangency"].get<double>(), 1.0);
}
