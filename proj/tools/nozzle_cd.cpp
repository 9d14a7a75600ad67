#include "cdnozzle/config.hpp"
#include "cdnozzle/output.hpp"
#include "cdnozzle/runner.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <chrono>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

using namespace cdnozzle;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int do_solve(const ProblemConfig& c, const std::string& out)
{
    const auto t0 = std::chrono::steady_clock::now();
    const RunResult r = run_solve(c.problem, c.domain, c.solver);
    write_solve_outputs(out, r);
    const ConvergenceReport& rep = r.sol.report;
    std::printf("solve: sigma %.6g, %d outer iterations, |Q| %.3e (tol %.3e), |g_cd| %.6g, max Mach %.4f\n",
                r.sigma, rep.iterations, r.sol.residual.max_norm, rep.tol_q, r.norms.g_sup, r.max_mach);
    std::printf("       pressure jump %.3e, tangency %.3e / %.3e, wall defect %.3e / %.3e\n",
                r.rh.max_pressure_jump, r.rh.max_tangency_upper, r.rh.max_tangency_lower, r.upper.wall_defect,
                r.lower.wall_defect);
    std::printf("       %.2f s, outputs in %s\n", seconds_since(t0), out.c_str());
    return 0;
}

int do_refine(const ProblemConfig& c, const std::vector<int>& grids, const std::string& out)
{
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<RefineRow> rows = run_refine(c, grids);
    write_refine_outputs(out, rows);
    std::printf("%6s %5s %12s %12s %12s %12s %12s\n", "n", "outer", "p_jump", "tangency", "mass", "wall", "transport");
    for (const RefineRow& r : rows)
        std::printf("%6d %5d %12.3e %12.3e %12.3e %12.3e %12.3e\n", r.n, r.outer_iterations, r.pressure_jump,
                    r.tangency, r.mass_defect, r.wall_defect, r.transport);
    std::printf("refine: %.2f s, outputs in %s\n", seconds_since(t0), out.c_str());
    return 0;
}

int do_sweep(const ProblemConfig& c, const std::vector<double>& amps, const std::string& out)
{
    const auto t0 = std::chrono::steady_clock::now();
    const SweepResult s = run_sweep(c, amps);
    write_sweep_outputs(out, s);
    std::printf("%12s %12s %14s %12s %6s\n", "amplitude", "sigma", "|U-U_b|/sigma", "|g|/sigma", "outer");
    for (const SweepRow& r : s.rows) {
        const double sr = r.sigma > 0.0 ? r.state_deviation / r.sigma : 0.0;
        const double gr = r.sigma > 0.0 ? r.g_sup / r.sigma : 0.0;
        std::printf("%12.4e %12.4e %14.6g %12.6g %6d\n", r.amplitude, r.sigma, sr, gr, r.outer_iterations);
    }
    std::printf("sweep: %.2f s, outputs in %s\n", seconds_since(t0), out.c_str());
    if (s.failed) {
        std::fprintf(stderr, "sweep stopped at amplitude %g: %s\n", s.failed_amplitude, s.error.c_str());
        return exit_code(s.error_kind);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"steady two-layer subsonic nozzle flow with a contact discontinuity"};
    app.require_subcommand(1);
    std::string out = "out";
    int threads = 0;
    app.add_option("--out", out, "output directory");
    app.add_option("--threads", threads, "OpenMP threads (0: runtime default)")->check(CLI::NonNegativeNumber);

    std::string cfg;
    auto* solve = app.add_subcommand("solve", "one free-boundary solve");
    solve->add_option("config", cfg, "config file")->required();
    auto* refine = app.add_subcommand("refine", "refinement study");
    refine->add_option("config", cfg, "config file")->required();
    std::vector<int> grids;
    refine->add_option("--grids", grids, "nodes per direction, ascending")->delimiter(',');
    auto* sweep = app.add_subcommand("sweep", "perturbation-size sweep");
    sweep->add_option("config", cfg, "config file")->required();
    std::vector<double> amps;
    sweep->add_option("--amps", amps, "target sigma values, strictly descending")->delimiter(',');
    auto* run = app.add_subcommand("run", "run the experiment named in the config");
    run->add_option("config", cfg, "config file")->required();
    for (auto* sub : {solve, refine, sweep, run}) {
        sub->add_option("--out", out, "output directory");
        sub->add_option("--threads", threads, "OpenMP threads")->check(CLI::NonNegativeNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    if (threads > 0)
        omp_set_num_threads(threads);

    try {
        const ProblemConfig c = load_config(cfg);
        Mode mode = c.mode;
        if (*solve)
            mode = Mode::solve;
        else if (*refine)
            mode = Mode::refine;
        else if (*sweep)
            mode = Mode::sweep;
        switch (mode) {
        case Mode::solve: return do_solve(c, out);
        case Mode::refine: {
            if (!grids.empty())
                validate_grids(grids);
            return do_refine(c, grids.empty() ? c.grids : grids, out);
        }
        case Mode::sweep: {
            if (!amps.empty())
                validate_amplitudes(amps);
            return do_sweep(c, amps.empty() ? c.amplitudes : amps, out);
        }
        }
    } catch (const SolverError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
