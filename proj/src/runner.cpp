#include "cdnozzle/runner.hpp"

#include "cdnozzle/norms.hpp"

#include <algorithm>
#include <cmath>

namespace cdnozzle {

RunResult run_solve(const PhysicalProblem& p, const DomainSettings& ds, const FreeBoundarySettings& fs)
{
    RunResult r;
    r.sigma_terms = perturbation_size(p, ds.alpha);
    r.sigma = r.sigma_terms.total;
    r.dom = build_lagrangian_domain(p, ds);
    r.sol = solve_free_boundary(r.dom, fs);
    const std::vector<double>& g = r.sol.curve.g;
    r.upper = inverse_map(r.dom.upper, r.sol.upper, g, p.geometry);
    r.lower = inverse_map(r.dom.lower, r.sol.lower, g, p.geometry);
    r.rh = rh_residuals(r.upper, r.lower, r.sol.curve);
    r.conservation_upper = conservation_residuals(r.upper, r.dom.upper.mass_flux, p.geometry.wall_upper);
    r.conservation_lower = conservation_residuals(r.lower, r.dom.lower.mass_flux, p.geometry.wall_lower);
    r.transport_upper = streamline_transport(r.upper);
    r.transport_lower = streamline_transport(r.lower);

    const double a = ds.alpha;
    const Exec ex = fs.layer.exec;
    r.norms.phi_upper = discrete_weighted_norm(r.sol.upper.phi, r.dom.upper.grid, 2, a, -1.0 - a, ex);
    r.norms.phi_lower = discrete_weighted_norm(r.sol.lower.phi, r.dom.lower.grid, 2, a, -1.0 - a, ex);
    r.norms.g_weighted = weighted_norm_1d(r.sol.curve.y1, g, 2, a, -1.0 - a).total;
    for (double v : g)
        r.norms.g_sup = std::max(r.norms.g_sup, std::abs(v));
    r.norms.state_deviation =
        std::max(state_deviation(r.upper, r.dom.background.upper), state_deviation(r.lower, r.dom.background.lower));
    r.max_mach = std::max(max_mach(r.upper), max_mach(r.lower));
    const BackgroundSolution& bg = r.dom.background;
    r.background_max_mach = std::max(bg.upper.state.mach(bg.gamma), bg.lower.state.mach(bg.gamma));
    return r;
}

RefineRow refine_row(const RunResult& r)
{
    RefineRow row;
    row.n = r.dom.upper.n1();
    row.outer_iterations = r.sol.report.iterations;
    row.q_norm = r.sol.residual.max_norm;
    row.pressure_jump = r.rh.max_pressure_jump;
    row.tangency = std::max(r.rh.max_tangency_upper, r.rh.max_tangency_lower);
    row.mass_defect = std::max(r.conservation_upper.max_mass_defect, r.conservation_lower.max_mass_defect);
    row.slip = std::max(r.conservation_upper.max_slip, r.conservation_lower.max_slip);
    row.wall_defect = std::max(r.upper.wall_defect, r.lower.wall_defect);
    row.transport = std::max({r.transport_upper.a_residual, r.transport_upper.b_residual,
                              r.transport_lower.a_residual, r.transport_lower.b_residual});
    return row;
}

std::vector<RefineRow> run_refine(const ProblemConfig& c, const std::vector<int>& grids)
{
    validate_grids(grids);
    std::vector<RefineRow> rows;
    for (int n : grids) {
        DomainSettings ds = c.domain;
        ds.n1 = n;
        ds.n2 = n;
        rows.push_back(refine_row(run_solve(c.problem, ds, c.solver)));
    }
    return rows;
}

SweepResult run_sweep(const ProblemConfig& c, const std::vector<double>& amplitudes)
{
    validate_amplitudes(amplitudes);
    SweepResult out;
    for (double amp : amplitudes) {
        try {
            const RunResult r = run_solve(problem_at_sigma(c, amp), c.domain, c.solver);
            SweepRow row;
            row.amplitude = amp;
            row.sigma = r.sigma;
            row.state_deviation = r.norms.state_deviation;
            row.g_sup = r.norms.g_sup;
            row.g_weighted = r.norms.g_weighted;
            row.outer_iterations = r.sol.report.iterations;
            out.rows.push_back(row);
        } catch (const SolverError& e) {
            out.failed = true;
            out.error_kind = e.kind();
            out.failed_amplitude = amp;
            out.error = e.what();
            break;
        }
    }
    return out;
}

}  // namespace cdnozzle
