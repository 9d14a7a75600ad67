#include "cdnozzle/interface_solver.hpp"

#include "cdnozzle/errors.hpp"
#include "cdnozzle/norms.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <memory>
#include <sstream>

namespace cdnozzle {

InterfaceCurve InterfaceCurve::flat(const std::vector<double>& y1)
{
    return {y1, std::vector<double>(y1.size(), 0.0), std::vector<double>(y1.size(), 0.0)};
}

InterfaceCurve InterfaceCurve::from_curve(const std::vector<double>& y1, std::vector<double> g)
{
    InterfaceCurve c;
    c.y1 = y1;
    c.eta = derivative(y1, g);
    c.g = std::move(g);
    return c;
}

namespace {

std::vector<double> trace_pressure(const LayerData& d, const StreamField& f)
{
    const int n1 = d.n1();
    std::vector<double> row(n1);
    for (int i = 0; i < n1; ++i)
        row[i] = f.phi(i, 0);
    const std::vector<double> d1 = derivative(d.grid.y1, row);
    const std::vector<double> dt = neumann_trace(f.phi, d.grid, Side::bottom);
    std::vector<double> p(n1);
    for (int i = 0; i < n1; ++i) {
        const StreamGradient g{d1[i], d.base_gradient() + dt[i]};
        const double rho =
            density_from_stream(g, d.a_en[0], d.b_en[0], d.gamma, d.closure, d.background.state.rho);
        p[i] = flux_w_at(rho, g, d.a_en[0], d.gamma).w2;
    }
    return p;
}

double controlled_norm(const std::vector<double>& q)
{
    double m = 0.0;
    for (size_t i = 1; i < q.size(); ++i)
        m = std::max(m, std::abs(q[i]));
    return m;
}

}  // namespace

InterfaceResidual pressure_jump(const LagrangianDomain& dom, const StreamField& upper, const StreamField& lower)
{
    const std::vector<double> pu = trace_pressure(dom.upper, upper);
    const std::vector<double> pl = trace_pressure(dom.lower, lower);
    InterfaceResidual r;
    r.q.resize(pu.size());
    for (size_t i = 0; i < pu.size(); ++i)
        r.q[i] = pu[i] - pl[i];
    r.max_norm = controlled_norm(r.q);
    r.corner = r.q[0];
    r.weighted_norm = weighted_norm_1d(dom.upper.grid.y1, r.q, 1, dom.alpha, -dom.alpha).total;
    return r;
}

Eigen::MatrixXd dirichlet_to_trace(const LayerGrid& g, double e1, double e2, const SolveOptions& opt)
{
    const int n1 = g.n1(), n2 = g.n2();
    const CoefficientField c = CoefficientField::constant(g, e1, e2);
    MixedBvp bvp = MixedBvp::layer(std::vector<double>(n2, 0.0), std::vector<double>(n2, 0.0),
                                   std::vector<double>(n1, 0.0), std::vector<double>(n1, 0.0));
    const LinearSystem sys = assemble(g, c, bvp);
    const Factorization lu(sys);
    const Stencil3 s = one_sided_stencil(g.y2, 0, true);
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n1 - 1, n1 - 1);
    for (int col = 1; col < n1; ++col) {
        bvp.bottom.values.assign(n1, 0.0);
        bvp.bottom.values[col] = 1.0;
        GridField dir = sys.dirichlet;
        dir(col, 0) = 1.0;
        const GridField phi = solve_with(sys, lu, assemble_rhs(g, c, bvp), dir, opt);
        for (int i = 1; i < n1; ++i)
            k(i - 1, col - 1) = s.w[0] * phi(i, s.first) + s.w[1] * phi(i, s.first + 1) + s.w[2] * phi(i, s.first + 2);
    }
    return k;
}

BackgroundPreconditioner::BackgroundPreconditioner(const LagrangianDomain& dom, const SolveOptions& opt)
    : y1_(dom.upper.grid.y1)
{
    if (dom.lower.grid.y1 != y1_)
        throw ConsistencyError("layer grids do not share the interface nodes");
    const BackgroundLayer& up = dom.background.upper;
    const BackgroundLayer& lo = dom.background.lower;
    t_ = up.e2 * dirichlet_to_trace(dom.upper.grid, up.e1, up.e2, opt) +
         lo.e2 * dirichlet_to_trace(dom.lower.grid, lo.e1, lo.e2, opt);
    lu_.compute(t_);
}

std::vector<double> BackgroundPreconditioner::curve(const std::vector<double>& p_star) const
{
    const int n = static_cast<int>(y1_.size());
    if (static_cast<int>(p_star.size()) != n)
        throw ConsistencyError("residual does not match the interface nodes");
    Eigen::VectorXd b(n - 1);
    for (int i = 1; i < n; ++i)
        b[i - 1] = p_star[i];
    const Eigen::VectorXd x = lu_.solve(b);
    std::vector<double> g(n, 0.0);
    for (int i = 1; i < n; ++i)
        g[i] = x[i - 1];
    return g;
}

std::vector<double> BackgroundPreconditioner::slope(const std::vector<double>& p_star) const
{
    std::vector<double> eta = derivative(y1_, curve(p_star));
    eta[0] = 0.0;
    return eta;
}

std::vector<double> BackgroundPreconditioner::apply(const std::vector<double>& g) const
{
    const int n = static_cast<int>(y1_.size());
    Eigen::VectorXd x(n - 1);
    for (int i = 1; i < n; ++i)
        x[i - 1] = g[i];
    const Eigen::VectorXd b = t_ * x;
    std::vector<double> out(n, 0.0);
    for (int i = 1; i < n; ++i)
        out[i] = b[i - 1];
    return out;
}

void FreeBoundarySettings::validate() const
{
    layer.validate();
    if (!(tol_q_rel > 0.0))
        throw ConfigError("interface.tol_q_rel must be > 0");
    if (max_iters < 1)
        throw ConfigError("interface.max_iters must be >= 1");
    if (!(theta > 0.0 && theta <= 1.0))
        throw ConfigError("interface.theta must lie in (0, 1]");
    if (max_halvings < 0)
        throw ConfigError("interface.max_halvings must be >= 0");
    if (stagnation_window < 1)
        throw ConfigError("interface.stagnation_window must be >= 1");
}

LayerPair solve_layers(const LagrangianDomain& dom, const std::vector<double>& g, const FixedPointSettings& s,
                       const LayerPair* warm)
{
    LayerPair out;
    std::exception_ptr eu, el;
#pragma omp parallel sections num_threads(2)
    {
#pragma omp section
        {
            try {
                out.upper = solve_layer(dom.upper, g, s, warm ? &warm->upper.phi : nullptr);
            } catch (...) {
                eu = std::current_exception();
            }
        }
#pragma omp section
        {
            try {
                out.lower = solve_layer(dom.lower, g, s, warm ? &warm->lower.phi : nullptr);
            } catch (...) {
                el = std::current_exception();
            }
        }
    }
    if (eu)
        std::rethrow_exception(eu);
    if (el)
        std::rethrow_exception(el);
    return out;
}

FreeBoundarySolution solve_free_boundary(const LagrangianDomain& dom, const FreeBoundarySettings& s)
{
    s.validate();
    const std::vector<double>& y1 = dom.upper.grid.y1;
    const int n1 = static_cast<int>(y1.size());
    const double tol_q = s.tol_q_rel * dom.background.pressure;
    const double h_min = std::min(dom.upper.grid.min_spacing(), dom.lower.grid.min_spacing());
    const double e2_max = std::max(dom.background.upper.e2, dom.background.lower.e2);

    ConvergenceReport rep;
    rep.tol_q = tol_q;
    auto inner = [&](double q_norm) {
        FixedPointSettings fs = s.layer;
        if (s.forcing)
            fs.tol_update = std::max(1e-15, std::min(s.layer.tol_update, 1e-2 * q_norm * h_min / (3.0 * e2_max)));
        return fs;
    };
    auto note_layers = [&](const LayerPair& p) {
        rep.picard_iterations.push_back(p.upper.iterations + p.lower.iterations);
        rep.max_layer_contraction =
            std::max({rep.max_layer_contraction, p.upper.contraction, p.lower.contraction});
    };

    std::vector<double> g(n1, 0.0);
    LayerPair pair = solve_layers(dom, g, s.layer);
    InterfaceResidual res = pressure_jump(dom, pair.upper, pair.lower);
    note_layers(pair);
    rep.residual_history.push_back(res.max_norm);
    if (res.max_norm > tol_q && s.forcing && inner(res.max_norm).tol_update < s.layer.tol_update) {
        // the first evaluation used the loose tolerance; tighten before the first step
        pair = solve_layers(dom, g, inner(res.max_norm), &pair);
        res = pressure_jump(dom, pair.upper, pair.lower);
        note_layers(pair);
        rep.residual_history.back() = res.max_norm;
    }

    std::unique_ptr<BackgroundPreconditioner> pre;
    int stagnant = 0;
    while (res.max_norm > tol_q) {
        if (rep.iterations >= s.max_iters) {
            std::ostringstream os;
            os << "interface iteration did not reach |Q| <= " << tol_q << " in " << s.max_iters
               << " steps (last " << res.max_norm << ")";
            throw ConvergenceError(os.str(), rep.residual_history);
        }
        if (!pre)
            pre = std::make_unique<BackgroundPreconditioner>(dom, s.layer.solver);
        const std::vector<double> dg = pre->curve(res.q);
        double theta = s.theta;
        std::vector<double> g_try(n1);
        LayerPair pair_try;
        InterfaceResidual res_try;
        for (int h = 0;; ++h) {
            for (int i = 0; i < n1; ++i)
                g_try[i] = g[i] - theta * dg[i];
            bool ok = true;
            try {
                pair_try = solve_layers(dom, g_try, inner(res.max_norm), &pair);
                res_try = pressure_jump(dom, pair_try.upper, pair_try.lower);
            } catch (const SolverError&) {
                // a trial curve that leaves the admissible regime counts as a residual increase
                if (h >= s.max_halvings)
                    throw;
                ok = false;
            }
            if ((ok && res_try.max_norm < res.max_norm) || (ok && h >= s.max_halvings))
                break;
            theta *= 0.5;
        }
        note_layers(pair_try);
        const double factor = res_try.max_norm / res.max_norm;
        rep.max_factor = std::max(rep.max_factor, factor);
        rep.theta_history.push_back(theta);
        g = std::move(g_try);
        pair = std::move(pair_try);
        res = std::move(res_try);
        rep.residual_history.push_back(res.max_norm);
        ++rep.iterations;
        stagnant = factor > s.stagnation_factor ? stagnant + 1 : 0;
        if (stagnant >= s.stagnation_window && res.max_norm > tol_q) {
            std::ostringstream os;
            os << "interface iteration stagnated: residual reduction above " << s.stagnation_factor << " for "
               << s.stagnation_window << " consecutive steps (|Q| = " << res.max_norm << ")";
            throw ConvergenceError(os.str(), rep.residual_history);
        }
    }
    rep.converged = true;
    rep.corner_mismatch = std::abs(res.corner);
    if (rep.iterations > 0 && rep.residual_history.front() > 0.0)
        rep.geometric_factor =
            std::pow(rep.residual_history.back() / rep.residual_history.front(), 1.0 / rep.iterations);

    FreeBoundarySolution out;
    out.curve = InterfaceCurve::from_curve(y1, std::move(g));
    out.upper = std::move(pair.upper);
    out.lower = std::move(pair.lower);
    out.residual = std::move(res);
    out.report = std::move(rep);
    return out;
}

}  // namespace cdnozzle
