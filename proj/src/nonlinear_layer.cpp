#include "cdnozzle/nonlinear_layer.hpp"

#include "cdnozzle/errors.hpp"

#include <cmath>
#include <sstream>

namespace cdnozzle {

void FixedPointSettings::validate() const
{
    if (!(tol_update > 0.0))
        throw ConfigError("fixed_point.tol_update must be > 0");
    if (max_iters < 1)
        throw ConfigError("fixed_point.max_iters must be >= 1");
    if (!(damping > 0.0 && damping <= 1.0))
        throw ConfigError("fixed_point.damping must lie in (0, 1]");
    if (!(blowup_factor > 1.0))
        throw ConfigError("fixed_point.blowup_factor must be > 1");
}

LayerSources sources_f(const LayerData& d)
{
    LayerSources s{GridField(d.grid), GridField(d.grid)};
    const StreamGradient gb{0.0, d.base_gradient()};
    const double pb = flux_w(gb, d.background_a, d.background_b, d.gamma, d.closure).w2;
    for (int j = 0; j < d.n2(); ++j) {
        const double f2 = pb - flux_w(gb, d.a_en[j], d.b_en[j], d.gamma, d.closure).w2;
        for (int i = 0; i < d.n1(); ++i)
            s.f2(i, j) = f2;
    }
    return s;
}

std::vector<double> exit_condition(const GridField& phi_bar, const LayerData& d)
{
    const int n1 = d.n1(), n2 = d.n2();
    const double slack = 1e-12 * std::max(1.0, std::max(std::abs(d.exit_lo), std::abs(d.exit_hi)));
    std::vector<double> w(n2);
    for (int j = 0; j < n2; ++j) {
        const double x = d.grid.y2[j] / d.mass_flux + phi_bar(n1 - 1, j);
        if (!(x >= d.exit_lo - slack && x <= d.exit_hi + slack)) {
            std::ostringstream os;
            os << layer_name(d.layer) << " layer: exit stream value " << d.sign * x << " at node " << j
               << " leaves the exit span";
            throw RangeError(os.str());
        }
        w[j] = d.exit_angle(x);
    }
    return w;
}

namespace {

MixedBvp layer_bvp(const GridField& phi_bar, const LayerData& d, const std::vector<double>& g_cd)
{
    if (static_cast<int>(g_cd.size()) != d.n1())
        throw ConsistencyError("interface curve does not match the y1 nodes");
    std::vector<double> bottom(d.n1());
    for (int i = 0; i < d.n1(); ++i)
        bottom[i] = d.sign * g_cd[i];
    return MixedBvp::layer(d.entrance_dirichlet(), exit_condition(phi_bar, d), std::move(bottom),
                           d.wall_dirichlet());
}

}  // namespace

GridField picard_step(const GridField& phi_bar, const LayerData& d, const std::vector<double>& g_cd,
                      const SolveOptions& opt, Exec exec)
{
    CoefficientField c = coefficient_field(d, phi_bar, exec);
    const LayerSources f = sources_f(d);
    c.f1 = f.f1.v;
    c.f2 = f.f2.v;
    return solve(assemble(d.grid, c, layer_bvp(phi_bar, d, g_cd)), opt);
}

void fill_state(StreamField& f, const LayerData& d, Exec exec)
{
    NodalState s = nodal_state(d, f.phi, exec);
    f.rho = std::move(s.rho);
    f.u1 = std::move(s.u1);
    f.u2 = std::move(s.u2);
    f.p = std::move(s.p);
    f.a = GridField(d.grid);
    f.b = GridField(d.grid);
    for (int i = 0; i < d.n1(); ++i)
        for (int j = 0; j < d.n2(); ++j) {
            f.a(i, j) = d.a_en[j];
            f.b(i, j) = d.b_en[j];
        }
}

StreamField solve_layer(const LayerData& d, const std::vector<double>& g_cd, const FixedPointSettings& s,
                        const GridField* initial)
{
    s.validate();
    StreamField out;
    out.layer = d.layer;
    GridField phi = initial ? *initial : GridField(d.grid);
    double ref_norm = initial ? phi.max_abs() : 0.0;
    double prev = -1.0;
    bool done = false;
    for (int k = 1; k <= s.max_iters; ++k) {
        GridField next = picard_step(phi, d, g_cd, s.solver, s.exec);
        if (s.damping != 1.0)
            for (size_t q = 0; q < next.v.size(); ++q)
                next.v[q] = (1.0 - s.damping) * phi.v[q] + s.damping * next.v[q];
        const double upd = max_abs_diff(next, phi);
        phi = std::move(next);
        out.history.push_back(upd);
        out.iterations = k;
        if (prev > 1e-13)
            out.contraction = std::max(out.contraction, upd / prev);
        prev = upd;
        const double nrm = phi.max_abs();
        if (k == 1)
            ref_norm = std::max(ref_norm, nrm);
        if (!std::isfinite(upd) || (ref_norm > 0.0 && nrm > s.blowup_factor * ref_norm)) {
            std::ostringstream os;
            os << layer_name(d.layer) << " layer: Picard iterate norm " << nrm << " exceeds "
               << s.blowup_factor << " x the first iterate (" << ref_norm << ") at iteration " << k;
            throw ConvergenceError(os.str(), out.history);
        }
        if (upd <= s.tol_update) {
            done = true;
            break;
        }
    }
    if (!done) {
        std::ostringstream os;
        os << layer_name(d.layer) << " layer: Picard iteration did not reach " << s.tol_update << " in "
           << s.max_iters << " iterations (last update " << out.history.back() << ")";
        throw ConvergenceError(os.str(), out.history);
    }
    out.final_update = out.history.back();
    out.phi = std::move(phi);
    fill_state(out, d, s.exec);
    return out;
}

}  // namespace cdnozzle
