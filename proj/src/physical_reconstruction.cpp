#include "cdnozzle/physical_reconstruction.hpp"

#include "cdnozzle/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cdnozzle {

namespace {

const Profile& physical_wall(const NozzleGeometry& geom, Layer l)
{
    return l == Layer::upper ? geom.wall_upper : geom.wall_lower;
}

// quadratic through (y[k], f[k]), k = 0..2, evaluated at x
double extrapolate3(const double* y, const double* f, double x)
{
    double s = 0.0;
    for (int k = 0; k < 3; ++k) {
        double w = 1.0;
        for (int l = 0; l < 3; ++l)
            if (l != k)
                w *= (x - y[l]) / (y[k] - y[l]);
        s += w * f[k];
    }
    return s;
}

// value of v on column i at the interface, extrapolated from the three nearest interior nodes
double interface_trace(const PhysicalField& f, const GridField& v, int i)
{
    if (f.n2 < 5)
        throw ConsistencyError("trace extrapolation needs at least five nodes per column");
    double y[3], val[3];
    for (int k = 0; k < 3; ++k) {
        y[k] = f.y2[1 + k];
        val[k] = v(i, 1 + k);
    }
    return extrapolate3(y, val, f.y2[0]);
}

GridField flow_angle(const PhysicalField& f)
{
    GridField th(f.n1, f.n2);
    for (size_t k = 0; k < th.v.size(); ++k)
        th.v[k] = f.u2.v[k] / f.u1.v[k];
    return th;
}

// linear in x2 on one column, extended linearly past the ends
double column_value(const PhysicalField& f, const GridField& v, int i, double x2)
{
    const int n2 = f.n2;
    const bool up = f.x2(i, n2 - 1) > f.x2(i, 0);
    // k with x2 between nodes k and k+1 (in the column's own order)
    int lo = 0, hi = n2 - 1;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        if ((f.x2(i, mid) <= x2) == up)
            lo = mid;
        else
            hi = mid;
    }
    const double xa = f.x2(i, lo), xb = f.x2(i, hi);
    const double w = (x2 - xa) / (xb - xa);
    return (1.0 - w) * v(i, lo) + w * v(i, hi);
}

}  // namespace

double default_tol_geom(const LayerData& d, const NozzleGeometry& geom)
{
    const Profile& w = physical_wall(geom, d.layer);
    const double len = d.grid.length();
    double kappa = 0.0;
    const int samples = 257;
    for (int k = 0; k < samples; ++k)
        kappa = std::max(kappa, std::abs(w.derivative(len * k / (samples - 1), 2)));
    const double h = d.grid.max_spacing();
    return 10.0 * h * h * std::max(1.0, kappa);
}

PhysicalField inverse_map(const LayerData& d, const StreamField& s, const std::vector<double>& g_cd,
                          const NozzleGeometry& geom, double tol_geom)
{
    const int n1 = d.n1(), n2 = d.n2();
    if (static_cast<int>(g_cd.size()) != n1)
        throw ConsistencyError("interface curve does not match the layer grid");
    PhysicalField f;
    f.layer = d.layer;
    f.n1 = n1;
    f.n2 = n2;
    f.y1 = d.grid.y1;
    f.y2.resize(n2);
    for (int j = 0; j < n2; ++j)
        f.y2[j] = d.sign * d.grid.y2[j];
    f.x2 = GridField(n1, n2);
    f.rho = s.rho;
    f.u1 = s.u1;
    f.u2 = s.u2;
    f.p = s.p;
    f.a = s.a;
    f.b = s.b;
    f.mach = GridField(n1, n2);
    f.tol_geom = tol_geom > 0.0 ? tol_geom : default_tol_geom(d, geom);
    const Profile& wall = physical_wall(geom, d.layer);
    f.wall.resize(n1);

    std::vector<double> inv(n2);
    for (int i = 0; i < n1; ++i) {
        for (int j = 0; j < n2; ++j) {
            const double rho = s.rho(i, j), u1 = s.u1(i, j);
            if (!(rho > 0.0 && u1 > 0.0)) {
                std::ostringstream os;
                os << layer_name(d.layer) << " layer: rho u1 = " << rho * u1 << " at node (" << i << ", " << j
                   << "), the inverse map needs u1 > 0";
                throw ConsistencyError(os.str(), rho * u1);
            }
            inv[j] = 1.0 / (rho * u1);
            const double c2 = d.gamma * s.p(i, j) / rho;
            f.mach(i, j) = std::sqrt((u1 * u1 + s.u2(i, j) * s.u2(i, j)) / c2);
        }
        const std::vector<double> x = cumulative_trapezoid(d.grid.y2, inv);
        for (int j = 0; j < n2; ++j)
            f.x2(i, j) = g_cd[i] + d.sign * x[j];
        f.wall[i] = wall(f.y1[i]);
        f.wall_defect = std::max(f.wall_defect, std::abs(f.x2(i, n2 - 1) - f.wall[i]));
    }
    if (f.wall_defect > f.tol_geom) {
        std::ostringstream os;
        os << layer_name(d.layer) << " layer: reconstructed wall misses the nozzle wall by " << f.wall_defect
           << " (tolerance " << f.tol_geom << ")";
        throw ConsistencyError(os.str(), f.wall_defect);
    }
    return f;
}

RhReport rh_residuals(const PhysicalField& upper, const PhysicalField& lower, const InterfaceCurve& curve)
{
    const int n1 = upper.n1;
    if (lower.n1 != n1 || static_cast<int>(curve.eta.size()) != n1)
        throw ConsistencyError("layers and interface curve do not share the y1 nodes");
    const GridField tu = flow_angle(upper), tl = flow_angle(lower);
    RhReport r;
    r.tangency_upper.resize(n1);
    r.tangency_lower.resize(n1);
    r.pressure_jump.resize(n1);
    for (int i = 0; i < n1; ++i) {
        r.tangency_upper[i] = interface_trace(upper, tu, i) - curve.eta[i];
        r.tangency_lower[i] = interface_trace(lower, tl, i) - curve.eta[i];
        r.pressure_jump[i] = interface_trace(upper, upper.p, i) - interface_trace(lower, lower.p, i);
        r.max_tangency_upper = std::max(r.max_tangency_upper, std::abs(r.tangency_upper[i]));
        r.max_tangency_lower = std::max(r.max_tangency_lower, std::abs(r.tangency_lower[i]));
        r.max_pressure_jump = std::max(r.max_pressure_jump, std::abs(r.pressure_jump[i]));
    }
    return r;
}

ConservationReport conservation_residuals(const PhysicalField& f, double mass_flux, const Profile& wall,
                                          int stations)
{
    if (stations < 2)
        throw ConfigError("conservation check needs at least two stations");
    const int n1 = f.n1, n2 = f.n2;
    std::vector<double> flux(n1);
    for (int i = 0; i < n1; ++i) {
        double s = 0.0;
        for (int j = 0; j + 1 < n2; ++j)
            s += 0.5 * (f.rho(i, j) * f.u1(i, j) + f.rho(i, j + 1) * f.u1(i, j + 1)) *
                 std::abs(f.x2(i, j + 1) - f.x2(i, j));
        flux[i] = s - mass_flux;
    }
    ConservationReport r;
    const double len = f.y1.back();
    for (int k = 0; k < stations; ++k) {
        const double x = len * k / (stations - 1);
        const auto it = std::upper_bound(f.y1.begin(), f.y1.end(), x);
        const int hi = std::clamp(static_cast<int>(it - f.y1.begin()), 1, n1 - 1);
        const double w = (x - f.y1[hi - 1]) / (f.y1[hi] - f.y1[hi - 1]);
        r.stations.push_back(x);
        r.mass_defect.push_back(std::abs((1.0 - w) * flux[hi - 1] + w * flux[hi]));
        r.max_mass_defect = std::max(r.max_mass_defect, r.mass_defect.back());
    }
    const GridField th = flow_angle(f);
    r.slip.resize(n1);
    for (int i = 0; i < n1; ++i) {
        r.slip[i] = th(i, n2 - 1) - wall.derivative(f.y1[i], 1);
        r.max_slip = std::max(r.max_slip, std::abs(r.slip[i]));
    }
    return r;
}

double interpolate(const PhysicalField& f, const GridField& v, double x1, double x2)
{
    const auto it = std::upper_bound(f.y1.begin(), f.y1.end(), x1);
    const int hi = std::clamp(static_cast<int>(it - f.y1.begin()), 1, f.n1 - 1);
    const double w = (x1 - f.y1[hi - 1]) / (f.y1[hi] - f.y1[hi - 1]);
    return (1.0 - w) * column_value(f, v, hi - 1, x2) + w * column_value(f, v, hi, x2);
}

TransportReport streamline_transport(const PhysicalField& f, int substeps)
{
    if (substeps < 1)
        throw ConfigError("streamline tracing needs at least one substep");
    const GridField th = flow_angle(f);
    TransportReport r;
    for (int j = 1; j + 1 < f.n2; ++j) {
        double x2 = f.x2(0, j);
        const double a0 = f.a(0, j), b0 = f.b(0, j);
        for (int i = 0; i + 1 < f.n1; ++i) {
            const double xa = f.y1[i], dx = (f.y1[i + 1] - xa) / substeps;
            // evaluate inside [xa, xb] so the column pair stays fixed
            auto rate = [&](double x, double y) {
                const double w = std::clamp((x - xa) / (f.y1[i + 1] - xa), 0.0, 1.0);
                return (1.0 - w) * column_value(f, th, i, y) + w * column_value(f, th, i + 1, y);
            };
            for (int k = 0; k < substeps; ++k) {
                const double x = xa + k * dx;
                const double k1 = rate(x, x2);
                const double k2 = rate(x + 0.5 * dx, x2 + 0.5 * dx * k1);
                const double k3 = rate(x + 0.5 * dx, x2 + 0.5 * dx * k2);
                const double k4 = rate(x + dx, x2 + dx * k3);
                x2 += dx * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
            }
            r.a_residual = std::max(r.a_residual, std::abs(column_value(f, f.a, i + 1, x2) - a0));
            r.b_residual = std::max(r.b_residual, std::abs(column_value(f, f.b, i + 1, x2) - b0));
            r.max_row_offset = std::max(r.max_row_offset, std::abs(x2 - f.x2(i + 1, j)));
        }
    }
    return r;
}

double state_deviation(const PhysicalField& f, const BackgroundLayer& bg)
{
    double d = 0.0;
    for (size_t k = 0; k < f.rho.v.size(); ++k)
        d = std::max({d, std::abs(f.rho.v[k] - bg.state.rho), std::abs(f.u1.v[k] - bg.state.u1),
                      std::abs(f.u2.v[k]), std::abs(f.p.v[k] - bg.state.pressure)});
    return d;
}

double max_mach(const PhysicalField& f)
{
    return *std::max_element(f.mach.v.begin(), f.mach.v.end());
}

}  // namespace cdnozzle
