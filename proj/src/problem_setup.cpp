#include "cdnozzle/problem_setup.hpp"

#include "cdnozzle/errors.hpp"
#include "cdnozzle/norms.hpp"
#include "cdnozzle/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cdnozzle {

namespace {

const int kShapeSamples = 257;

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

void check_positive_on(const Profile& f, double lo, double hi, const std::string& name)
{
    for (int s = 0; s < kShapeSamples; ++s) {
        const double x = lo + (hi - lo) * s / (kShapeSamples - 1);
        const double v = f(x);
        if (!std::isfinite(v) || !(v > 0.0))
            throw ConfigError(name + " must be positive on [" + fmt(lo) + ", " + fmt(hi) + "] (value " +
                              fmt(v) + " at x2 = " + fmt(x) + ")");
    }
}

double integrate(const Profile& f, double lo, double hi)
{
    const QuadratureRule q = gauss_legendre(f.degree() / 2 + 2);
    double s = 0.0;
    for (size_t k = 0; k < q.nodes.size(); ++k)
        s += q.weights[k] * f(lo + (hi - lo) * q.nodes[k]);
    return s * (hi - lo);
}

BackgroundLayer make_background_layer(const ThermoState& s, double gamma, const char* name)
{
    if (!(s.rho > 0.0) || !(s.u1 > 0.0) || !(s.pressure > 0.0))
        throw ConfigError(std::string("background.") + name + ": density, velocity and pressure must be positive");
    if (s.u2 != 0.0)
        throw ConfigError(std::string("background.") + name + ": background flow must be horizontal");
    const double c2 = s.sound_speed_sq(gamma);
    const double u = s.u1;
    if (!(u * u < c2))
        throw ConfigError(std::string("background.") + name + ": layer is not subsonic (u^2 = " + fmt(u * u) +
                          ", c^2 = " + fmt(c2) + ")");
    BackgroundLayer b;
    b.state = s;
    b.e1 = u;
    b.e2 = c2 * u * u * u * s.rho * s.rho / (c2 - u * u);
    b.mass_flux = s.rho * u;
    return b;
}

}  // namespace

void NozzleGeometry::validate() const
{
    if (!(length > 0.0) || !std::isfinite(length))
        throw ConfigError("geometry.length must be positive");
    if (wall_upper(0.0) != 1.0)
        throw ConfigError("geometry.wall_upper must satisfy g+(0) = 1 (got " + fmt(wall_upper(0.0)) + ")");
    if (wall_lower(0.0) != -1.0)
        throw ConfigError("geometry.wall_lower must satisfy g-(0) = -1 (got " + fmt(wall_lower(0.0)) + ")");
    for (int s = 0; s < kShapeSamples; ++s) {
        const double x = length * s / (kShapeSamples - 1);
        if (!(wall_lower(x) < wall_upper(x)))
            throw ConfigError("geometry: walls cross at x1 = " + fmt(x));
    }
}

void BoundaryData::validate(const NozzleGeometry& geom) const
{
    check_positive_on(upper.j, 0.0, 1.0, "perturbation.entrance_upper.J");
    check_positive_on(lower.j, -1.0, 0.0, "perturbation.entrance_lower.J");
    check_positive_on(upper.a, 0.0, 1.0, "perturbation.entrance_upper.A");
    check_positive_on(lower.a, -1.0, 0.0, "perturbation.entrance_lower.A");
    check_positive_on(upper.b, 0.0, 1.0, "perturbation.entrance_upper.B");
    check_positive_on(lower.b, -1.0, 0.0, "perturbation.entrance_lower.B");
    const double lo = geom.wall_lower(geom.length), hi = geom.wall_upper(geom.length);
    for (int s = 0; s < kShapeSamples; ++s) {
        const double v = exit_angle(lo + (hi - lo) * s / (kShapeSamples - 1));
        if (!std::isfinite(v))
            throw ConfigError("perturbation.exit_angle is not finite on the exit span");
    }
}

BackgroundSolution build_background(const ThermoState& upper, const ThermoState& lower, double gamma)
{
    if (!(std::abs(upper.pressure - lower.pressure) <= 1e-12 * std::abs(upper.pressure)))
        throw ConfigError("background: layer pressures differ (" + fmt(upper.pressure) + " vs " +
                          fmt(lower.pressure) + ")");
    BackgroundSolution bg;
    bg.gamma = gamma;
    bg.upper = make_background_layer(upper, gamma, "upper");
    bg.lower = make_background_layer(lower, gamma, "lower");
    bg.pressure = upper.pressure;
    return bg;
}

BackgroundSolution build_background(double rho_upper, double u_upper, double rho_lower, double u_lower,
                                    double pressure, double gamma)
{
    return build_background(ThermoState::from_primitive(rho_upper, u_upper, 0.0, pressure, gamma),
                            ThermoState::from_primitive(rho_lower, u_lower, 0.0, pressure, gamma), gamma);
}

MassFluxes mass_fluxes(const BoundaryData& data)
{
    check_positive_on(data.upper.j, 0.0, 1.0, "perturbation.entrance_upper.J");
    check_positive_on(data.lower.j, -1.0, 0.0, "perturbation.entrance_lower.J");
    return {integrate(data.lower.j, -1.0, 0.0), integrate(data.upper.j, 0.0, 1.0)};
}

void PhysicalProblem::validate() const
{
    gas.validate();
    geometry.validate();
    data.validate(geometry);
    // the perturbed mass fluxes may differ from the background ones only by the size of
    // the J deviation
    const MassFluxes m = mass_fluxes(data);
    auto dev = [](const Profile& j, double jb, double lo, double hi) {
        return profile_holder_norm(j - Profile::constant(jb, j.origin(), j.scale()), lo, hi, 0, 0.5)
            .derivative_terms[0];
    };
    const double su = dev(data.upper.j, background.upper.mass_flux, 0.0, 1.0);
    const double sl = dev(data.lower.j, background.lower.mass_flux, -1.0, 0.0);
    if (std::abs(m.upper - background.upper.mass_flux) > su + 1e-12 ||
        std::abs(m.lower - background.lower.mass_flux) > sl + 1e-12)
        throw ConsistencyError("mass flux differs from background by more than the J deviation");
}

NozzleGeometry straight_nozzle(double length)
{
    NozzleGeometry g;
    g.length = length;
    g.wall_upper = Profile({1.0}, 0.0, length);
    g.wall_lower = Profile({-1.0}, 0.0, length);
    return g;
}

BoundaryData background_boundary_data(const BackgroundSolution& bg)
{
    BoundaryData d;
    d.upper = {Profile::constant(bg.upper.state.entropy_a), Profile::constant(bg.upper.state.bernoulli_b),
               Profile::constant(bg.upper.mass_flux)};
    d.lower = {Profile::constant(bg.lower.state.entropy_a), Profile::constant(bg.lower.state.bernoulli_b),
               Profile::constant(bg.lower.mass_flux)};
    d.exit_angle = Profile::constant(0.0);
    return d;
}

SigmaBreakdown perturbation_size(const PhysicalProblem& p, double alpha, int samples)
{
    SigmaBreakdown s;
    auto add = [&](const std::string& name, const Profile& dev, double lo, double hi, int order) {
        const double v = profile_holder_norm(dev, lo, hi, order, alpha, samples).total;
        s.terms.emplace_back(name, v);
        s.total += v;
    };
    auto diff = [](const Profile& f, double c) { return f - Profile::constant(c, f.origin(), f.scale()); };
    const BackgroundLayer& up = p.background.upper;
    const BackgroundLayer& lo = p.background.lower;
    add("entrance_upper.A", diff(p.data.upper.a, up.state.entropy_a), 0.0, 1.0, 1);
    add("entrance_upper.B", diff(p.data.upper.b, up.state.bernoulli_b), 0.0, 1.0, 1);
    add("entrance_upper.J", diff(p.data.upper.j, up.mass_flux), 0.0, 1.0, 1);
    add("entrance_lower.A", diff(p.data.lower.a, lo.state.entropy_a), -1.0, 0.0, 1);
    add("entrance_lower.B", diff(p.data.lower.b, lo.state.bernoulli_b), -1.0, 0.0, 1);
    add("entrance_lower.J", diff(p.data.lower.j, lo.mass_flux), -1.0, 0.0, 1);
    const double L = p.geometry.length;
    add("exit_angle", p.data.exit_angle, p.geometry.wall_lower(L), p.geometry.wall_upper(L), 2);
    add("wall_upper", diff(p.geometry.wall_upper, 1.0), 0.0, L, 2);
    add("wall_lower", diff(p.geometry.wall_lower, -1.0), 0.0, L, 2);
    return s;
}

PhysicalProblem scale_perturbation(const PhysicalProblem& p, double s)
{
    auto scaled = [s](const Profile& f, double c) {
        const Profile base = Profile::constant(c, f.origin(), f.scale());
        return base + (f - base) * s;
    };
    PhysicalProblem q = p;
    const BackgroundLayer& up = p.background.upper;
    const BackgroundLayer& lo = p.background.lower;
    q.data.upper = {scaled(p.data.upper.a, up.state.entropy_a), scaled(p.data.upper.b, up.state.bernoulli_b),
                    scaled(p.data.upper.j, up.mass_flux)};
    q.data.lower = {scaled(p.data.lower.a, lo.state.entropy_a), scaled(p.data.lower.b, lo.state.bernoulli_b),
                    scaled(p.data.lower.j, lo.mass_flux)};
    q.data.exit_angle = p.data.exit_angle * s;
    q.geometry.wall_upper = scaled(p.geometry.wall_upper, 1.0);
    q.geometry.wall_lower = scaled(p.geometry.wall_lower, -1.0);
    return q;
}

std::vector<double> entrance_to_lagrangian(const Profile& j, double m, const std::vector<double>& t,
                                           double* endpoint_defect, int oversample, int min_steps, double tol)
{
    const int n = static_cast<int>(t.size());
    if (n < 2 || t.front() != 0.0 || !(std::abs(t.back() - m) <= 1e-14 * m))
        throw std::invalid_argument("entrance_to_lagrangian: nodes must span [0, m]");
    const int sub = std::max(oversample, (min_steps + n - 2) / (n - 1));
    std::vector<double> x(n, 0.0);
    auto rhs = [&](double xx) { return 1.0 / j(xx); };
    double xc = 0.0;
    for (int k = 1; k < n; ++k) {
        const double h = (t[k] - t[k - 1]) / sub;
        for (int s = 0; s < sub; ++s) {
            const double k1 = rhs(xc);
            const double k2 = rhs(xc + 0.5 * h * k1);
            const double k3 = rhs(xc + 0.5 * h * k2);
            const double k4 = rhs(xc + h * k3);
            xc += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
        }
        x[k] = xc;
    }
    const double defect = x.back() - 1.0;
    if (endpoint_defect)
        *endpoint_defect = defect;
    if (!(std::abs(defect) <= tol))
        throw ConsistencyError("mass-coordinate march misses the wall: x(m) - 1 = " + fmt(defect), defect);
    return x;
}

std::vector<double> LayerData::entrance_dirichlet() const
{
    std::vector<double> g(n2());
    for (int j = 0; j < n2(); ++j)
        g[j] = x2_entrance[j] - grid.y2[j] / mass_flux;
    return g;
}

std::vector<double> LayerData::wall_dirichlet() const
{
    std::vector<double> g(n1());
    for (int i = 0; i < n1(); ++i)
        g[i] = wall(grid.y1[i]) - 1.0;
    return g;
}

LayerData build_layer(const PhysicalProblem& p, Layer layer, const DomainSettings& s)
{
    if (s.n1 < 5 || s.n2 < 5)
        throw ConfigError("numerics: need at least 5 nodes per direction");
    if (!(s.alpha > 0.0 && s.alpha < 1.0))
        throw ConfigError("numerics.alpha must lie in (0, 1)");
    LayerData d;
    d.layer = layer;
    d.sign = layer == Layer::upper ? 1.0 : -1.0;
    d.gamma = p.gas.gamma;
    d.closure = s.closure;
    const double L = p.geometry.length;
    const MassFluxes m = mass_fluxes(p.data);
    if (layer == Layer::upper) {
        d.background = p.background.upper;
        d.entrance = p.data.upper;
        d.wall = p.geometry.wall_upper;
        d.exit_angle = p.data.exit_angle;
        d.exit_lo = p.geometry.wall_lower(L);
        d.exit_hi = p.geometry.wall_upper(L);
        d.mass_flux = m.upper;
    } else {
        d.background = p.background.lower;
        d.entrance = {p.data.lower.a.reflected(), p.data.lower.b.reflected(), p.data.lower.j.reflected()};
        d.wall = p.geometry.wall_lower * -1.0;
        d.exit_angle = p.data.exit_angle.reflected() * -1.0;
        d.exit_lo = -p.geometry.wall_upper(L);
        d.exit_hi = -p.geometry.wall_lower(L);
        d.mass_flux = m.lower;
    }
    d.background_a = d.background.state.entropy_a;
    d.background_b = d.background.state.bernoulli_b;
    const double beta = s.grading < 0.0 ? default_grading(s.alpha) : s.grading;
    d.grid = make_layer_grid(L, d.mass_flux, s.n1, s.n2, beta);
    d.x2_entrance = entrance_to_lagrangian(d.entrance.j, d.mass_flux, d.grid.y2, &d.endpoint_defect);
    const double scale = d.x2_entrance.back();
    for (double& x : d.x2_entrance)
        x /= scale;
    d.x2_entrance.back() = 1.0;
    const int n2 = d.n2();
    d.a_en.resize(n2);
    d.b_en.resize(n2);
    d.j_en.resize(n2);
    for (int j = 0; j < n2; ++j) {
        const double x = d.x2_entrance[j];
        d.a_en[j] = d.entrance.a(x);
        d.b_en[j] = d.entrance.b(x);
        d.j_en[j] = d.entrance.j(x);
    }
    return d;
}

LagrangianDomain build_lagrangian_domain(const PhysicalProblem& p, const DomainSettings& s)
{
    p.validate();
    LagrangianDomain dom;
    dom.upper = build_layer(p, Layer::upper, s);
    dom.lower = build_layer(p, Layer::lower, s);
    dom.length = p.geometry.length;
    dom.alpha = s.alpha;
    dom.background = p.background;
    dom.gamma = p.gas.gamma;
    return dom;
}

}  // namespace cdnozzle
