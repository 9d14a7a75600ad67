#include "cdnozzle/errors.hpp"
#include "cdnozzle/nonlinear_layer.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace cdnozzle;
using namespace cdnozzle::testing;

namespace {

constexpr double kPi = 3.14159265358979323846;

LagrangianDomain domain(const PhysicalProblem& p, int n)
{
    DomainSettings s;
    s.n1 = n;
    s.n2 = n;
    return build_lagrangian_domain(p, s);
}

// smooth field vanishing on t = 0 and t = m
GridField random_bump(const LayerData& d, std::mt19937_64& rng, double amp)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double c[3][2];
    for (auto& r : c)
        for (double& v : r)
            v = u(rng);
    GridField f(d.grid);
    const double L = d.grid.length(), m = d.mass_flux;
    for (int i = 0; i < d.n1(); ++i)
        for (int j = 0; j < d.n2(); ++j) {
            const double x = d.grid.y1[i] / L, t = d.grid.y2[j] / m;
            double v = 0.0;
            for (int k = 0; k < 3; ++k)
                v += (c[k][0] + c[k][1] * std::cos(kPi * (k + 1) * x)) * std::sin(kPi * (k + 1) * t);
            f(i, j) = amp * v / 6.0;
        }
    return f;
}

// Taylor polynomial of eps sin(pi x); the truncation error on [-1.5, 1.5] is far below 1e-12
Profile sine_profile(double eps)
{
    std::vector<double> c(26, 0.0);
    double term = eps * kPi;
    for (int k = 1; k < 26; k += 2) {
        c[k] = term;
        term *= -kPi * kPi / ((k + 1) * (k + 2));
    }
    return Profile(c);
}

std::vector<double> zero_curve(const LayerData& d) { return std::vector<double>(d.n1(), 0.0); }

}  // namespace

TEST(SourcesF, BackgroundDataGiveZero)
{
    LagrangianDomain dom = domain(background_problem(), 17);
    for (const LayerData* d : {&dom.upper, &dom.lower}) {
        LayerSources f = sources_f(*d);
        EXPECT_EQ(f.f1.max_abs(), 0.0);
        EXPECT_EQ(f.f2.max_abs(), 0.0);
    }
}

TEST(SourcesF, LinearInEntropyPerturbation)
{
    auto fnorm = [](double eps) {
        PhysicalProblem p = background_problem();
        const double ab = p.background.upper.state.entropy_a;
        p.data.upper.a = Profile({ab, 0.0, ab * eps, -0.5 * ab * eps});
        LagrangianDomain dom = domain(p, 17);
        LayerSources f = sources_f(dom.upper);
        EXPECT_EQ(f.f1.max_abs(), 0.0);
        return f.f2.max_abs();
    };
    const double e = 1e-3;
    const double r = fnorm(e) / fnorm(e / 2);
    EXPECT_GT(fnorm(e), 0.0);
    EXPECT_NEAR(r, 2.0, 0.2);
}

TEST(SourcesF, DependOnTOnly)
{
    LagrangianDomain dom = domain(reference_problem(1e-2), 17);
    LayerSources f = sources_f(dom.lower);
    for (int i = 1; i < dom.lower.n1(); ++i)
        for (int j = 0; j < dom.lower.n2(); ++j)
            EXPECT_EQ(f.f2(i, j), f.f2(0, j));
}

TEST(ExitCondition, ZeroAngleGivesZero)
{
    PhysicalProblem p = reference_problem(1e-2);
    p.data.exit_angle = Profile::constant(0.0);
    LagrangianDomain dom = domain(p, 17);
    for (double v : exit_condition(GridField(dom.upper.grid), dom.upper))
        EXPECT_EQ(v, 0.0);
}

TEST(ExitCondition, LinearAngleOnBackgroundStream)
{
    PhysicalProblem p = background_problem();
    p.data.exit_angle = Profile({0.002, 0.01});
    LagrangianDomain dom = domain(p, 17);
    const LayerData& up = dom.upper;
    std::vector<double> w = exit_condition(GridField(up.grid), up);
    for (int j = 0; j < up.n2(); ++j)
        EXPECT_EQ(w[j], p.data.exit_angle(up.grid.y2[j] / up.mass_flux));
    // canonical lower layer: omega-hat(x) = -omega(-x)
    const LayerData& lo = dom.lower;
    w = exit_condition(GridField(lo.grid), lo);
    for (int j = 0; j < lo.n2(); ++j)
        EXPECT_NEAR(w[j], -p.data.exit_angle(-lo.grid.y2[j] / lo.mass_flux), 1e-16);
}

TEST(ExitCondition, LipschitzBound)
{
    const double eps = 1e-2;
    PhysicalProblem p = background_problem();
    p.data.exit_angle = sine_profile(eps);
    LagrangianDomain dom = domain(p, 33);
    const LayerData& up = dom.upper;
    std::mt19937_64 rng(2);
    GridField phi = random_bump(up, rng, 1e-2);
    double edge = 0.0;
    for (int j = 0; j < up.n2(); ++j)
        edge = std::max(edge, std::abs(phi(up.n1() - 1, j)));
    ASSERT_GT(edge, 0.0);
    std::vector<double> w = exit_condition(phi, up);
    for (int j = 0; j < up.n2(); ++j)
        EXPECT_LE(std::abs(w[j] - eps * std::sin(kPi * up.grid.y2[j] / up.mass_flux)), eps * kPi * edge + 1e-14);
}

TEST(ExitCondition, LeavingTheSpanIsRangeError)
{
    LagrangianDomain dom = domain(reference_problem(1e-2), 17);
    GridField phi(dom.upper.grid, 0.0);
    for (int j = 0; j < dom.upper.n2(); ++j)
        phi(dom.upper.n1() - 1, j) = 0.6;
    EXPECT_THROW(exit_condition(phi, dom.upper), RangeError);
}

TEST(PicardStep, ZeroDataFixedPoint)
{
    LagrangianDomain dom = domain(background_problem(), 33);
    for (const LayerData* d : {&dom.upper, &dom.lower}) {
        GridField phi = picard_step(GridField(d->grid), *d, zero_curve(*d));
        EXPECT_LE(phi.max_abs(), 1e-11);
    }
}

TEST(PicardStep, Contractive)
{
    LagrangianDomain dom = domain(reference_problem(1e-2), 33);
    std::mt19937_64 rng(7);
    for (const LayerData* d : {&dom.upper, &dom.lower})
        for (int trial = 0; trial < 5; ++trial) {
            GridField p1 = random_bump(*d, rng, 2e-3), p2 = random_bump(*d, rng, 2e-3);
            GridField t1 = picard_step(p1, *d, zero_curve(*d)), t2 = picard_step(p2, *d, zero_curve(*d));
            EXPECT_LE(max_abs_diff(t1, t2), 0.5 * max_abs_diff(p1, p2));
        }
}

TEST(PicardStep, InterfaceTraceImposed)
{
    LagrangianDomain dom = domain(reference_problem(1e-2), 33);
    const double eps = 1e-3, L = dom.length;
    std::vector<double> g(dom.upper.n1());
    for (int i = 0; i < dom.upper.n1(); ++i) {
        const double y = dom.upper.grid.y1[i];
        g[i] = eps * y * (L - y) * 0.7;
    }
    for (const LayerData* d : {&dom.upper, &dom.lower}) {
        GridField phi = picard_step(GridField(d->grid), *d, g);
        for (int i = 0; i < d->n1(); ++i)
            EXPECT_NEAR(d->sign * phi(i, 0), g[i], 1e-12);
    }
}

TEST(SolveLayer, BackgroundConvergesInOneIteration)
{
    LagrangianDomain dom = domain(background_problem(), 33);
    for (const LayerData* d : {&dom.upper, &dom.lower}) {
        StreamField f = solve_layer(*d, zero_curve(*d), FixedPointSettings{});
        EXPECT_EQ(f.iterations, 1);
        EXPECT_LE(f.phi.max_abs(), 1e-11);
    }
}

TEST(SolveLayer, ReferenceConvergesGeometrically)
{
    LagrangianDomain dom = domain(reference_problem(1e-2), 65);
    for (const LayerData* d : {&dom.upper, &dom.lower}) {
        StreamField f = solve_layer(*d, zero_curve(*d), FixedPointSettings{});
        EXPECT_LE(f.iterations, 12) << layer_name(d->layer);
        EXPECT_LE(f.contraction, 0.5) << layer_name(d->layer);
        EXPECT_LT(f.contraction, 1.0);
        EXPECT_LE(f.final_update, 1e-10);
    }
}

TEST(SolveLayer, HalvingSigmaHalvesResponse)
{
    LagrangianDomain d1 = domain(reference_problem(1e-2), 33), d2 = domain(reference_problem(5e-3), 33);
    for (Layer l : {Layer::upper, Layer::lower}) {
        const double n1 = solve_layer(d1.layer(l), zero_curve(d1.layer(l)), {}).phi.max_abs();
        const double n2 = solve_layer(d2.layer(l), zero_curve(d2.layer(l)), {}).phi.max_abs();
        EXPECT_NEAR(n1 / n2, 2.0, 0.5) << layer_name(l);
    }
}

TEST(SolveLayer, DivergenceReportsHistory)
{
    LagrangianDomain dom = domain(reference_problem(1e-2), 17);
    FixedPointSettings s;
    s.max_iters = 2;
    try {
        solve_layer(dom.upper, zero_curve(dom.upper), s);
        FAIL() << "expected ConvergenceError";
    } catch (const ConvergenceError& e) {
        EXPECT_EQ(e.history().size(), 2u);
    }
    s.max_iters = 0;
    EXPECT_THROW(solve_layer(dom.upper, zero_curve(dom.upper), s), ConfigError);
}

TEST(SolveLayer, InvariantsAtConvergence)
{
    PhysicalProblem p = reference_problem(1e-2);
    LagrangianDomain dom = domain(p, 33);
    const double tol = 1e-10;
    const double umin = std::min(p.background.upper.state.u1, p.background.lower.state.u1);
    std::vector<double> g(dom.upper.n1());
    for (int i = 0; i < dom.upper.n1(); ++i)
        g[i] = 1e-4 * std::sin(kPi * dom.upper.grid.y1[i]) * dom.upper.grid.y1[i];
    for (const LayerData* d : {&dom.upper, &dom.lower}) {
        StreamField f = solve_layer(*d, g, FixedPointSettings{});
        // fixed-point residual
        EXPECT_LE(max_abs_diff(picard_step(f.phi, *d, g), f.phi), 2.0 * tol);
        const int n1 = d->n1(), n2 = d->n2();
        for (int i = 0; i < n1; ++i)
            for (int j = 0; j < n2; ++j) {
                EXPECT_EQ(f.a(i, j), f.a(0, j));
                EXPECT_EQ(f.b(i, j), f.b(0, j));
                EXPECT_EQ(f.a(i, j), d->a_en[j]);
                EXPECT_GE(f.u1(i, j), 0.5 * umin);
                EXPECT_NEAR(f.p(i, j), f.a(i, j) * std::pow(f.rho(i, j), d->gamma), 1e-12 * f.p(i, j));
            }
        std::vector<double> left = d->entrance_dirichlet(), top = d->wall_dirichlet();
        for (int j = 0; j < n2; ++j)
            EXPECT_EQ(f.phi(0, j), left[j]);
        for (int i = 0; i < n1; ++i) {
            EXPECT_EQ(f.phi(i, n2 - 1), top[i]);
            EXPECT_EQ(f.phi(i, 0), d->sign * g[i]);
        }
    }
}

TEST(SolveLayer, ExitNeumannResidualSecondOrder)
{
    // interface slope at the exit matches the exit angle there, so the corner data are compatible;
    // the residual is measured on the open exit side (the corner nodes are Dirichlet)
    PhysicalProblem p = reference_problem(1e-2);
    const double w0 = p.data.exit_angle(0.0), L = p.geometry.length;
    double err[2][3];
    int k = 0;
    for (int n : {33, 65, 129}) {
        LagrangianDomain dom = domain(p, n);
        std::vector<double> g(n);
        for (int i = 0; i < n; ++i)
            g[i] = 0.5 * w0 * dom.upper.grid.y1[i] * dom.upper.grid.y1[i] / L;
        for (int l = 0; l < 2; ++l) {
            const LayerData& d = l == 0 ? dom.upper : dom.lower;
            StreamField f = solve_layer(d, g, FixedPointSettings{});
            std::vector<double> tr = neumann_trace(f.phi, d.grid, Side::right);
            std::vector<double> w = exit_condition(f.phi, d);
            double e = 0.0;
            for (int j = 1; j < d.n2() - 1; ++j)
                e = std::max(e, std::abs(tr[j] - w[j]));
            err[l][k] = e;
        }
        ++k;
    }
    for (int l = 0; l < 2; ++l) {
        EXPECT_GE(observed_order(err[l][0], err[l][1]), 1.9) << l;
        EXPECT_GE(observed_order(err[l][1], err[l][2]), 1.9) << l;
    }
}
