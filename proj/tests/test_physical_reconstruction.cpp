#include "cdnozzle/errors.hpp"
#include "cdnozzle/norms.hpp"
#include "cdnozzle/physical_reconstruction.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

using namespace cdnozzle;
using namespace cdnozzle::testing;

namespace {

struct Solved {
    PhysicalProblem problem;
    LagrangianDomain dom;
    FreeBoundarySolution sol;
    PhysicalField upper, lower;
};

std::unique_ptr<Solved> make_run(const PhysicalProblem& p, int n)
{
    auto r = std::make_unique<Solved>();
    r->problem = p;
    DomainSettings s;
    s.n1 = n;
    s.n2 = n;
    r->dom = build_lagrangian_domain(p, s);
    r->sol = solve_free_boundary(r->dom);
    r->upper = inverse_map(r->dom.upper, r->sol.upper, r->sol.curve.g, p.geometry);
    r->lower = inverse_map(r->dom.lower, r->sol.lower, r->sol.curve.g, p.geometry);
    return r;
}

// the refinement studies share solutions
const Solved& reference_run(int n)
{
    static std::map<int, std::unique_ptr<Solved>> cache;
    auto& slot = cache[n];
    if (!slot)
        slot = make_run(reference_problem(1e-2), n);
    return *slot;
}

const Solved& background_run()
{
    static std::unique_ptr<Solved> r = make_run(background_problem(), 65);
    return *r;
}

template <class F>
void expect_order(F measure, double min_order, const char* what)
{
    const double e33 = measure(reference_run(33));
    const double e65 = measure(reference_run(65));
    const double e129 = measure(reference_run(129));
    EXPECT_GT(e33, e65) << what;
    EXPECT_GT(e65, e129) << what;
    EXPECT_GE(observed_order(e33, e65), min_order) << what << ": " << e33 << " " << e65;
    EXPECT_GE(observed_order(e65, e129), min_order) << what << ": " << e65 << " " << e129;
}

}  // namespace

TEST(InverseMap, BackgroundIsLinear)
{
    const Solved& r = background_run();
    const BackgroundSolution& bg = r.dom.background;
    for (int i = 0; i < r.upper.n1; ++i) {
        for (int j = 0; j < r.upper.n2; ++j) {
            EXPECT_NEAR(r.upper.x2(i, j), r.upper.y2[j] / (bg.upper.state.rho * bg.upper.state.u1), 1e-14);
            EXPECT_NEAR(r.lower.x2(i, j), r.lower.y2[j] / (bg.lower.state.rho * bg.lower.state.u1), 1e-14);
        }
        EXPECT_NEAR(r.upper.x2(i, r.upper.n2 - 1), 1.0, 1e-14);
        EXPECT_NEAR(r.lower.x2(i, r.lower.n2 - 1), -1.0, 1e-14);
    }
    EXPECT_LE(std::max(r.upper.wall_defect, r.lower.wall_defect), 1e-14);
}

TEST(InverseMap, ColumnsMonotone)
{
    const Solved& r = reference_run(65);
    for (int i = 0; i < r.upper.n1; ++i)
        for (int j = 1; j < r.upper.n2; ++j) {
            EXPECT_GT(r.upper.x2(i, j), r.upper.x2(i, j - 1));
            EXPECT_LT(r.lower.x2(i, j), r.lower.x2(i, j - 1));
        }
}

TEST(InverseMap, WallDefectSmallAndConverging)
{
    const Solved& r = reference_run(65);
    EXPECT_LE(r.upper.wall_defect, 5e-4);
    EXPECT_LE(r.lower.wall_defect, 5e-4);
    expect_order([](const Solved& x) { return std::max(x.upper.wall_defect, x.lower.wall_defect); }, 1.5,
                 "wall defect");
}

TEST(InverseMap, TightGeometryToleranceRaises)
{
    const Solved& r = reference_run(33);
    EXPECT_THROW(inverse_map(r.dom.upper, r.sol.upper, r.sol.curve.g, r.problem.geometry, 1e-12),
                 ConsistencyError);
}

TEST(InverseMap, InterfaceImagesCoincide)
{
    const Solved& r = reference_run(65);
    for (int i = 0; i < r.upper.n1; ++i) {
        EXPECT_EQ(r.upper.x2(i, 0), r.sol.curve.g[i]);
        EXPECT_EQ(r.lower.x2(i, 0), r.sol.curve.g[i]);
    }
}

TEST(RankineHugoniot, BackgroundResidualsVanish)
{
    const Solved& r = background_run();
    const RhReport rh = rh_residuals(r.upper, r.lower, r.sol.curve);
    EXPECT_LE(rh.max_tangency_upper, 1e-11);
    EXPECT_LE(rh.max_tangency_lower, 1e-11);
    EXPECT_LE(rh.max_pressure_jump, 1e-11);
}

TEST(RankineHugoniot, PressureJumpMatchesQUpToInterpolation)
{
    for (int n : {33, 65, 129}) {
        const Solved& r = reference_run(n);
        const RhReport rh = rh_residuals(r.upper, r.lower, r.sol.curve);
        const double h = std::max(r.dom.upper.grid.max_spacing(), r.dom.lower.grid.max_spacing());
        EXPECT_LE(std::abs(rh.max_pressure_jump - r.sol.residual.max_norm), h * h * r.dom.background.pressure)
            << "n = " << n;
    }
    expect_order([](const Solved& x) { return rh_residuals(x.upper, x.lower, x.sol.curve).max_pressure_jump; }, 1.5,
                 "pressure jump");
}

TEST(RankineHugoniot, TangencyConverges)
{
    expect_order([](const Solved& x) { return rh_residuals(x.upper, x.lower, x.sol.curve).max_tangency_upper; }, 1.5,
                 "upper tangency");
    expect_order([](const Solved& x) { return rh_residuals(x.upper, x.lower, x.sol.curve).max_tangency_lower; }, 1.5,
                 "lower tangency");
}

TEST(Conservation, BackgroundDefectsVanish)
{
    const Solved& r = background_run();
    const ConservationReport cu = conservation_residuals(r.upper, r.dom.upper.mass_flux, r.problem.geometry.wall_upper);
    const ConservationReport cl = conservation_residuals(r.lower, r.dom.lower.mass_flux, r.problem.geometry.wall_lower);
    ASSERT_EQ(cu.stations.size(), 10u);
    EXPECT_DOUBLE_EQ(cu.stations.front(), 0.0);
    EXPECT_DOUBLE_EQ(cu.stations.back(), 1.0);
    EXPECT_LE(cu.max_mass_defect, 1e-12);
    EXPECT_LE(cl.max_mass_defect, 1e-12);
    EXPECT_LE(cu.max_slip, 1e-12);
    EXPECT_LE(cl.max_slip, 1e-12);
}

TEST(Conservation, MassDefectSecondOrderSmall)
{
    const Solved& r = reference_run(129);
    EXPECT_LE(conservation_residuals(r.upper, r.dom.upper.mass_flux, r.problem.geometry.wall_upper).max_mass_defect,
              1e-6);
    EXPECT_LE(conservation_residuals(r.lower, r.dom.lower.mass_flux, r.problem.geometry.wall_lower).max_mass_defect,
              1e-6);
    expect_order(
        [](const Solved& x) {
            return std::max(
                conservation_residuals(x.upper, x.dom.upper.mass_flux, x.problem.geometry.wall_upper).max_mass_defect,
                conservation_residuals(x.lower, x.dom.lower.mass_flux, x.problem.geometry.wall_lower).max_mass_defect);
        },
        1.5, "mass defect");
}

TEST(Conservation, WallSlipConverges)
{
    expect_order(
        [](const Solved& x) {
            return std::max(
                conservation_residuals(x.upper, x.dom.upper.mass_flux, x.problem.geometry.wall_upper).max_slip,
                conservation_residuals(x.lower, x.dom.lower.mass_flux, x.problem.geometry.wall_lower).max_slip);
        },
        1.5, "wall slip");
}

TEST(Transport, ExactAlongLagrangianRows)
{
    const Solved& r = reference_run(65);
    for (const PhysicalField* f : {&r.upper, &r.lower})
        for (int i = 0; i < f->n1; ++i)
            for (int j = 0; j < f->n2; ++j) {
                EXPECT_EQ(f->a(i, j), f->a(0, j));
                EXPECT_EQ(f->b(i, j), f->b(0, j));
            }
}

TEST(Transport, PhysicalStreamlinesConverge)
{
    const Solved& bg = background_run();
    const TransportReport tb = streamline_transport(bg.upper);
    EXPECT_LE(std::max(tb.a_residual, tb.b_residual), 1e-12);
    EXPECT_LE(tb.max_row_offset, 1e-12);
    auto worst = [](const Solved& x) {
        const TransportReport u = streamline_transport(x.upper), l = streamline_transport(x.lower);
        return std::max({u.a_residual, u.b_residual, l.a_residual, l.b_residual});
    };
    expect_order(worst, 1.5, "A/B along streamlines");
    expect_order(
        [](const Solved& x) {
            return std::max(streamline_transport(x.upper).max_row_offset, streamline_transport(x.lower).max_row_offset);
        },
        1.5, "streamline offset");
}

TEST(Interpolation, ReproducesNodesAndLinearData)
{
    const Solved& r = reference_run(33);
    const PhysicalField& f = r.upper;
    GridField lin(f.n1, f.n2);
    for (int i = 0; i < f.n1; ++i)
        for (int j = 0; j < f.n2; ++j)
            lin(i, j) = 2.0 * f.y1[i] - 3.0 * f.x2(i, j);
    for (int i = 0; i < f.n1; i += 5)
        for (int j = 0; j < f.n2; j += 3)
            EXPECT_NEAR(interpolate(f, f.p, f.y1[i], f.x2(i, j)), f.p(i, j), 1e-14);
    // linear in x2 on each column and in x1 between columns is exact at node columns
    EXPECT_NEAR(interpolate(f, lin, f.y1[7], 0.5), 2.0 * f.y1[7] - 1.5, 1e-13);
}

TEST(Subsonicity, MarginKept)
{
    const Solved& r = reference_run(65);
    const BackgroundSolution& bg = r.dom.background;
    const double bg_mach = std::max(bg.upper.state.mach(bg.gamma), bg.lower.state.mach(bg.gamma));
    const double m = std::max(max_mach(r.upper), max_mach(r.lower));
    EXPECT_LT(m, 1.0);
    EXPECT_GE(1.0 - m, 0.9 * (1.0 - bg_mach));
}

TEST(StateDeviation, BackgroundAndLinearResponse)
{
    const Solved& bg = background_run();
    EXPECT_LE(state_deviation(bg.upper, bg.dom.background.upper), 1e-10);
    EXPECT_LE(state_deviation(bg.lower, bg.dom.background.lower), 1e-10);
    std::vector<double> ratio;
    for (double sigma : {1e-2, 5e-3, 2.5e-3}) {
        const auto r = make_run(reference_problem(sigma), 33);
        ratio.push_back(std::max(state_deviation(r->upper, r->dom.background.upper),
                                 state_deviation(r->lower, r->dom.background.lower)) /
                        sigma);
    }
    const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
    EXPECT_LE((*hi - *lo) / *lo, 0.25);
}

TEST(WeightedNorm, ConstantGivesTheConstant)
{
    const LayerGrid g = make_layer_grid(1.0, 1.0, 17, 17, 0.0);
    const GridField c(g, 2.5);
    EXPECT_NEAR(discrete_weighted_norm(c, g, 2, 0.5, -1.5), 2.5, 1e-12);
}

TEST(WeightedNorm, LinearInY2)
{
    const LayerGrid g = make_layer_grid(1.0, 1.0, 17, 17, 0.0);
    GridField f(g);
    for (int i = 0; i < g.n1(); ++i)
        for (int j = 0; j < g.n2(); ++j)
            f(i, j) = g.y2[j];
    const NormTerms t = discrete_weighted_norm_terms(f, g, 1, 0.5, -1.5);
    EXPECT_NEAR(t.derivative_terms[0], 1.0, 1e-14);
    EXPECT_NEAR(t.derivative_terms[1], 1.0, 1e-12);
    EXPECT_NEAR(t.holder, 0.0, 1e-10);
}

TEST(WeightedNorm, CornerPowerFiniteOnlyWhenWeighted)
{
    // y2^{1+alpha}: the weighted C^{2,alpha} norm settles, the unweighted second derivative blows up
    std::vector<double> weighted, plain;
    for (int n : {33, 65, 129, 257}) {
        const LayerGrid g = make_layer_grid(1.0, 1.0, 9, n, 0.0);
        GridField f(g);
        for (int i = 0; i < g.n1(); ++i)
            for (int j = 0; j < g.n2(); ++j)
                f(i, j) = std::pow(g.y2[j], 1.5);
        weighted.push_back(discrete_weighted_norm(f, g, 2, 0.5, -1.5));
        plain.push_back(discrete_weighted_norm_terms(f, g, 2, 0.5, -3.0).derivative_terms[2]);
    }
    for (size_t k = 1; k < weighted.size(); ++k) {
        EXPECT_LE(std::abs(weighted[k] - weighted[k - 1]), 0.1 * weighted[k - 1]);
        EXPECT_GE(plain[k], 1.3 * plain[k - 1]);
    }
}
