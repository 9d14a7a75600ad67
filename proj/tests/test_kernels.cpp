#include "cdnozzle/errors.hpp"
#include "cdnozzle/kernels.hpp"
#include "cdnozzle/norms.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace cdnozzle;
using namespace cdnozzle::testing;

namespace {

// more threads than cores is fine here; only the partitioning matters
struct Threads {
    explicit Threads(int n) : saved(max_threads()) { set_num_threads(n); }
    ~Threads() { set_num_threads(saved); }
    int saved;
};

LagrangianDomain domain(int n)
{
    DomainSettings s;
    s.n1 = n;
    s.n2 = n;
    return build_lagrangian_domain(reference_problem(1e-2), s);
}

GridField smooth_field(const LayerData& d, double amp)
{
    GridField f(d.grid);
    for (int i = 0; i < d.n1(); ++i)
        for (int j = 0; j < d.n2(); ++j) {
            const double t = d.grid.y2[j] / d.mass_flux;
            f(i, j) = amp * std::sin(3.0 * t) * std::cos(2.0 * d.grid.y1[i]) * t * (1.0 - t);
        }
    return f;
}

}  // namespace

TEST(Kernels, CoefficientFieldSerialEqualsParallel)
{
    Threads th(4);
    LagrangianDomain dom = domain(33);
    for (const LayerData* d : {&dom.upper, &dom.lower}) {
        GridField phi = smooth_field(*d, 1e-2);
        CoefficientField s = coefficient_field(*d, phi, Exec::serial);
        CoefficientField p = coefficient_field(*d, phi, Exec::parallel);
        EXPECT_EQ(s.a11, p.a11);
        EXPECT_EQ(s.a12, p.a12);
        EXPECT_EQ(s.a21, p.a21);
        EXPECT_EQ(s.a22, p.a22);
    }
}

TEST(Kernels, NodalStateSerialEqualsParallel)
{
    Threads th(3);
    LagrangianDomain dom = domain(33);
    for (const LayerData* d : {&dom.upper, &dom.lower}) {
        GridField phi = smooth_field(*d, 1e-2);
        NodalState s = nodal_state(*d, phi, Exec::serial);
        NodalState p = nodal_state(*d, phi, Exec::parallel);
        EXPECT_EQ(s.rho.v, p.rho.v);
        EXPECT_EQ(s.u1.v, p.u1.v);
        EXPECT_EQ(s.u2.v, p.u2.v);
        EXPECT_EQ(s.p.v, p.p.v);
    }
}

TEST(Kernels, BackgroundCoefficientsAreDiagonal)
{
    LagrangianDomain dom = domain(17);
    for (const LayerData* d : {&dom.upper, &dom.lower}) {
        CoefficientField c = coefficient_field(*d, GridField(d->grid));
        // entrance data vary with t, so compare against the a-matrix of each row's own A, B
        for (int j = 0; j < d->n2(); ++j) {
            const size_t k = c.at(3, j);
            EXPECT_EQ(c.a12[k], 0.0);
            EXPECT_EQ(c.a21[k], 0.0);
        }
    }
}

TEST(Kernels, FailureIsReportedAtLowestNode)
{
    Threads th(4);
    LagrangianDomain dom = domain(17);
    const LayerData& d = dom.upper;
    GridField phi(d.grid);
    // a stream gradient far too small in t: the closure has no subsonic root in these columns
    for (int i = 9; i < d.n1(); ++i)
        for (int j = 0; j < d.n2(); ++j)
            phi(i, j) = -0.95 * d.grid.y2[j] / d.mass_flux;
    std::string serial, parallel;
    try {
        nodal_state(d, phi, Exec::serial);
    } catch (const SolverError& e) {
        serial = e.what();
    }
    try {
        nodal_state(d, phi, Exec::parallel);
    } catch (const SolverError& e) {
        parallel = e.what();
    }
    EXPECT_FALSE(serial.empty());
    EXPECT_EQ(serial, parallel);
}

TEST(Kernels, WeightedNormSerialEqualsParallel)
{
    Threads th(4);
    LagrangianDomain dom = domain(33);
    GridField phi = smooth_field(dom.upper, 1.0);
    for (int order : {0, 1, 2}) {
        NormTerms s = discrete_weighted_norm_terms(phi, dom.upper.grid, order, 0.5, -1.5, Exec::serial);
        NormTerms p = discrete_weighted_norm_terms(phi, dom.upper.grid, order, 0.5, -1.5, Exec::parallel);
        EXPECT_EQ(s.derivative_terms, p.derivative_terms);
        EXPECT_EQ(s.holder, p.holder);
        EXPECT_EQ(s.total, p.total);
    }
}
