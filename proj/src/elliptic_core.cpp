#include "cdnozzle/elliptic_core.hpp"

#include "cdnozzle/errors.hpp"

#include <Eigen/IterativeLinearSolvers>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cdnozzle {

CoefficientField::CoefficientField(int n1_, int n2_)
    : n1(n1_), n2(n2_), a11(size_t(n1_) * n2_, 0.0), a12(a11), a21(a11), a22(a11), f1(a11), f2(a11)
{
}

CoefficientField CoefficientField::constant(const LayerGrid& g, double a11, double a22, double a12,
                                            double a21)
{
    CoefficientField c(g);
    std::fill(c.a11.begin(), c.a11.end(), a11);
    std::fill(c.a22.begin(), c.a22.end(), a22);
    std::fill(c.a12.begin(), c.a12.end(), a12);
    std::fill(c.a21.begin(), c.a21.end(), a21);
    return c;
}

const SideCondition& MixedBvp::side(Side s) const
{
    switch (s) {
    case Side::left: return left;
    case Side::right: return right;
    case Side::bottom: return bottom;
    case Side::top: return top;
    }
    return left;
}

MixedBvp MixedBvp::layer(std::vector<double> entrance, std::vector<double> exit_slope,
                         std::vector<double> interface, std::vector<double> wall)
{
    MixedBvp b;
    b.left = {BcKind::dirichlet, std::move(entrance)};
    b.right = {BcKind::neumann, std::move(exit_slope)};
    b.bottom = {BcKind::dirichlet, std::move(interface)};
    b.top = {BcKind::dirichlet, std::move(wall)};
    return b;
}

void check_ellipticity(const CoefficientField& c)
{
    for (int i = 0; i < c.n1; ++i)
        for (int j = 0; j < c.n2; ++j) {
            const size_t k = c.at(i, j);
            const double off = 0.5 * (c.a12[k] + c.a21[k]);
            const double det = c.a11[k] * c.a22[k] - off * off;
            if (!(c.a11[k] > 0.0) || !(c.a22[k] > 0.0) || !(det > 0.0)) {
                std::ostringstream os;
                os << "non-elliptic coefficients at node (" << i << ", " << j << "): a11=" << c.a11[k]
                   << " a22=" << c.a22[k] << " a12=" << c.a12[k] << " a21=" << c.a21[k];
                throw AssemblyError(os.str(), i, j);
            }
        }
}

namespace {

struct RowAcc {
    int node[32];
    double val[32];
    int n = 0;

    void add(int k, double v)
    {
        for (int l = 0; l < n; ++l)
            if (node[l] == k) {
                val[l] += v;
                return;
            }
        node[n] = k;
        val[n] = v;
        ++n;
    }
};

double harmonic(double a, double b) { return 2.0 * a * b / (a + b); }

void check_sides(const LayerGrid& g, const MixedBvp& bvp)
{
    auto need = [](const SideCondition& s, int n, const char* name) {
        if (static_cast<int>(s.values.size()) != n) {
            std::ostringstream os;
            os << "boundary data on the " << name << " side has " << s.values.size() << " values, expected " << n;
            throw ConsistencyError(os.str());
        }
    };
    need(bvp.left, g.n2(), "left");
    need(bvp.right, g.n2(), "right");
    need(bvp.bottom, g.n1(), "bottom");
    need(bvp.top, g.n1(), "top");
    auto corner = [](const SideCondition& a, double va, const SideCondition& b, double vb, const char* where) {
        if (a.kind == BcKind::dirichlet && b.kind == BcKind::dirichlet && !(std::abs(va - vb) <= 1e-12)) {
            std::ostringstream os;
            os << "incompatible Dirichlet data at the " << where << " corner: " << va << " vs " << vb;
            throw ConsistencyError(os.str(), std::abs(va - vb));
        }
    };
    const int n1 = g.n1(), n2 = g.n2();
    corner(bvp.left, bvp.left.values[0], bvp.bottom, bvp.bottom.values[0], "lower-left");
    corner(bvp.left, bvp.left.values[n2 - 1], bvp.top, bvp.top.values[0], "upper-left");
    corner(bvp.right, bvp.right.values[0], bvp.bottom, bvp.bottom.values[n1 - 1], "lower-right");
    corner(bvp.right, bvp.right.values[n2 - 1], bvp.top, bvp.top.values[n1 - 1], "upper-right");
}

// Dirichlet values (NaN at unknown nodes)
GridField dirichlet_values(const LayerGrid& g, const MixedBvp& bvp)
{
    const int n1 = g.n1(), n2 = g.n2();
    GridField d(n1, n2, std::nan(""));
    // bottom/top win over left/right at shared corners; the data agree there anyway
    if (bvp.left.kind == BcKind::dirichlet)
        for (int j = 0; j < n2; ++j)
            d(0, j) = bvp.left.values[j];
    if (bvp.right.kind == BcKind::dirichlet)
        for (int j = 0; j < n2; ++j)
            d(n1 - 1, j) = bvp.right.values[j];
    if (bvp.bottom.kind == BcKind::dirichlet)
        for (int i = 0; i < n1; ++i)
            d(i, 0) = bvp.bottom.values[i];
    if (bvp.top.kind == BcKind::dirichlet)
        for (int i = 0; i < n1; ++i)
            d(i, n2 - 1) = bvp.top.values[i];
    return d;
}

// outward flux balance of the control volume of node (i, j): sum acc * phi + constant
void accumulate(const LayerGrid& g, const CoefficientField& c, const MixedBvp& bvp, int i, int j,
                RowAcc& acc, double& constant)
{
    const int n1 = g.n1(), n2 = g.n2();
    const std::vector<double>& x = g.y1;
    const std::vector<double>& y = g.y2;
    auto idx = [n2](int a, int b) { return a * n2 + b; };

    auto add_d1 = [&](int a, int b, double factor) {
        if (factor == 0.0)
            return;
        if (a == 0 && bvp.left.kind == BcKind::neumann) {
            constant += factor * bvp.left.values[b];
            return;
        }
        if (a == n1 - 1 && bvp.right.kind == BcKind::neumann) {
            constant += factor * bvp.right.values[b];
            return;
        }
        const Stencil3 s = derivative_stencil(x, a);
        for (int l = 0; l < 3; ++l)
            acc.add(idx(s.first + l, b), factor * s.w[l]);
    };
    auto add_d2 = [&](int a, int b, double factor) {
        if (factor == 0.0)
            return;
        if (b == 0 && bvp.bottom.kind == BcKind::neumann) {
            constant += factor * bvp.bottom.values[a];
            return;
        }
        if (b == n2 - 1 && bvp.top.kind == BcKind::neumann) {
            constant += factor * bvp.top.values[a];
            return;
        }
        const Stencil3 s = derivative_stencil(y, b);
        for (int l = 0; l < 3; ++l)
            acc.add(idx(a, s.first + l), factor * s.w[l]);
    };

    const double ly = 0.5 * ((j > 0 ? y[j] - y[j - 1] : 0.0) + (j < n2 - 1 ? y[j + 1] - y[j] : 0.0));
    const double lx = 0.5 * ((i > 0 ? x[i] - x[i - 1] : 0.0) + (i < n1 - 1 ? x[i + 1] - x[i] : 0.0));
    const size_t p = c.at(i, j);

    if (i < n1 - 1) {
        const size_t q = c.at(i + 1, j);
        const double hx = x[i + 1] - x[i];
        const double k = ly * harmonic(c.a11[p], c.a11[q]) / hx;
        const double cross = 0.5 * ly * 0.5 * (c.a12[p] + c.a12[q]);
        acc.add(idx(i + 1, j), k);
        acc.add(idx(i, j), -k);
        add_d2(i, j, cross);
        add_d2(i + 1, j, cross);
        constant -= ly * 0.5 * (c.f1[p] + c.f1[q]);
    } else if (bvp.right.kind == BcKind::neumann) {
        constant += ly * (c.a11[p] * bvp.right.values[j] - c.f1[p]);
        add_d2(i, j, ly * c.a12[p]);
    }
    if (i > 0) {
        const size_t q = c.at(i - 1, j);
        const double hx = x[i] - x[i - 1];
        const double k = ly * harmonic(c.a11[p], c.a11[q]) / hx;
        const double cross = 0.5 * ly * 0.5 * (c.a12[p] + c.a12[q]);
        acc.add(idx(i - 1, j), k);
        acc.add(idx(i, j), -k);
        add_d2(i - 1, j, -cross);
        add_d2(i, j, -cross);
        constant += ly * 0.5 * (c.f1[p] + c.f1[q]);
    } else if (bvp.left.kind == BcKind::neumann) {
        constant -= ly * (c.a11[p] * bvp.left.values[j] - c.f1[p]);
        add_d2(i, j, -ly * c.a12[p]);
    }
    if (j < n2 - 1) {
        const size_t q = c.at(i, j + 1);
        const double hy = y[j + 1] - y[j];
        const double k = lx * harmonic(c.a22[p], c.a22[q]) / hy;
        const double cross = 0.5 * lx * 0.5 * (c.a21[p] + c.a21[q]);
        acc.add(idx(i, j + 1), k);
        acc.add(idx(i, j), -k);
        add_d1(i, j, cross);
        add_d1(i, j + 1, cross);
        constant -= lx * 0.5 * (c.f2[p] + c.f2[q]);
    } else if (bvp.top.kind == BcKind::neumann) {
        constant += lx * (c.a22[p] * bvp.top.values[i] - c.f2[p]);
        add_d1(i, j, lx * c.a21[p]);
    }
    if (j > 0) {
        const size_t q = c.at(i, j - 1);
        const double hy = y[j] - y[j - 1];
        const double k = lx * harmonic(c.a22[p], c.a22[q]) / hy;
        const double cross = 0.5 * lx * 0.5 * (c.a21[p] + c.a21[q]);
        acc.add(idx(i, j - 1), k);
        acc.add(idx(i, j), -k);
        add_d1(i, j - 1, -cross);
        add_d1(i, j, -cross);
        constant += lx * 0.5 * (c.f2[p] + c.f2[q]);
    } else if (bvp.bottom.kind == BcKind::neumann) {
        constant -= lx * (c.a22[p] * bvp.bottom.values[i] - c.f2[p]);
        add_d1(i, j, -lx * c.a21[p]);
    }
}

double control_volume_area(const LayerGrid& g, int i, int j)
{
    const std::vector<double>& x = g.y1;
    const std::vector<double>& y = g.y2;
    const int n1 = g.n1(), n2 = g.n2();
    const double ly = 0.5 * ((j > 0 ? y[j] - y[j - 1] : 0.0) + (j < n2 - 1 ? y[j + 1] - y[j] : 0.0));
    const double lx = 0.5 * ((i > 0 ? x[i] - x[i - 1] : 0.0) + (i < n1 - 1 ? x[i + 1] - x[i] : 0.0));
    return lx * ly;
}

void build(const LayerGrid& g, const CoefficientField& c, const MixedBvp& bvp, const std::vector<double>* source,
           LinearSystem* sys, Eigen::VectorXd& rhs, bool want_matrix)
{
    if (c.n1 != g.n1() || c.n2 != g.n2())
        throw ConsistencyError("coefficient field does not match the grid");
    if (source && static_cast<int>(source->size()) != g.size())
        throw ConsistencyError("source does not match the grid");
    check_sides(g, bvp);
    check_ellipticity(c);
    const int n1 = g.n1(), n2 = g.n2();
    GridField dir = dirichlet_values(g, bvp);
    std::vector<int> unknown(size_t(n1) * n2, -1);
    std::vector<int> nodes;
    for (int k = 0; k < n1 * n2; ++k)
        if (std::isnan(dir.v[k])) {
            unknown[k] = static_cast<int>(nodes.size());
            nodes.push_back(k);
        }
    const int n = static_cast<int>(nodes.size());
    rhs = Eigen::VectorXd::Zero(n);
    std::vector<Eigen::Triplet<double>> trip;
    if (want_matrix)
        trip.reserve(size_t(n) * 9);
    for (int r = 0; r < n; ++r) {
        const int i = nodes[r] / n2, j = nodes[r] % n2;
        RowAcc acc;
        double constant = 0.0;
        accumulate(g, c, bvp, i, j, acc, constant);
        double b = constant;
        if (source)
            b -= (*source)[nodes[r]] * control_volume_area(g, i, j);
        for (int l = 0; l < acc.n; ++l) {
            const int col = unknown[acc.node[l]];
            if (col < 0) {
                b += acc.val[l] * dir.v[acc.node[l]];
            } else if (want_matrix) {
                trip.emplace_back(r, col, -acc.val[l]);
            }
        }
        rhs[r] = b;
    }
    if (want_matrix) {
        for (double& v : dir.v)
            if (std::isnan(v))
                v = 0.0;
        sys->n1 = n1;
        sys->n2 = n2;
        sys->unknown_of_node = std::move(unknown);
        sys->node_of_unknown = std::move(nodes);
        sys->dirichlet = std::move(dir);
        sys->matrix.resize(n, n);
        sys->matrix.setFromTriplets(trip.begin(), trip.end());
        sys->matrix.makeCompressed();
    }
}

}  // namespace

LinearSystem assemble(const LayerGrid& g, const CoefficientField& c, const MixedBvp& bvp,
                      const std::vector<double>* source)
{
    LinearSystem sys;
    Eigen::VectorXd rhs;
    build(g, c, bvp, source, &sys, rhs, true);
    sys.rhs = std::move(rhs);
    return sys;
}

Eigen::VectorXd assemble_rhs(const LayerGrid& g, const CoefficientField& c, const MixedBvp& bvp,
                             const std::vector<double>* source)
{
    Eigen::VectorXd rhs;
    build(g, c, bvp, source, nullptr, rhs, false);
    return rhs;
}

Factorization::Factorization(const LinearSystem& sys) : n_(sys.size()), a_(sys.matrix)
{
    if (n_ == 0)
        return;
    lu_.analyzePattern(a_);
    lu_.factorize(a_);
    if (lu_.info() != Eigen::Success)
        throw NumericError("sparse LU failed: " + lu_.lastErrorMessage(), std::nan(""));
}

Eigen::VectorXd Factorization::solve(const Eigen::VectorXd& b) const
{
    if (n_ == 0)
        return b;
    Eigen::VectorXd x = lu_.solve(b);
    if (lu_.info() != Eigen::Success)
        throw NumericError("sparse LU solve failed", std::nan(""));
    return x;
}

double residual_norm(const LinearSystem& sys, const Eigen::VectorXd& x, const Eigen::VectorXd& b)
{
    if (b.size() == 0)
        return 0.0;
    const Eigen::VectorXd r = b - sys.matrix * x;
    return r.lpNorm<Eigen::Infinity>() / (1.0 + b.lpNorm<Eigen::Infinity>());
}

GridField expand(const LinearSystem& sys, const Eigen::VectorXd& x, const GridField& dirichlet)
{
    GridField phi = dirichlet;
    for (int r = 0; r < sys.size(); ++r)
        phi.v[sys.node_of_unknown[r]] = x[r];
    return phi;
}

namespace {

Eigen::VectorXd solve_iterative(const LinearSystem& sys, const Eigen::VectorXd& b, const SolveOptions& opt,
                                SolveReport& rep)
{
    Eigen::SparseMatrix<double> a = sys.matrix;
    Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> it;
    it.preconditioner().setDroptol(1e-8);
    it.preconditioner().setFillfactor(20);
    it.setTolerance(opt.iterative_tol);
    it.setMaxIterations(opt.max_iterations);
    it.compute(a);
    if (it.info() != Eigen::Success)
        throw NumericError("incomplete LU setup failed", std::nan(""));
    Eigen::VectorXd x = it.solve(b);
    rep.iterations = static_cast<int>(it.iterations());
    // a few correction sweeps if the Krylov tolerance is not enough for the residual target
    for (int k = 0; k < 3 && residual_norm(sys, x, b) > opt.residual_tol; ++k) {
        const Eigen::VectorXd r = b - sys.matrix * x;
        x += it.solve(r);
        rep.iterations += static_cast<int>(it.iterations());
    }
    return x;
}

}  // namespace

GridField solve(const LinearSystem& sys, const SolveOptions& opt, SolveReport* report)
{
    SolveReport rep;
    Eigen::VectorXd x;
    const Eigen::VectorXd& b = sys.rhs;
    if (sys.size() == 0) {
        x = b;
    } else if (opt.force_iterative || sys.size() > opt.direct_limit) {
        rep.iterative = true;
        x = solve_iterative(sys, b, opt, rep);
    } else {
        Factorization lu(sys);
        x = lu.solve(b);
        if (residual_norm(sys, x, b) > opt.residual_tol)
            x += lu.solve(b - sys.matrix * x);
    }
    rep.residual = residual_norm(sys, x, b);
    if (report)
        *report = rep;
    if (!(rep.residual <= opt.residual_tol)) {
        std::ostringstream os;
        os << "linear solve residual " << rep.residual << " exceeds " << opt.residual_tol;
        throw NumericError(os.str(), rep.residual);
    }
    return expand(sys, x, sys.dirichlet);
}

GridField solve_with(const LinearSystem& sys, const Factorization& lu, const Eigen::VectorXd& rhs,
                     const GridField& dirichlet, const SolveOptions& opt)
{
    Eigen::VectorXd x = lu.solve(rhs);
    double res = residual_norm(sys, x, rhs);
    if (res > opt.residual_tol) {
        x += lu.solve(rhs - sys.matrix * x);
        res = residual_norm(sys, x, rhs);
    }
    if (!(res <= opt.residual_tol)) {
        std::ostringstream os;
        os << "linear solve residual " << res << " exceeds " << opt.residual_tol;
        throw NumericError(os.str(), res);
    }
    return expand(sys, x, dirichlet);
}

std::vector<double> neumann_trace(const GridField& phi, const LayerGrid& g, Side side)
{
    const int n1 = g.n1(), n2 = g.n2();
    std::vector<double> d;
    if (side == Side::bottom || side == Side::top) {
        const bool bottom = side == Side::bottom;
        const Stencil3 s = one_sided_stencil(g.y2, bottom ? 0 : n2 - 1, bottom);
        d.resize(n1);
        for (int i = 0; i < n1; ++i)
            d[i] = s.w[0] * phi(i, s.first) + s.w[1] * phi(i, s.first + 1) + s.w[2] * phi(i, s.first + 2);
    } else {
        const bool left = side == Side::left;
        const Stencil3 s = one_sided_stencil(g.y1, left ? 0 : n1 - 1, left);
        d.resize(n2);
        for (int j = 0; j < n2; ++j)
            d[j] = s.w[0] * phi(s.first, j) + s.w[1] * phi(s.first + 1, j) + s.w[2] * phi(s.first + 2, j);
    }
    return d;
}

}  // namespace cdnozzle
