#pragma once

#include "cdnozzle/grid.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <vector>

namespace cdnozzle {

// Node values of the coefficients and of the divergence source of
//   d_i (a_ij d_j phi - f_i) = s
// Face values are formed during assembly: harmonic means of a11 (y1 faces) and a22 (y2
// faces), arithmetic means of a12, a21, f1 and f2.
struct CoefficientField {
    int n1 = 0, n2 = 0;
    std::vector<double> a11, a12, a21, a22, f1, f2;

    CoefficientField() = default;
    CoefficientField(int n1_, int n2_);
    explicit CoefficientField(const LayerGrid& g) : CoefficientField(g.n1(), g.n2()) {}

    static CoefficientField constant(const LayerGrid& g, double a11, double a22, double a12 = 0.0,
                                     double a21 = 0.0);
    size_t at(int i, int j) const { return size_t(i) * n2 + j; }
};

enum class Side { left, right, bottom, top };
enum class BcKind { dirichlet, neumann };

// values at the side's nodes (n2 values on left/right, n1 on bottom/top); a Neumann value is
// the coordinate derivative d/dy1 (left, right) or d/dy2 (bottom, top), not the outward one
struct SideCondition {
    BcKind kind = BcKind::dirichlet;
    std::vector<double> values;
};

struct MixedBvp {
    SideCondition left, right, bottom, top;

    const SideCondition& side(Side s) const;
    // the layer problem: Dirichlet entrance, interface and wall, Neumann exit
    static MixedBvp layer(std::vector<double> entrance, std::vector<double> exit_slope,
                          std::vector<double> interface, std::vector<double> wall);
};

struct LinearSystem {
    int n1 = 0, n2 = 0;
    std::vector<int> unknown_of_node;  // -1 at Dirichlet nodes
    std::vector<int> node_of_unknown;
    GridField dirichlet;  // imposed values at Dirichlet nodes
    Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;
    Eigen::VectorXd rhs;

    int size() const { return static_cast<int>(node_of_unknown.size()); }
};

// Vertex-centred box finite volumes. Rows are negated flux balances, so the diagonal is
// positive. Dirichlet nodes are eliminated; a node on a Dirichlet side is Dirichlet even
// when it also lies on a Neumann side. `source` holds node values of s (optional).
LinearSystem assemble(const LayerGrid& g, const CoefficientField& c, const MixedBvp& bvp,
                      const std::vector<double>* source = nullptr);
// right-hand side only, for a matrix already assembled with the same coefficients
Eigen::VectorXd assemble_rhs(const LayerGrid& g, const CoefficientField& c, const MixedBvp& bvp,
                             const std::vector<double>* source = nullptr);

// throws AssemblyError naming the first node whose symmetrised a is not positive definite
void check_ellipticity(const CoefficientField& c);

struct SolveOptions {
    bool force_iterative = false;
    int direct_limit = 100000;  // unknowns; larger systems go to BiCGSTAB
    double residual_tol = 1e-11;  // on |Ax - b|_inf / (1 + |b|_inf)
    double iterative_tol = 1e-14;
    int max_iterations = 5000;
};

// sparse LU (COLAMD ordering) of the system matrix, reusable for many right-hand sides
class Factorization {
public:
    explicit Factorization(const LinearSystem& sys);
    Factorization(const Factorization&) = delete;
    Factorization& operator=(const Factorization&) = delete;

    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
    int size() const { return n_; }

private:
    int n_ = 0;
    Eigen::SparseMatrix<double> a_;
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
};

struct SolveReport {
    bool iterative = false;
    int iterations = 0;
    double residual = 0.0;  // |Ax - b|_inf / (1 + |b|_inf)
};

// full grid function: unknowns from the solve, Dirichlet values as imposed
GridField solve(const LinearSystem& sys, const SolveOptions& opt = {}, SolveReport* report = nullptr);
GridField solve_with(const LinearSystem& sys, const Factorization& lu, const Eigen::VectorXd& rhs,
                     const GridField& dirichlet, const SolveOptions& opt = {});
GridField expand(const LinearSystem& sys, const Eigen::VectorXd& x, const GridField& dirichlet);

double residual_norm(const LinearSystem& sys, const Eigen::VectorXd& x, const Eigen::VectorXd& b);

// one-sided three-point derivative normal to a side (coordinate direction: d/dy1 on
// left/right, d/dy2 on bottom/top), sampled at the side's nodes
std::vector<double> neumann_trace(const GridField& phi, const LayerGrid& g, Side side);

}  // namespace cdnozzle
