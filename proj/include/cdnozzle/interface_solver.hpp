#pragma once

#include "cdnozzle/elliptic_core.hpp"
#include "cdnozzle/nonlinear_layer.hpp"
#include "cdnozzle/problem_setup.hpp"

#include <Eigen/Dense>

#include <vector>

namespace cdnozzle {

// g is the primary unknown (g(0) = 0 at every iterate); eta is its nodal derivative
// (centered, one-sided at the two ends)
struct InterfaceCurve {
    std::vector<double> y1, g, eta;

    static InterfaceCurve flat(const std::vector<double>& y1);
    static InterfaceCurve from_curve(const std::vector<double>& y1, std::vector<double> g);
};

struct InterfaceResidual {
    std::vector<double> q;     // Q at the interface nodes
    double max_norm = 0.0;     // over nodes 1..n1-1
    double corner = 0.0;       // Q(0), fixed by the entrance data
    double weighted_norm = 0.0;  // C^{(-alpha)}_{1,alpha} on (0, L)
};

// W2 traces from above minus below; d/dt from one-sided three-point traces, d/dy1 from the
// interface curve stored in the bottom rows
InterfaceResidual pressure_jump(const LagrangianDomain& dom, const StreamField& upper, const StreamField& lower);

// Exact discrete linearization of Q with respect to g at the background flow,
// T = e2+ K+ + e2- K-, where K maps bottom Dirichlet data of the (e1, e2) layer operator to the
// bottom one-sided d/dt trace. Rows and columns are nodes 1..n1-1.
class BackgroundPreconditioner {
public:
    explicit BackgroundPreconditioner(const LagrangianDomain& dom, const SolveOptions& opt = {});

    // g* with T g* = P* on nodes 1..n1-1 and g*(0) = 0
    std::vector<double> curve(const std::vector<double>& p_star) const;
    // eta* = D g*, with eta*(0) = 0
    std::vector<double> slope(const std::vector<double>& p_star) const;
    // T g on nodes 1..n1-1 (entry 0 left at 0)
    std::vector<double> apply(const std::vector<double>& g) const;

    const Eigen::MatrixXd& jacobian() const { return t_; }
    const std::vector<double>& y1() const { return y1_; }

private:
    std::vector<double> y1_;
    Eigen::MatrixXd t_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

// K for one layer grid and the diagonal coefficients (e1, e2): dense (n1-1) x (n1-1)
Eigen::MatrixXd dirichlet_to_trace(const LayerGrid& g, double e1, double e2, const SolveOptions& opt = {});

struct FreeBoundarySettings {
    FixedPointSettings layer;
    double tol_q_rel = 1e-9;  // tol_q = tol_q_rel * P_b
    int max_iters = 30;
    double theta = 1.0;
    int max_halvings = 4;
    double stagnation_factor = 0.95;
    int stagnation_window = 5;
    // inner Picard tolerance tied to the current |Q| (never looser than layer.tol_update)
    bool forcing = true;

    void validate() const;
};

struct ConvergenceReport {
    bool converged = false;
    int iterations = 0;  // outer Newton steps taken
    double tol_q = 0.0;
    std::vector<double> residual_history;  // |Q| over nodes 1..n1-1, starting with the initial curve
    std::vector<double> theta_history;
    std::vector<int> picard_iterations;  // upper + lower, per residual evaluation
    double max_factor = 0.0;       // largest |Q_{k+1}| / |Q_k|
    double geometric_factor = 0.0;  // (|Q_end| / |Q_0|)^(1/k)
    double corner_mismatch = 0.0;
    double max_layer_contraction = 0.0;
};

struct FreeBoundarySolution {
    InterfaceCurve curve;
    StreamField upper, lower;
    InterfaceResidual residual;
    ConvergenceReport report;
};

// both layers for a fixed interface curve, run concurrently
struct LayerPair {
    StreamField upper, lower;
};

LayerPair solve_layers(const LagrangianDomain& dom, const std::vector<double>& g, const FixedPointSettings& s,
                       const LayerPair* warm = nullptr);

FreeBoundarySolution solve_free_boundary(const LagrangianDomain& dom, const FreeBoundarySettings& s = {});

}  // namespace cdnozzle
