#pragma once

#include "cdnozzle/interface_solver.hpp"
#include "cdnozzle/nonlinear_layer.hpp"
#include "cdnozzle/problem_setup.hpp"

#include <vector>

namespace cdnozzle {

// Physical samples of one layer on its structured Lagrangian node set. Node (i, j) sits at
// x1 = y1_i; j = 0 is the interface and j = n2-1 the wall (the lower layer runs downward).
struct PhysicalField {
    Layer layer = Layer::upper;
    int n1 = 0, n2 = 0;
    std::vector<double> y1, y2;  // physical Lagrangian coordinates (y2 <= 0 below the interface)
    GridField x2, rho, u1, u2, p, a, b, mach;
    std::vector<double> wall;  // g(x1_i)
    double wall_defect = 0.0;  // max |x2(i, n2-1) - g(x1_i)|
    double tol_geom = 0.0;

    double x1(int i) const { return y1[i]; }
};

// 10 h^2 max(1, max |g''|) with h the largest spacing of the layer grid
double default_tol_geom(const LayerData& d, const NozzleGeometry& geom);

// x2 = g_cd + int_0^{y2} 1/(rho u1) per column (cumulative trapezoid); throws ConsistencyError
// if the wall defect exceeds tol_geom (tol_geom <= 0: default_tol_geom) or u1 <= 0 anywhere
PhysicalField inverse_map(const LayerData& d, const StreamField& f, const std::vector<double>& g_cd,
                          const NozzleGeometry& geom, double tol_geom = -1.0);

struct RhReport {
    // per interface node: u2/u1 traces minus g_cd' (centered), and P+ - P-
    std::vector<double> tangency_upper, tangency_lower, pressure_jump;
    double max_tangency_upper = 0.0, max_tangency_lower = 0.0, max_pressure_jump = 0.0;
};

// Traces come from quadratic extrapolation of the first three interior nodes of each column
// to the interface, so they are independent of the boundary-row data the solver imposed.
RhReport rh_residuals(const PhysicalField& upper, const PhysicalField& lower, const InterfaceCurve& curve);

struct ConservationReport {
    std::vector<double> stations;     // x1
    std::vector<double> mass_defect;  // |int rho u1 dx2 - m| at the stations
    double max_mass_defect = 0.0;
    std::vector<double> slip;         // per y1 node: u2/u1 on the wall row minus g'
    double max_slip = 0.0;
};

// trapezoid flux integrals per column, linearly interpolated to `stations` equispaced stations
// (both ends included)
ConservationReport conservation_residuals(const PhysicalField& f, double mass_flux, const Profile& wall,
                                          int stations = 10);

// piecewise linear interpolation: in x2 along the two neighbouring columns, then in x1
double interpolate(const PhysicalField& f, const GridField& v, double x1, double x2);

struct TransportReport {
    double a_residual = 0.0;  // max |A(x(s)) - A(x(0))| along traced streamlines
    double b_residual = 0.0;
    double max_row_offset = 0.0;  // traced x2 minus the reconstructed row image, at the columns
};

// Streamlines traced in physical space from every interior entrance node by RK4 on
// dx2/dx1 = u2/u1 (interpolated, `substeps` per column interval)
TransportReport streamline_transport(const PhysicalField& f, int substeps = 4);

// max over nodes of |rho - rho_b|, |u1 - u_b|, |u2|, |P - P_b|
double state_deviation(const PhysicalField& f, const BackgroundLayer& bg);

double max_mach(const PhysicalField& f);

}  // namespace cdnozzle
