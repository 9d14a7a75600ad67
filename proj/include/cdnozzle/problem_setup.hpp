#pragma once

#include "cdnozzle/gas_closure.hpp"
#include "cdnozzle/grid.hpp"
#include "cdnozzle/profile.hpp"

#include <string>
#include <utility>
#include <vector>

namespace cdnozzle {

struct NozzleGeometry {
    double length = 1.0;
    Profile wall_upper;  // g+(x1), g+(0) = 1
    Profile wall_lower;  // g-(x1), g-(0) = -1

    void validate() const;  // throws ConfigError
};

struct EntranceProfiles {
    Profile a;  // entropy A_en(x2)
    Profile b;  // Bernoulli B_en(x2)
    Profile j;  // mass distribution J_en(x2) = rho u1
};

struct BoundaryData {
    EntranceProfiles upper;  // on [0, 1]
    EntranceProfiles lower;  // on [-1, 0]
    Profile exit_angle;      // omega_ex(x2) = u2/u1 on [g-(L), g+(L)]

    void validate(const NozzleGeometry& geom) const;
};

struct BackgroundLayer {
    ThermoState state;
    double e1 = 0.0;  // u_b
    double e2 = 0.0;  // c^2 u^3 rho^2 / (c^2 - u^2)
    double mass_flux = 0.0;
};

struct BackgroundSolution {
    BackgroundLayer upper;
    BackgroundLayer lower;
    double pressure = 0.0;
    double gamma = 1.4;
};

// states carry (rho, u, 0, P); rejects unequal pressures and non-subsonic layers
BackgroundSolution build_background(const ThermoState& upper, const ThermoState& lower, double gamma);
BackgroundSolution build_background(double rho_upper, double u_upper, double rho_lower, double u_lower,
                                    double pressure, double gamma);

struct MassFluxes {
    double lower = 0.0;
    double upper = 0.0;
};

MassFluxes mass_fluxes(const BoundaryData& data);

struct PhysicalProblem {
    GasConstants gas;
    BackgroundSolution background;
    NozzleGeometry geometry;
    BoundaryData data;

    void validate() const;
};

// unperturbed data: constant entrance profiles, straight walls, zero exit angle
NozzleGeometry straight_nozzle(double length);
BoundaryData background_boundary_data(const BackgroundSolution& bg);

struct SigmaBreakdown {
    std::vector<std::pair<std::string, double>> terms;
    double total = 0.0;
};

// sum of C^{1,alpha} entrance deviations and C^{2,alpha} exit-angle and wall deviations
SigmaBreakdown perturbation_size(const PhysicalProblem& p, double alpha = 0.5, int samples = 257);

// every deviation from the background multiplied by s
PhysicalProblem scale_perturbation(const PhysicalProblem& p, double s);

enum class Layer { upper, lower };

inline const char* layer_name(Layer l) { return l == Layer::upper ? "upper" : "lower"; }

// One layer in its canonical frame: t in [0, m] with the interface at t = 0 and the wall at
// t = m. The upper layer is used as is. The lower layer is mirrored: t = -y2 and
// psi(y1, t) = -phi-(y1, -t), so its data are reflected profiles, the wall -g-, the exit
// angle x -> -omega_ex(-x) and interface data -g_cd.
struct LayerData {
    Layer layer = Layer::upper;
    double sign = 1.0;  // +1 upper, -1 lower
    double gamma = 1.4;
    ClosureOptions closure;
    double mass_flux = 0.0;  // m, rectangle height
    BackgroundLayer background;
    double background_a = 0.0, background_b = 0.0;
    LayerGrid grid;

    // canonical entrance profiles of x and their composition with the mass coordinate
    EntranceProfiles entrance;
    // x(t) at the t nodes; the march is rescaled so that x(m) = 1 exactly
    std::vector<double> x2_entrance;
    std::vector<double> a_en, b_en, j_en;
    Profile wall;        // canonical wall, wall(0) = 1
    Profile exit_angle;  // canonical exit angle
    double exit_lo = 0.0, exit_hi = 0.0;  // canonical exit span
    double endpoint_defect = 0.0;         // x(m) - 1 before rescaling

    int n1() const { return grid.n1(); }
    int n2() const { return grid.n2(); }
    double base_gradient() const { return 1.0 / mass_flux; }  // d/dt of t/m

    // Dirichlet data of the perturbation psi - t/m
    std::vector<double> entrance_dirichlet() const;  // along y1 = 0
    std::vector<double> wall_dirichlet() const;      // along t = m
};

struct LagrangianDomain {
    LayerData upper;
    LayerData lower;
    double length = 1.0;
    double alpha = 0.5;
    BackgroundSolution background;
    double gamma = 1.4;

    const LayerData& layer(Layer l) const { return l == Layer::upper ? upper : lower; }
};

struct DomainSettings {
    int n1 = 65;
    int n2 = 65;
    double alpha = 0.5;
    double grading = -1.0;  // negative: default_grading(alpha)
    ClosureOptions closure;
};

// x(t) for dx/dt = 1/J(x), x(0) = 0, at the nodes t (RK4 with `oversample` substeps per
// interval, at least `min_steps` steps overall); throws ConsistencyError if |x(m) - 1| > tol
std::vector<double> entrance_to_lagrangian(const Profile& j, double m, const std::vector<double>& t,
                                           double* endpoint_defect = nullptr, int oversample = 4,
                                           int min_steps = 256, double tol = 1e-10);

LayerData build_layer(const PhysicalProblem& p, Layer layer, const DomainSettings& s);
LagrangianDomain build_lagrangian_domain(const PhysicalProblem& p, const DomainSettings& s);

}  // namespace cdnozzle
