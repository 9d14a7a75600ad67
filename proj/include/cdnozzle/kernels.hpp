#pragma once

#include "cdnozzle/elliptic_core.hpp"
#include "cdnozzle/exec.hpp"
#include "cdnozzle/problem_setup.hpp"

namespace cdnozzle {

// nodal gradient of the full canonical stream function t/m + phi
struct GradientField {
    GridField d1, d2;
};

GradientField full_gradient(const LayerData& d, const GridField& phi);

// a_ij(grad phi) at every node with the layer's entrance A, B; f is left zero.
// Closure failures are rethrown after the loop, the one at the lowest node index first.
CoefficientField coefficient_field(const LayerData& d, const GridField& phi, Exec exec = Exec::parallel);

// density and physical velocity (u2 carries the layer sign) and pressure at every node
struct NodalState {
    GridField rho, u1, u2, p;
};

NodalState nodal_state(const LayerData& d, const GridField& phi, Exec exec = Exec::parallel);

}  // namespace cdnozzle
