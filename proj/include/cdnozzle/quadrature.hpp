#pragma once

#include <vector>

namespace cdnozzle {

struct QuadratureRule {
    std::vector<double> nodes;    // on [0,1]
    std::vector<double> weights;  // sum to 1
};

// n-point Gauss-Legendre rule mapped to [0,1]
QuadratureRule gauss_legendre(int n);

// the 16-point rule used for the a_ij segment integrals
const QuadratureRule& gauss_legendre_16();

}  // namespace cdnozzle
