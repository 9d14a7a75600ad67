#pragma once

#include "cdnozzle/grid.hpp"
#include "cdnozzle/exec.hpp"
#include "cdnozzle/profile.hpp"

#include <vector>

namespace cdnozzle {

struct NormTerms {
    std::vector<double> derivative_terms;  // weighted sup of order-k derivatives, k = 0..m
    double holder = 0.0;                   // weighted Hoelder quotient of the order-m derivatives
    double total = 0.0;
};

// unweighted C^{m,alpha} norm on [lo, hi]: exact derivatives of the profile sampled at
// `samples` uniform points, Hoelder quotient over all pairs
NormTerms profile_holder_norm(const Profile& f, double lo, double hi, int order, double alpha,
                              int samples = 257);

// discrete ||f||^{(kappa)}_{m,alpha} on a layer rectangle; delta is the distance to the two
// y2 edges; derivatives by nodal three-point differences; Hoelder pairs within `window`
// (default L/4)
NormTerms discrete_weighted_norm_terms(const GridField& f, const LayerGrid& g, int order, double alpha,
                                       double kappa, Exec exec = Exec::parallel, double window = -1.0);
double discrete_weighted_norm(const GridField& f, const LayerGrid& g, int order, double alpha,
                              double kappa, Exec exec = Exec::parallel, double window = -1.0);

// same on an interval (0, L); delta is the distance to the two end points; all pairs
NormTerms weighted_norm_1d(const std::vector<double>& x, const std::vector<double>& f, int order,
                           double alpha, double kappa);

}  // namespace cdnozzle
