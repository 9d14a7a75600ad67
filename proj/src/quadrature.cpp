#include "cdnozzle/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cdnozzle {

QuadratureRule gauss_legendre(int n)
{
    if (n < 1)
        throw std::invalid_argument("gauss_legendre: n must be positive");
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int k = 0; k < (n + 1) / 2; ++k) {
        double x = std::cos(std::numbers::pi * (k + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int l = 2; l <= n; ++l) {
                double p2 = ((2 * l - 1) * x * p1 - (l - 1) * p0) / l;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // map [-1,1] -> [0,1]
        rule.nodes[k] = 0.5 * (1.0 - x);
        rule.nodes[n - 1 - k] = 0.5 * (1.0 + x);
        rule.weights[k] = 0.5 * w;
        rule.weights[n - 1 - k] = 0.5 * w;
    }
    return rule;
}

const QuadratureRule& gauss_legendre_16()
{
    static const QuadratureRule rule = gauss_legendre(16);
    return rule;
}

}  // namespace cdnozzle
