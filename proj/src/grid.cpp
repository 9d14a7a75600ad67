#include "cdnozzle/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cdnozzle {

std::vector<double> graded_nodes(double lo, double hi, int n, double beta)
{
    if (n < 3)
        throw std::invalid_argument("graded_nodes: need at least 3 nodes");
    if (!(hi > lo))
        throw std::invalid_argument("graded_nodes: empty interval");
    std::vector<double> x(n);
    const double tb = std::tanh(beta);
    for (int k = 0; k < n; ++k) {
        const double xi = double(k) / (n - 1);
        double s = xi;
        if (beta > 0.0)
            s = 0.5 * (1.0 + std::tanh(beta * (2.0 * xi - 1.0)) / tb);
        x[k] = lo + (hi - lo) * s;
    }
    x.front() = lo;
    x.back() = hi;
    return x;
}

double LayerGrid::min_spacing() const
{
    double h = y1[1] - y1[0];
    for (int i = 1; i < n1(); ++i)
        h = std::min(h, y1[i] - y1[i - 1]);
    for (int j = 1; j < n2(); ++j)
        h = std::min(h, y2[j] - y2[j - 1]);
    return h;
}

double LayerGrid::max_spacing() const
{
    double h = 0.0;
    for (int i = 1; i < n1(); ++i)
        h = std::max(h, y1[i] - y1[i - 1]);
    for (int j = 1; j < n2(); ++j)
        h = std::max(h, y2[j] - y2[j - 1]);
    return h;
}

LayerGrid make_layer_grid(double length, double height, int n1, int n2, double beta)
{
    LayerGrid g;
    g.y1 = graded_nodes(0.0, length, n1, beta);
    g.y2 = graded_nodes(0.0, height, n2, beta);
    g.beta = beta;
    return g;
}

double GridField::max_abs() const
{
    double m = 0.0;
    for (double x : v)
        m = std::max(m, std::abs(x));
    return m;
}

double max_abs_diff(const GridField& a, const GridField& b)
{
    if (a.v.size() != b.v.size())
        throw std::invalid_argument("max_abs_diff: size mismatch");
    double m = 0.0;
    for (size_t k = 0; k < a.v.size(); ++k)
        m = std::max(m, std::abs(a.v[k] - b.v[k]));
    return m;
}

Stencil3 centered_stencil(const std::vector<double>& x, int k)
{
    const double h1 = x[k] - x[k - 1], h2 = x[k + 1] - x[k];
    Stencil3 s;
    s.first = k - 1;
    s.w[0] = -h2 / (h1 * (h1 + h2));
    s.w[1] = (h2 - h1) / (h1 * h2);
    s.w[2] = h1 / (h2 * (h1 + h2));
    return s;
}

Stencil3 one_sided_stencil(const std::vector<double>& x, int k, bool forward)
{
    Stencil3 s;
    if (forward) {
        const double h1 = x[k + 1] - x[k], h2 = x[k + 2] - x[k + 1];
        s.first = k;
        s.w[0] = -(2.0 * h1 + h2) / (h1 * (h1 + h2));
        s.w[1] = (h1 + h2) / (h1 * h2);
        s.w[2] = -h1 / (h2 * (h1 + h2));
    } else {
        const double h1 = x[k] - x[k - 1], h2 = x[k - 1] - x[k - 2];
        s.first = k - 2;
        s.w[2] = (2.0 * h1 + h2) / (h1 * (h1 + h2));
        s.w[1] = -(h1 + h2) / (h1 * h2);
        s.w[0] = h1 / (h2 * (h1 + h2));
    }
    return s;
}

Stencil3 derivative_stencil(const std::vector<double>& x, int k)
{
    const int n = static_cast<int>(x.size());
    if (k == 0)
        return one_sided_stencil(x, 0, true);
    if (k == n - 1)
        return one_sided_stencil(x, n - 1, false);
    return centered_stencil(x, k);
}

std::vector<double> derivative(const std::vector<double>& x, const std::vector<double>& f)
{
    std::vector<double> d(x.size());
    for (int k = 0; k < static_cast<int>(x.size()); ++k) {
        const Stencil3 s = derivative_stencil(x, k);
        d[k] = s.w[0] * f[s.first] + s.w[1] * f[s.first + 1] + s.w[2] * f[s.first + 2];
    }
    return d;
}

std::vector<double> cumulative_trapezoid(const std::vector<double>& x, const std::vector<double>& f,
                                         double start_value)
{
    std::vector<double> c(x.size());
    c[0] = start_value;
    for (size_t k = 1; k < x.size(); ++k)
        c[k] = c[k - 1] + 0.5 * (x[k] - x[k - 1]) * (f[k] + f[k - 1]);
    return c;
}

GridField d_dy1(const GridField& f, const LayerGrid& g)
{
    GridField d(g);
    for (int i = 0; i < g.n1(); ++i) {
        const Stencil3 s = derivative_stencil(g.y1, i);
        for (int j = 0; j < g.n2(); ++j)
            d(i, j) = s.w[0] * f(s.first, j) + s.w[1] * f(s.first + 1, j) + s.w[2] * f(s.first + 2, j);
    }
    return d;
}

GridField d_dy2(const GridField& f, const LayerGrid& g)
{
    GridField d(g);
    for (int j = 0; j < g.n2(); ++j) {
        const Stencil3 s = derivative_stencil(g.y2, j);
        for (int i = 0; i < g.n1(); ++i)
            d(i, j) = s.w[0] * f(i, s.first) + s.w[1] * f(i, s.first + 1) + s.w[2] * f(i, s.first + 2);
    }
    return d;
}

}  // namespace cdnozzle
