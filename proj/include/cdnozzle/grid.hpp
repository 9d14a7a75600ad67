#pragma once

#include <vector>

namespace cdnozzle {

// tanh-stretched nodes on [lo, hi] clustering at both ends; beta = 0 gives uniform spacing
std::vector<double> graded_nodes(double lo, double hi, int n, double beta);

// default stretching tied to the corner Hoelder exponent
inline double default_grading(double alpha) { return 2.0 * (1.0 - alpha); }

struct LayerGrid {
    std::vector<double> y1;  // [0, L]
    std::vector<double> y2;  // [0, m]; the interface is y2 = 0
    double beta = 0.0;

    int n1() const { return static_cast<int>(y1.size()); }
    int n2() const { return static_cast<int>(y2.size()); }
    int size() const { return n1() * n2(); }
    int index(int i, int j) const { return i * n2() + j; }
    double length() const { return y1.back(); }
    double height() const { return y2.back(); }
    double min_spacing() const;
    double max_spacing() const;
};

LayerGrid make_layer_grid(double length, double height, int n1, int n2, double beta);

// node values, j (the y2 index) fastest
struct GridField {
    int n1 = 0;
    int n2 = 0;
    std::vector<double> v;

    GridField() = default;
    GridField(int n1_, int n2_, double value = 0.0) : n1(n1_), n2(n2_), v(size_t(n1_) * n2_, value) {}
    explicit GridField(const LayerGrid& g, double value = 0.0) : GridField(g.n1(), g.n2(), value) {}

    double& operator()(int i, int j) { return v[size_t(i) * n2 + j]; }
    double operator()(int i, int j) const { return v[size_t(i) * n2 + j]; }
    double max_abs() const;
};

double max_abs_diff(const GridField& a, const GridField& b);

// three-point derivative weights at node k of a nonuniform 1-D grid:
// f'(x_k) ~ sum_l w[l] f(x_{first + l})
struct Stencil3 {
    int first = 0;
    double w[3] = {0.0, 0.0, 0.0};
};

Stencil3 centered_stencil(const std::vector<double>& x, int k);
// one-sided from the left end (k, k+1, k+2) or the right end (k-2, k-1, k)
Stencil3 one_sided_stencil(const std::vector<double>& x, int k, bool forward);
// centered in the interior, one-sided at the two ends
Stencil3 derivative_stencil(const std::vector<double>& x, int k);

std::vector<double> derivative(const std::vector<double>& x, const std::vector<double>& f);

// cumulative trapezoid, starting from start_value at x[0]
std::vector<double> cumulative_trapezoid(const std::vector<double>& x, const std::vector<double>& f,
                                         double start_value = 0.0);

// nodal gradients with derivative_stencil in each direction
GridField d_dy1(const GridField& f, const LayerGrid& g);
GridField d_dy2(const GridField& f, const LayerGrid& g);

}  // namespace cdnozzle
