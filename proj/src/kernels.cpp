#include "cdnozzle/kernels.hpp"

#include "cdnozzle/errors.hpp"

#include <cmath>
#include <exception>
#include <limits>

namespace cdnozzle {

namespace {

// runs body(k) for k in [0, n); an exception from the lowest k wins so that serial and
// parallel runs fail identically
template <class F>
void for_nodes(int n, Exec exec, F body)
{
    std::exception_ptr err;
    int err_at = std::numeric_limits<int>::max();
    if (exec == Exec::serial) {
        for (int k = 0; k < n; ++k) {
            try {
                body(k);
            } catch (...) {
                err = std::current_exception();
                break;
            }
        }
    } else {
#pragma omp parallel for schedule(static)
        for (int k = 0; k < n; ++k) {
            try {
                body(k);
            } catch (...) {
#pragma omp critical(cdnozzle_kernel_error)
                if (k < err_at) {
                    err_at = k;
                    err = std::current_exception();
                }
            }
        }
    }
    if (err)
        std::rethrow_exception(err);
}

}  // namespace

GradientField full_gradient(const LayerData& d, const GridField& phi)
{
    GradientField g{d_dy1(phi, d.grid), d_dy2(phi, d.grid)};
    const double base = d.base_gradient();
    for (double& v : g.d2.v)
        v += base;
    return g;
}

CoefficientField coefficient_field(const LayerData& d, const GridField& phi, Exec exec)
{
    const GradientField grad = full_gradient(d, phi);
    CoefficientField c(d.grid);
    const double base = d.base_gradient();
    const int n2 = d.n2();
    const StreamGradient gb{0.0, base};
    for_nodes(d.grid.size(), exec, [&](int k) {
        const int j = k % n2;
        const StreamGradient pert{grad.d1.v[k], grad.d2.v[k] - base};
        const FluxJacobian a = coeff_a(gb, pert, d.a_en[j], d.b_en[j], d.gamma, d.closure);
        c.a11[k] = a.a11;
        c.a12[k] = a.a12;
        c.a21[k] = a.a21;
        c.a22[k] = a.a22;
    });
    return c;
}

NodalState nodal_state(const LayerData& d, const GridField& phi, Exec exec)
{
    const GradientField grad = full_gradient(d, phi);
    NodalState s{GridField(d.grid), GridField(d.grid), GridField(d.grid), GridField(d.grid)};
    const int n2 = d.n2();
    const double rho_b = d.background.state.rho;
    for_nodes(d.grid.size(), exec, [&](int k) {
        const int j = k % n2;
        const StreamGradient g{grad.d1.v[k], grad.d2.v[k]};
        const double rho = density_from_stream(g, d.a_en[j], d.b_en[j], d.gamma, d.closure, rho_b);
        s.rho.v[k] = rho;
        s.u1.v[k] = 1.0 / (rho * g.d2);
        s.u2.v[k] = d.sign * g.d1 / (rho * g.d2);
        s.p.v[k] = d.a_en[j] * std::pow(rho, d.gamma);
    });
    return s;
}

}  // namespace cdnozzle
