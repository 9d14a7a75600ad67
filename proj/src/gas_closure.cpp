#include "cdnozzle/gas_closure.hpp"

#include "cdnozzle/errors.hpp"
#include "cdnozzle/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cdnozzle {

void GasConstants::validate() const
{
    if (!(gamma > 1.0) || !std::isfinite(gamma)) {
        std::ostringstream os;
        os << "gas.gamma must be > 1 (got " << gamma << ")";
        throw ConfigError(os.str());
    }
    if (!(r_gas > 0.0) || !std::isfinite(r_gas)) {
        std::ostringstream os;
        os << "gas.r_gas must be > 0 (got " << r_gas << ")";
        throw ConfigError(os.str());
    }
}

ThermoState ThermoState::from_primitive(double rho, double u1, double u2, double pressure, double gamma)
{
    ThermoState s;
    s.rho = rho;
    s.u1 = u1;
    s.u2 = u2;
    s.pressure = pressure;
    s.entropy_a = pressure / std::pow(rho, gamma);
    s.bernoulli_b = 0.5 * (u1 * u1 + u2 * u2) + gamma * pressure / ((gamma - 1.0) * rho);
    s.mass_flux_j = rho * u1;
    return s;
}

double ThermoState::sound_speed_sq(double gamma) const
{
    return cdnozzle::sound_speed_sq(rho, entropy_a, gamma);
}

double ThermoState::mach(double gamma) const
{
    return std::sqrt((u1 * u1 + u2 * u2) / sound_speed_sq(gamma));
}

bool ThermoState::subsonic(double gamma) const
{
    return u1 * u1 + u2 * u2 < sound_speed_sq(gamma);
}

double ThermoState::entropy(const GasConstants& gas) const
{
    return std::log(entropy_a / gas.r_gas);
}

double sound_speed_sq(double rho, double a, double gamma)
{
    if (!(rho > 0.0) || !(a > 0.0))
        throw DomainError("sound_speed_sq: density and entropy must be positive");
    return a * gamma * std::pow(rho, gamma - 1.0);
}

double stagnation_density(double a, double b, double gamma)
{
    return std::pow((gamma - 1.0) * b / (a * gamma), 1.0 / (gamma - 1.0));
}

double sonic_density(StreamGradient g, double a, double gamma)
{
    const double k = (1.0 + g.d1 * g.d1) / (g.d2 * g.d2);
    return std::pow(k / (a * gamma), 1.0 / (gamma + 1.0));
}

double closure_function(double rho, StreamGradient g, double a, double b, double gamma)
{
    const double k = (1.0 + g.d1 * g.d1) / (g.d2 * g.d2);
    return 0.5 * k + a * gamma * std::pow(rho, gamma + 1.0) / (gamma - 1.0) - b * rho * rho;
}

namespace {

void check_inputs(StreamGradient g, double a, double b)
{
    if (!std::isfinite(g.d1) || !std::isfinite(g.d2) || !(g.d2 > 0.0)) {
        std::ostringstream os;
        os << "density closure: d/dy2 phi must be positive and finite (got " << g.d2 << ")";
        throw DomainError(os.str());
    }
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b))
        throw DomainError("density closure: A and B must be positive");
}

}  // namespace

double density_from_stream(StreamGradient g, double a, double b, double gamma,
                           const ClosureOptions& opt, double rho_guess)
{
    check_inputs(g, a, b);
    const double k = (1.0 + g.d1 * g.d1) / (g.d2 * g.d2);
    const double rho_max = stagnation_density(a, b, gamma);
    const double rho_s = sonic_density(g, a, gamma);
    const double m_sonic = closure_function(rho_s, g, a, b, gamma);
    if (!(rho_s < rho_max) || !(m_sonic < 0.0))
        throw ClosureError("density closure: no subsonic root (flow would be sonic or supersonic)",
                           m_sonic);

    auto m_of = [&](double r) { return 0.5 * k + a * gamma * std::pow(r, gamma + 1.0) / (gamma - 1.0) - b * r * r; };
    auto dm_of = [&](double r) { return a * gamma * (gamma + 1.0) * std::pow(r, gamma) / (gamma - 1.0) - 2.0 * b * r; };

    double lo = rho_s, hi = rho_max;
    double rho = (rho_guess > lo && rho_guess < hi) ? rho_guess : hi;
    double m = m_of(rho);
    for (int it = 0; it < opt.max_iters && m != 0.0; ++it) {
        const double dm = dm_of(rho);
        if (std::abs(m) <= opt.tol) {
            // converged; keep one Newton polish only if it does not make M worse
            const double next = rho - m / dm;
            if (dm > 0.0 && std::abs(m_of(next)) <= std::abs(m)) {
                rho = next;
                m = m_of(rho);
            }
            break;
        }
        if (m > 0.0)
            hi = rho;
        else
            lo = rho;
        double next = rho - m / dm;
        if (!(dm > 0.0) || !(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        if (next == rho)
            break;
        rho = next;
        m = m_of(rho);
    }
    if (!(std::abs(m) <= opt.tol))
        throw ClosureError("density closure: Newton/bisection did not converge", m);

    const double c2 = a * gamma * std::pow(rho, gamma - 1.0);
    const double margin = c2 - k / (rho * rho);
    if (margin < opt.sonic_guard * c2)
        throw ClosureError("density closure: state too close to sonic", margin / c2);
    return rho;
}

DensitySensitivities density_sensitivities_at(double rho, StreamGradient g, double a, double gamma)
{
    const double c2 = a * gamma * std::pow(rho, gamma - 1.0);
    const double q2 = (1.0 + g.d1 * g.d1) / (rho * g.d2 * rho * g.d2);
    const double d = c2 - q2;
    DensitySensitivities s;
    s.d_grad1 = -g.d1 / (rho * g.d2 * g.d2 * d);
    s.d_grad2 = (1.0 + g.d1 * g.d1) / (rho * g.d2 * g.d2 * g.d2 * d);
    s.d_a = -gamma * std::pow(rho, gamma) / ((gamma - 1.0) * d);
    s.d_b = rho / d;
    return s;
}

DensitySensitivities density_sensitivities(StreamGradient g, double a, double b, double gamma,
                                           const ClosureOptions& opt)
{
    const double rho = density_from_stream(g, a, b, gamma, opt);
    return density_sensitivities_at(rho, g, a, gamma);
}

FluxW flux_w_at(double rho, StreamGradient g, double a, double gamma)
{
    return {g.d1 / (rho * g.d2), a * std::pow(rho, gamma)};
}

FluxW flux_w(StreamGradient g, double a, double b, double gamma, const ClosureOptions& opt)
{
    const double rho = density_from_stream(g, a, b, gamma, opt);
    return flux_w_at(rho, g, a, gamma);
}

double FluxJacobian::min_eig_sym() const
{
    const double off = 0.5 * (a12 + a21);
    const double mean = 0.5 * (a11 + a22);
    const double half = 0.5 * (a11 - a22);
    return mean - std::sqrt(half * half + off * off);
}

FluxJacobian flux_jacobian_at(double rho, StreamGradient g, double a, double gamma)
{
    const DensitySensitivities s = density_sensitivities_at(rho, g, a, gamma);
    const double c2 = a * gamma * std::pow(rho, gamma - 1.0);
    FluxJacobian j;
    j.a11 = 1.0 / (rho * g.d2) - g.d1 * s.d_grad1 / (rho * rho * g.d2);
    j.a12 = -g.d1 / (rho * g.d2 * g.d2) - g.d1 * s.d_grad2 / (rho * rho * g.d2);
    j.a21 = c2 * s.d_grad1;
    j.a22 = c2 * s.d_grad2;
    return j;
}

FluxJacobian coeff_a(StreamGradient base, StreamGradient pert, double a, double b, double gamma,
                     const ClosureOptions& opt)
{
    const QuadratureRule& q = gauss_legendre_16();
    FluxJacobian acc;
    double rho = 0.0;
    for (size_t k = 0; k < q.nodes.size(); ++k) {
        const double s = q.nodes[k];
        const StreamGradient g{base.d1 + s * pert.d1, base.d2 + s * pert.d2};
        rho = density_from_stream(g, a, b, gamma, opt, rho);
        const FluxJacobian j = flux_jacobian_at(rho, g, a, gamma);
        const double w = q.weights[k];
        acc.a11 += w * j.a11;
        acc.a12 += w * j.a12;
        acc.a21 += w * j.a21;
        acc.a22 += w * j.a22;
    }
    return acc;
}

}  // namespace cdnozzle
