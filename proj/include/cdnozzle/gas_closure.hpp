#pragma once

namespace cdnozzle {

struct GasConstants {
    double gamma = 1.4;
    double r_gas = 1.0;

    void validate() const;  // throws ConfigError
};

struct ThermoState {
    double rho = 0.0;
    double u1 = 0.0;
    double u2 = 0.0;
    double pressure = 0.0;
    double entropy_a = 0.0;    // A = P / rho^gamma
    double bernoulli_b = 0.0;  // |u|^2/2 + gamma P / ((gamma-1) rho)
    double mass_flux_j = 0.0;  // rho u1

    static ThermoState from_primitive(double rho, double u1, double u2, double pressure, double gamma);

    double sound_speed_sq(double gamma) const;
    double mach(double gamma) const;
    bool subsonic(double gamma) const;
    // S with A = R e^S
    double entropy(const GasConstants& gas) const;
};

// Lagrangian stream-function gradient (d/dy1 phi, d/dy2 phi)
struct StreamGradient {
    double d1 = 0.0;
    double d2 = 0.0;
};

struct ClosureOptions {
    double tol = 1e-13;         // on |M(rho)|
    int max_iters = 50;
    double sonic_guard = 1e-6;  // reject c^2 - |u|^2 < sonic_guard c^2
};

double sound_speed_sq(double rho, double a, double gamma);

// stagnation density (velocity -> 0) and the density where |u| = c for the given gradient
double stagnation_density(double a, double b, double gamma);
double sonic_density(StreamGradient g, double a, double gamma);

// Bernoulli relation multiplied through by rho^2:
// M(rho) = (1+d1^2)/(2 d2^2) + A gamma rho^(gamma+1)/(gamma-1) - B rho^2
double closure_function(double rho, StreamGradient g, double a, double b, double gamma);

// subsonic root; rho_guess > 0 is an optional starting point
double density_from_stream(StreamGradient g, double a, double b, double gamma,
                           const ClosureOptions& opt = {}, double rho_guess = 0.0);

struct DensitySensitivities {
    double d_grad1 = 0.0;
    double d_grad2 = 0.0;
    double d_a = 0.0;
    double d_b = 0.0;
};

DensitySensitivities density_sensitivities(StreamGradient g, double a, double b, double gamma,
                                           const ClosureOptions& opt = {});
// same, at a density already known to be the root
DensitySensitivities density_sensitivities_at(double rho, StreamGradient g, double a, double gamma);

struct FluxW {
    double w1 = 0.0;  // u2 = d1 / (rho d2)
    double w2 = 0.0;  // P = A rho^gamma
};

FluxW flux_w(StreamGradient g, double a, double b, double gamma, const ClosureOptions& opt = {});
FluxW flux_w_at(double rho, StreamGradient g, double a, double gamma);

// dW_i / d(d_j phi)
struct FluxJacobian {
    double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

    double min_eig_sym() const;
};

FluxJacobian flux_jacobian_at(double rho, StreamGradient g, double a, double gamma);

// a_ij = int_0^1 dW_i/d(d_j phi)(base + s pert, A, B) ds, 16-point Gauss-Legendre
FluxJacobian coeff_a(StreamGradient base, StreamGradient pert, double a, double b, double gamma,
                     const ClosureOptions& opt = {});

}  // namespace cdnozzle
