#pragma once

#include "cdnozzle/elliptic_core.hpp"
#include "cdnozzle/exec.hpp"
#include "cdnozzle/kernels.hpp"
#include "cdnozzle/problem_setup.hpp"

#include <vector>

namespace cdnozzle {

struct FixedPointSettings {
    double tol_update = 1e-10;  // max-norm of phi^{k+1} - phi^k
    int max_iters = 60;
    double damping = 1.0;       // phi^{k+1} = (1 - theta) phi^k + theta T(phi^k)
    double blowup_factor = 10.0;  // abort once |phi^k| exceeds this multiple of the first iterate
    SolveOptions solver;
    Exec exec = Exec::parallel;

    void validate() const;  // throws ConfigError
};

// f1, f2 at the nodes; both depend on t only and f1 vanishes identically
struct LayerSources {
    GridField f1, f2;
};

LayerSources sources_f(const LayerData& d);

// omega-hat(t/m + phi(L, t)) at the right-edge nodes; RangeError outside the exit span
std::vector<double> exit_condition(const GridField& phi_bar, const LayerData& d);

// One frozen-coefficient solve. g_cd is the physical interface curve at the y1 nodes (the
// lower layer imposes -g_cd on its canonical perturbation).
GridField picard_step(const GridField& phi_bar, const LayerData& d, const std::vector<double>& g_cd,
                      const SolveOptions& opt = {}, Exec exec = Exec::parallel);

// Canonical perturbation phi (stream function minus t/m) with derived physical node fields.
// u2 already has the physical sign; for the lower layer the node (i, j) sits at y2 = -t_j.
struct StreamField {
    Layer layer = Layer::upper;
    GridField phi;
    GridField rho, u1, u2, p, a, b;
    int iterations = 0;
    double final_update = 0.0;
    double contraction = 0.0;  // largest ratio of successive update norms
    std::vector<double> history;  // update norms
};

StreamField solve_layer(const LayerData& d, const std::vector<double>& g_cd, const FixedPointSettings& s,
                        const GridField* initial = nullptr);

// derived node fields for an already converged phi
void fill_state(StreamField& f, const LayerData& d, Exec exec = Exec::parallel);

}  // namespace cdnozzle
