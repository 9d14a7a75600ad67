#pragma once

#include "cdnozzle/interface_solver.hpp"
#include "cdnozzle/problem_setup.hpp"

#include <string>
#include <vector>

namespace cdnozzle {

enum class Mode { solve, refine, sweep };

const char* mode_name(Mode m);

// Parsed run configuration. `shape` is the problem exactly as written (deviation profiles added
// to the background); `problem` is the same after the optional scale_to_sigma rescaling.
struct ProblemConfig {
    PhysicalProblem shape;
    PhysicalProblem problem;
    double scale_to_sigma = -1.0;  // < 0: not requested
    DomainSettings domain;
    FreeBoundarySettings solver;
    Mode mode = Mode::solve;
    std::vector<double> amplitudes;  // sweep: target sigma values, strictly descending
    std::vector<int> grids;          // refine: n1 = n2 per run, strictly ascending
};

// strict: unknown keys and wrong types raise ConfigError naming the offending field
ProblemConfig parse_config(const std::string& text);
ProblemConfig load_config(const std::string& path);

void validate_amplitudes(const std::vector<double>& amps);
void validate_grids(const std::vector<int>& grids);

// the config's perturbation rescaled so that its size equals sigma (0 gives the background data)
PhysicalProblem problem_at_sigma(const ProblemConfig& c, double sigma);

}  // namespace cdnozzle
