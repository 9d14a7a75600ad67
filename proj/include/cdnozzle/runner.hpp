#pragma once

#include "cdnozzle/config.hpp"
#include "cdnozzle/errors.hpp"
#include "cdnozzle/interface_solver.hpp"
#include "cdnozzle/physical_reconstruction.hpp"

#include <string>
#include <vector>

namespace cdnozzle {

struct NormTable {
    double phi_upper = 0.0;  // ||phi+||^{(-1-alpha)}_{2,alpha}, discrete
    double phi_lower = 0.0;
    double g_weighted = 0.0;  // ||g_cd||^{(-1-alpha)}_{2,alpha} on (0, L)
    double g_sup = 0.0;
    double state_deviation = 0.0;  // ||U - U_b|| sup over both layers
};

struct RunResult {
    double sigma = 0.0;
    SigmaBreakdown sigma_terms;
    LagrangianDomain dom;
    FreeBoundarySolution sol;
    PhysicalField upper, lower;
    RhReport rh;
    ConservationReport conservation_upper, conservation_lower;
    TransportReport transport_upper, transport_lower;
    NormTable norms;
    double max_mach = 0.0;
    double background_max_mach = 0.0;
};

RunResult run_solve(const PhysicalProblem& p, const DomainSettings& ds, const FreeBoundarySettings& fs);

struct RefineRow {
    int n = 0;
    int outer_iterations = 0;
    double q_norm = 0.0;
    double pressure_jump = 0.0;
    double tangency = 0.0;  // max over both sides
    double mass_defect = 0.0;
    double slip = 0.0;
    double wall_defect = 0.0;
    double transport = 0.0;  // A and B along traced streamlines, both layers
};

RefineRow refine_row(const RunResult& r);
std::vector<RefineRow> run_refine(const ProblemConfig& c, const std::vector<int>& grids);

struct SweepRow {
    double amplitude = 0.0;  // requested sigma
    double sigma = 0.0;      // measured size of the rescaled data
    double state_deviation = 0.0;
    double g_sup = 0.0;
    double g_weighted = 0.0;
    int outer_iterations = 0;
};

struct SweepResult {
    std::vector<SweepRow> rows;  // completed rows, in amplitude order
    bool failed = false;
    ErrorKind error_kind = ErrorKind::config;
    double failed_amplitude = 0.0;
    std::string error;
};

// stops at the first failing row and keeps the rows computed so far
SweepResult run_sweep(const ProblemConfig& c, const std::vector<double>& amplitudes);

}  // namespace cdnozzle
