#pragma once

#include "cdnozzle/runner.hpp"

#include <string>
#include <vector>

namespace cdnozzle {

// CSV headers, fixed
inline const char* kFieldsHeader = "x1,x2,rho,u1,u2,P,Mach";
inline const char* kInterfaceHeader = "x1,g_cd,eta,Q,pressure_jump,tangency_upper,tangency_lower";
inline const char* kSweepHeader = "amplitude,sigma,state_deviation,g_sup,g_weighted,outer_iterations,"
                                  "state_ratio,g_ratio";
inline const char* kRefineHeader = "n,outer_iterations,q_norm,pressure_jump,tangency,mass_defect,slip,"
                                   "wall_defect,transport";

std::string fields_csv(const PhysicalField& f);
std::string interface_csv(const RunResult& r);
// everything but timing, so equal configs give byte-equal files
std::string report_json(const RunResult& r);
std::string sweep_csv(const SweepResult& s);
std::string sweep_json(const SweepResult& s);
std::string refine_csv(const std::vector<RefineRow>& rows);
std::string refine_json(const std::vector<RefineRow>& rows);

struct Series {
    std::string label;
    std::vector<double> x, y;
};

std::string svg_line_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                          const std::vector<Series>& series);

void write_file(const std::string& path, const std::string& text);

// fields_{upper,lower}.csv, interface.csv, report.json, interface.svg, pressure_jump.svg
void write_solve_outputs(const std::string& dir, const RunResult& r);
void write_sweep_outputs(const std::string& dir, const SweepResult& s);
void write_refine_outputs(const std::string& dir, const std::vector<RefineRow>& rows);

}  // namespace cdnozzle
