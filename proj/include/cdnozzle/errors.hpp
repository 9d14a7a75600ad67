#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cdnozzle {

enum class ErrorKind { config, closure, domain, range, assembly, numeric, convergence, consistency };

class SolverError : public std::runtime_error {
public:
    SolverError(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

class ConfigError : public SolverError {
public:
    explicit ConfigError(const std::string& what) : SolverError(ErrorKind::config, what) {}
};

// no subsonic density root, or a root too close to sonic
class ClosureError : public SolverError {
public:
    ClosureError(const std::string& what, double sonic_residual)
        : SolverError(ErrorKind::closure, what), sonic_residual_(sonic_residual) {}
    double sonic_residual() const { return sonic_residual_; }

private:
    double sonic_residual_;
};

class DomainError : public SolverError {
public:
    explicit DomainError(const std::string& what) : SolverError(ErrorKind::domain, what) {}
};

// exit-angle argument left [g-(L), g+(L)]
class RangeError : public SolverError {
public:
    explicit RangeError(const std::string& what) : SolverError(ErrorKind::range, what) {}
};

class AssemblyError : public SolverError {
public:
    AssemblyError(const std::string& what, int i, int j)
        : SolverError(ErrorKind::assembly, what), i_(i), j_(j) {}
    int i() const { return i_; }
    int j() const { return j_; }

private:
    int i_, j_;
};

class NumericError : public SolverError {
public:
    NumericError(const std::string& what, double residual)
        : SolverError(ErrorKind::numeric, what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

class ConvergenceError : public SolverError {
public:
    ConvergenceError(const std::string& what, std::vector<double> history)
        : SolverError(ErrorKind::convergence, what), history_(std::move(history)) {}
    const std::vector<double>& history() const { return history_; }

private:
    std::vector<double> history_;
};

class ConsistencyError : public SolverError {
public:
    ConsistencyError(const std::string& what, double defect = 0.0)
        : SolverError(ErrorKind::consistency, what), defect_(defect) {}
    double defect() const { return defect_; }

private:
    double defect_;
};

// 0 ok, 2 config, 3 closure (incl. leaving the subsonic/admissible regime),
// 4 non-convergence, 5 internal consistency
int exit_code(ErrorKind kind);
const char* kind_name(ErrorKind kind);

}  // namespace cdnozzle
