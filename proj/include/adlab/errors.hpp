// errors.hpp - exception types raised by the numerical modules and the runner

#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace adlab {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// models
class DegenerateFrequency : public Error {
public:
    using Error::Error;
};

// spectral
class DegeneracyDetected : public Error {
public:
    DegeneracyDetected(double t, double gap)
        : Error("degenerate spectrum at t=" + std::to_string(t) + " (gap " + std::to_string(gap) + ")"),
          t(t), gap(gap) {}
    double t;
    double gap;
};

class NonHermitianInput : public Error {
public:
    NonHermitianInput(double t, double residual)
        : Error("Hamiltonian not Hermitian at t=" + std::to_string(t) + " (residual " +
                std::to_string(residual) + ")"),
          t(t), residual(residual) {}
    double t;
    double residual;
};

class GridTooCoarse : public Error {
public:
    using Error::Error;
};

// propagation
class StepTooLarge : public Error {
public:
    using Error::Error;
};

class PhaseUnwrapAmbiguous : public Error {
public:
    using Error::Error;
};

// phases
class NonRealAccumulator : public Error {
public:
    using Error::Error;
};

class OrthogonalStates : public Error {
public:
    OrthogonalStates(double t, double overlap)
        : Error("overlap with initial state vanishes at t=" + std::to_string(t) + " (|overlap| " +
                std::to_string(overlap) + ")"),
          t(t), overlap(overlap) {}
    double t;
    double overlap;
};

class BranchSingularity : public Error {
public:
    using Error::Error;
};

// diagnostics
class NotNormalized : public Error {
public:
    using Error::Error;
};

// runner
class ConfigInvalid : public Error {
public:
    ConfigInvalid(std::string field, const std::string& what)
        : Error(field + ": " + what), field(std::move(field)) {}
    std::string field;
};

class TaskFailed : public Error {
public:
    TaskFailed(std::string task, const std::string& what)
        : Error("task '" + task + "' failed: " + what), task(std::move(task)) {}
    std::string task;
};

class ParseError : public Error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& what)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
          line(line), column(column) {}
    std::size_t line;
    std::size_t column;
};

class NotHermitian : public Error {
public:
    NotHermitian(double t, double residual)
        : Error("sample at t=" + std::to_string(t) + " is not Hermitian (residual " +
                std::to_string(residual) + ")"),
          t(t), residual(residual) {}
    double t;
    double residual;
};

}  // namespace adlab
