// config.hpp - experiment configuration (JSON) for the adlab runner

#pragma once

#include "adlab/propagation.hpp"
#include "adlab/quadrature.hpp"
#include "adlab/types.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace adlab {

enum class Task { Propagate, Decompose, Phases, MSCheck, EpsilonBound, Fidelity, Sweep };

const char* to_string(Task t);

struct ModelConfig {
    std::string type;  // "ms" | "schwinger" | "matrix_file"
    double omega0 = 1.0;
    double Omega = 0.0;
    double b = 1.0;
    double theta = 1.5707963267948966;
    double omega = 0.0;
    std::filesystem::path path;  // matrix_file only, resolved against the config location
};

struct GridConfig {
    double t_start = 0.0;
    double t_end = 0.0;
    Index steps = 0;
};

struct SweepConfig {
    std::string param;
    std::vector<double> values;
};

struct OutputConfig {
    std::filesystem::path directory = "adlab_out";
    std::string format = "csv";  // "csv" | "json"
    int precision = 12;          // significant digits
};

struct ExperimentConfig {
    ModelConfig model;
    GridConfig grid;
    Index level = 0;
    std::vector<Task> tasks;  // dependency order, no duplicates
    std::optional<SweepConfig> sweep;
    OutputConfig output;
    Quadrature quadrature = Quadrature::Trapezoid;
    Integrator integrator = Integrator::Magnus4;
    nlohmann::json source;  // the document as read

    bool wants(Task t) const;
};

// Throws ConfigInvalid naming the offending field path (e.g. "grid.steps").
ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

// The same configuration with one model parameter replaced (used by sweeps).
ExperimentConfig with_parameter(const ExperimentConfig& cfg, const std::string& param, double value);

}  // namespace adlab
