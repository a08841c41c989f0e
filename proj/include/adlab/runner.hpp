// runner.hpp - executes an experiment configuration and writes its outputs

#pragma once

#include "adlab/config.hpp"
#include "adlab/models.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace adlab {

inline constexpr const char* kCodeVersion = "0.1.0";

struct OutputFile {
    std::string task;
    std::filesystem::path file;
    std::vector<std::string> columns;
};

struct RunManifest {
    nlohmann::json config;
    std::string code_version = kCodeVersion;
    std::string grid_hash;
    std::string gauge_convention;
    std::string epsilon_convention;
    std::vector<OutputFile> files;
    nlohmann::json summary = nlohmann::json::object();
    std::vector<RunManifest> points;  // sweep points, in configuration order
    std::filesystem::path directory;

    nlohmann::json to_json() const;
};

HamiltonianModel<double> build_model(const ModelConfig& cfg);

// FNV-1a over the grid definition; stable across runs and platforms.
std::string grid_hash(const GridConfig& grid);

// Runs every requested task; writes one directory per sweep point when a sweep is configured.
// Module errors are rethrown as TaskFailed naming the task.
RunManifest run(const ExperimentConfig& cfg);

}  // namespace adlab
