// config.cpp - JSON experiment configuration parsing and validation

#include "adlab/config.hpp"

#include "adlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace adlab {

using nlohmann::json;

const char* to_string(Task t) {
    switch (t) {
        case Task::Propagate: return "propagate";
        case Task::Decompose: return "decompose";
        case Task::Phases: return "phases";
        case Task::MSCheck: return "ms_check";
        case Task::EpsilonBound: return "epsilon_bound";
        case Task::Fidelity: return "fidelity";
        case Task::Sweep: return "sweep";
    }
    return "?";
}

bool ExperimentConfig::wants(Task t) const { return std::find(tasks.begin(), tasks.end(), t) != tasks.end(); }

namespace {

constexpr Task kOrder[] = {Task::Propagate, Task::Decompose,    Task::Phases, Task::MSCheck,
                           Task::EpsilonBound, Task::Fidelity, Task::Sweep};

Task parse_task(const std::string& name, const std::string& field) {
    for (Task t : kOrder)
        if (name == to_string(t)) return t;
    throw ConfigInvalid(field, "unknown task '" + name + "'");
}

const json& require(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) throw ConfigInvalid(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ConfigInvalid(path.empty() ? key : path + "." + key, "missing");
    return *it;
}

double number(const json& v, const std::string& field) {
    if (!v.is_number()) throw ConfigInvalid(field, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigInvalid(field, "must be finite");
    return x;
}

double optional_number(const json& obj, const char* key, const std::string& path, double fallback) {
    auto it = obj.find(key);
    return it == obj.end() ? fallback : number(*it, path + "." + key);
}

long long integer(const json& v, const std::string& field) {
    if (!v.is_number_integer()) throw ConfigInvalid(field, "expected an integer");
    return v.get<long long>();
}

std::string text(const json& v, const std::string& field) {
    if (!v.is_string()) throw ConfigInvalid(field, "expected a string");
    return v.get<std::string>();
}

void check_model(const ModelConfig& m, Index level) {
    if (m.type == "ms") {
        if (!(m.omega0 > 0)) throw ConfigInvalid("model.params.omega0", "must be > 0");
    } else if (m.type == "schwinger") {
        if (!(m.b > 0)) throw ConfigInvalid("model.params.b", "must be > 0");
        if (!(m.theta > 0 && m.theta < std::numbers::pi)) throw ConfigInvalid("model.params.theta", "must lie in (0, pi)");
    }
    if (m.type != "matrix_file" && level >= 2) throw ConfigInvalid("level", "must be < 2 for a spin-1/2 model");
}

}  // namespace

ExperimentConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
    if (!doc.is_object()) throw ConfigInvalid("(root)", "expected a JSON object");
    ExperimentConfig cfg;
    cfg.source = doc;

    const json& model = require(doc, "model", "");
    cfg.model.type = text(require(model, "type", "model"), "model.type");
    const json params = model.contains("params") ? model["params"] : json::object();
    if (!params.is_object()) throw ConfigInvalid("model.params", "expected an object");
    if (cfg.model.type == "ms") {
        cfg.model.omega0 = optional_number(params, "omega0", "model.params", cfg.model.omega0);
        cfg.model.Omega = optional_number(params, "Omega", "model.params", cfg.model.Omega);
    } else if (cfg.model.type == "schwinger") {
        cfg.model.b = optional_number(params, "b", "model.params", cfg.model.b);
        cfg.model.theta = optional_number(params, "theta", "model.params", cfg.model.theta);
        cfg.model.omega = optional_number(params, "omega", "model.params", cfg.model.omega);
    } else if (cfg.model.type == "matrix_file") {
        std::filesystem::path p = text(require(model, "path", "model"), "model.path");
        cfg.model.path = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    } else {
        throw ConfigInvalid("model.type", "expected ms, schwinger or matrix_file");
    }

    const json& grid = require(doc, "grid", "");
    cfg.grid.t_start = optional_number(grid, "t_start", "grid", 0.0);
    cfg.grid.t_end = number(require(grid, "t_end", "grid"), "grid.t_end");
    const long long steps = integer(require(grid, "steps", "grid"), "grid.steps");
    if (!(cfg.grid.t_end > 0)) throw ConfigInvalid("grid.t_end", "must be > 0");
    if (!(cfg.grid.t_end > cfg.grid.t_start)) throw ConfigInvalid("grid.t_end", "must exceed grid.t_start");
    if (steps < 3) throw ConfigInvalid("grid.steps", "must be >= 3");
    cfg.grid.steps = static_cast<Index>(steps);

    const long long level = doc.contains("level") ? integer(doc["level"], "level") : 0;
    if (level < 0) throw ConfigInvalid("level", "must be >= 0");
    cfg.level = static_cast<Index>(level);
    check_model(cfg.model, cfg.level);

    std::set<Task> wanted;
    const json tasks = doc.contains("tasks") ? doc["tasks"] : json("all");
    if (tasks.is_string()) {
        if (tasks.get<std::string>() != "all") throw ConfigInvalid("tasks", "expected \"all\" or a list of task names");
        for (Task t : kOrder)
            if (t != Task::Sweep) wanted.insert(t);
        if (doc.contains("sweep")) wanted.insert(Task::Sweep);
    } else if (tasks.is_array()) {
        if (tasks.empty()) throw ConfigInvalid("tasks", "must not be empty");
        for (std::size_t i = 0; i < tasks.size(); ++i) {
            const std::string field = "tasks[" + std::to_string(i) + "]";
            wanted.insert(parse_task(text(tasks[i], field), field));
        }
    } else {
        throw ConfigInvalid("tasks", "expected \"all\" or a list of task names");
    }
    for (Task t : kOrder)
        if (wanted.count(t)) cfg.tasks.push_back(t);

    if (doc.contains("sweep")) {
        const json& sw = doc["sweep"];
        SweepConfig s;
        s.param = text(require(sw, "param", "sweep"), "sweep.param");
        const json& values = require(sw, "values", "sweep");
        if (!values.is_array() || values.empty()) throw ConfigInvalid("sweep.values", "expected a non-empty list");
        for (std::size_t i = 0; i < values.size(); ++i)
            s.values.push_back(number(values[i], "sweep.values[" + std::to_string(i) + "]"));
        for (double v : s.values) check_model(with_parameter(cfg, s.param, v).model, cfg.level);
        cfg.sweep = s;
    } else if (cfg.wants(Task::Sweep)) {
        throw ConfigInvalid("sweep", "task 'sweep' requires a sweep block");
    }
    if (cfg.sweep && !cfg.wants(Task::Sweep)) cfg.tasks.push_back(Task::Sweep);

    if (doc.contains("output")) {
        const json& out = doc["output"];
        if (!out.is_object()) throw ConfigInvalid("output", "expected an object");
        if (out.contains("directory")) cfg.output.directory = text(out["directory"], "output.directory");
        if (out.contains("format")) cfg.output.format = text(out["format"], "output.format");
        if (out.contains("precision")) {
            const long long p = integer(out["precision"], "output.precision");
            if (p < 1 || p > 17) throw ConfigInvalid("output.precision", "must lie in [1, 17]");
            cfg.output.precision = static_cast<int>(p);
        }
    }
    if (cfg.output.format != "csv" && cfg.output.format != "json") {
        throw ConfigInvalid("output.format", "expected csv or json");
    }
    if (cfg.output.directory.is_relative() && !base_dir.empty() && doc.contains("output") &&
        doc["output"].contains("directory")) {
        cfg.output.directory = base_dir / cfg.output.directory;
    }

    if (doc.contains("quadrature")) {
        const std::string q = text(doc["quadrature"], "quadrature");
        try {
            cfg.quadrature = parse_quadrature(q);
        } catch (const std::exception&) {
            throw ConfigInvalid("quadrature", "expected trapezoid or richardson");
        }
    }
    if (doc.contains("integrator")) {
        const std::string name = text(doc["integrator"], "integrator");
        try {
            cfg.integrator = parse_integrator(name);
        } catch (const std::exception&) {
            throw ConfigInvalid("integrator", "expected magnus4 or midpoint");
        }
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigInvalid("(file)", "cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigInvalid("(file)", std::string("malformed JSON: ") + e.what());
    }
    return parse_config(doc, path.parent_path());
}

ExperimentConfig with_parameter(const ExperimentConfig& cfg, const std::string& param, double value) {
    ExperimentConfig out = cfg;
    ModelConfig& m = out.model;
    if (m.type == "ms" && param == "omega0") m.omega0 = value;
    else if (m.type == "ms" && param == "Omega") m.Omega = value;
    else if (m.type == "schwinger" && param == "b") m.b = value;
    else if (m.type == "schwinger" && param == "theta") m.theta = value;
    else if (m.type == "schwinger" && param == "omega") m.omega = value;
    else if (param == "t_end") {
        if (!(value > out.grid.t_start)) throw ConfigInvalid("sweep.values", "t_end must exceed grid.t_start");
        out.grid.t_end = value;
    } else {
        throw ConfigInvalid("sweep.param", "'" + param + "' is not a parameter of model '" + m.type + "'");
    }
    return out;
}

}  // namespace adlab
