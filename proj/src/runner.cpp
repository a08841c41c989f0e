// runner.cpp - task pipeline, sweeps and the run manifest

#include "adlab/runner.hpp"

#include "adlab/diagnostics.hpp"
#include "adlab/errors.hpp"
#include "adlab/matrix_file.hpp"
#include "adlab/output.hpp"
#include "adlab/phases.hpp"
#include "adlab/propagation.hpp"
#include "adlab/spectral.hpp"

#include <atomic>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <optional>
#include <thread>

namespace adlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kEpsilonSplit = "U_mn = eps_hat * dU_mn for m != n, eps_hat = max_{t, m != n} |U_mn(t)|";

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string entry(const char* stem, Index r, Index c, const char* part) {
    return std::string(stem) + "_" + std::to_string(r) + std::to_string(c) + "_" + part;
}

json resolved(const ExperimentConfig& cfg) {
    json model{{"type", cfg.model.type}};
    if (cfg.model.type == "ms") model["params"] = {{"omega0", cfg.model.omega0}, {"Omega", cfg.model.Omega}};
    if (cfg.model.type == "schwinger")
        model["params"] = {{"b", cfg.model.b}, {"theta", cfg.model.theta}, {"omega", cfg.model.omega}};
    if (cfg.model.type == "matrix_file") model["path"] = cfg.model.path.filename().string();
    json tasks = json::array();
    for (Task t : cfg.tasks) tasks.push_back(to_string(t));
    return {{"model", model},
            {"grid", {{"t_start", cfg.grid.t_start}, {"t_end", cfg.grid.t_end}, {"steps", cfg.grid.steps}}},
            {"level", cfg.level},
            {"tasks", tasks},
            {"quadrature", to_string(cfg.quadrature)},
            {"integrator", to_string(cfg.integrator)},
            {"output", {{"format", cfg.output.format}, {"precision", cfg.output.precision}}}};
}

// One parameter point: lazily built intermediates shared by the tasks that need them.
class Pipeline {
public:
    Pipeline(const ExperimentConfig& cfg, fs::path dir)
        : cfg_(cfg),
          dir_(std::move(dir)),
          model_(build_model(cfg.model)),
          grid_(cfg.grid.t_start, cfg.grid.t_end, cfg.grid.steps) {
        if (cfg_.level >= model_.dimension()) {
            throw ConfigInvalid("level", "must be < " + std::to_string(model_.dimension()) + " for this model");
        }
        popts_.integrator = cfg_.integrator;
        phase_opts_.quadrature = cfg_.quadrature;
    }

    RunManifest execute() {
        fs::create_directories(dir_);
        RunManifest man;
        man.config = cfg_.source;
        man.grid_hash = grid_hash(cfg_.grid);
        man.epsilon_convention = kEpsilonSplit;
        man.directory = dir_;
        man.summary["resolved"] = resolved(cfg_);
        for (Task t : cfg_.tasks) {
            if (t == Task::Sweep) continue;
            try {
                run_task(t, man);
            } catch (const TaskFailed&) {
                throw;
            } catch (const std::exception& e) {
                throw TaskFailed(to_string(t), e.what());
            }
        }
        man.gauge_convention = series_ ? series_->gauge : std::string(kParallelTransportGauge);
        write_json(dir_ / "manifest.json", man.to_json());
        return man;
    }

private:
    const Trajectory<double>& traj() {
        if (!traj_) traj_ = propagate_exact(model_, grid_, popts_);
        return *traj_;
    }
    const FrameSeries<double>& series() {
        if (!series_) {
            std::optional<CMatrix<double>> ref;
            if (model_.has_exact_eigensystem()) ref = model_.exact_eigensystem(grid_[0]).states;
            series_ = decompose_tracked(model_, grid_, ref);
        }
        return *series_;
    }
    const std::vector<CouplingMatrix<double>>& coup() {
        if (!coup_) coup_ = couplings(series());
        return *coup_;
    }
    const PropagatorDecomposition<double>& dec() {
        if (!dec_) dec_ = decompose(traj(), series());
        return *dec_;
    }

    void emit(RunManifest& man, const std::string& task, const std::string& stem, const Table& table) {
        const std::string name = stem + "." + cfg_.output.format;
        if (cfg_.output.format == "json") write_json(dir_ / name, table_to_json(table, cfg_.output.precision));
        else write_csv(dir_ / name, table, cfg_.output.precision);
        man.files.push_back({task, name, table.columns});
    }

    void run_task(Task t, RunManifest& man) {
        const Index n = cfg_.level;
        const Index N = model_.dimension();
        const Index K = grid_.size();
        json& sum = man.summary[to_string(t)];
        switch (t) {
            case Task::Propagate: {
                Table tab{{"t"}, {}};
                for (Index r = 0; r < N; ++r)
                    for (Index c = 0; c < N; ++c) {
                        tab.columns.push_back(entry("U", r, c, "re"));
                        tab.columns.push_back(entry("U", r, c, "im"));
                    }
                double unit = 0;
                for (Index k = 0; k < K; ++k) {
                    const auto& U = traj()[k];
                    std::vector<double> row{grid_[k]};
                    for (Index r = 0; r < N; ++r)
                        for (Index c = 0; c < N; ++c) {
                            row.push_back(U(r, c).real());
                            row.push_back(U(r, c).imag());
                        }
                    unit = std::max(unit, unitarity_residual(U));
                    tab.add_row(std::move(row));
                }
                sum = {{"integrator", to_string(cfg_.integrator)}, {"max_unitarity_residual", unit}};
                emit(man, "propagate", "trajectory", tab);
                break;
            }
            case Task::Decompose: {
                const auto& d = dec();
                Table tab{{"t"}, {}};
                for (Index r = 0; r < N; ++r)
                    for (Index c = 0; c < N; ++c) {
                        tab.columns.push_back(entry("Unm", r, c, "re"));
                        tab.columns.push_back(entry("Unm", r, c, "im"));
                    }
                for (Index m = 0; m < N; ++m) tab.columns.push_back("phi_" + std::to_string(m));
                tab.columns.push_back("offdiag_norm");
                for (Index k = 0; k < K; ++k) {
                    std::vector<double> row{grid_[k]};
                    const auto& u = d.Unm[static_cast<std::size_t>(k)];
                    for (Index r = 0; r < N; ++r)
                        for (Index c = 0; c < N; ++c) {
                            row.push_back(u(r, c).real());
                            row.push_back(u(r, c).imag());
                        }
                    for (Index m = 0; m < N; ++m) row.push_back(d.phi(k, m));
                    row.push_back(d.offdiag_norm[k]);
                    tab.add_row(std::move(row));
                }
                const auto adi = adiabaticity_ratio(series(), coup());
                sum = {{"epsilon_hat", d.epsilon_hat},
                       {"epsilon_convention", d.epsilon_convention},
                       {"phi_valid", d.phi_valid},
                       {"max_ode_residual", verify_offdiag_ode_residual(d, series(), coup()).maxCoeff()},
                       {"max_adiabaticity_ratio", adi.max_ratio},
                       {"t_at_max_adiabaticity_ratio", adi.t_at_max}};
                emit(man, "decompose", "decomposition", tab);
                break;
            }
            case Task::Phases: {
                const auto states = traj().evolve(series().state(0, n));
                const auto rep = phase_report(series(), coup(), states, n, phase_opts_);
                Table tab{{"t", "delta_n", "gamma_n", "pancharatnam", "geom_noncyclic", "geom_openpath", "S_n_re",
                           "S_n_im", "Q_n_re", "Q_n_im", "phi_corrected"},
                          {}};
                for (Index k = 0; k < K; ++k) {
                    tab.add_row({grid_[k], rep.delta[k], rep.gamma[k], rep.pancharatnam[k], rep.geom_noncyclic[k],
                                 rep.geom_openpath[k], rep.source[k].real(), rep.source[k].imag(), rep.Q[k].real(),
                                 rep.Q[k].imag(), rep.phi_corrected[k]});
                }
                sum = {{"level", n},
                       {"gauge", rep.gauge},
                       {"final_gamma_n", rep.gamma[K - 1]},
                       {"final_geom_noncyclic", rep.geom_noncyclic[K - 1]},
                       {"final_geom_noncyclic_reference_section", rep.geom_noncyclic_reference[K - 1]},
                       {"final_geom_openpath", rep.geom_openpath[K - 1]},
                       {"final_phi_corrected", rep.phi_corrected[K - 1]}};
                emit(man, "phases", "phases", tab);
                break;
            }
            case Task::MSCheck: {
                const auto rep = marzlin_sanders_check(model_, traj(), series(), coup(), n, cfg_.quadrature);
                Table tab{{"t", "abs_norm_naive", "arg_norm_naive", "abs_norm_corrected", "abs_norm_true"}, {}};
                double dev = 0;
                for (Index k = 0; k < K; ++k) {
                    tab.add_row({grid_[k], std::abs(rep.norm_naive[k]), std::arg(rep.norm_naive[k]),
                                 std::abs(rep.norm_corrected[k]), rep.norm_true[k]});
                    dev = std::max(dev, std::abs(rep.norm_true[k] - 1));
                }
                sum = {{"level", n},
                       {"max_abs_norm_true_minus_1", dev},
                       {"max_hbar_residual", rep.hbar_residual.maxCoeff()}};
                emit(man, "ms_check", "ms_report", tab);
                break;
            }
            case Task::EpsilonBound: {
                const auto rep = epsilon_lower_bound(dec(), series(), traj(), n);
                Table tab{{"t", "D_eig", "D_state", "denom", "eps_lower", "eps_hat", "determinate"}, {}};
                long long indeterminate = 0;
                for (Index k = 0; k < K; ++k) {
                    const bool ok = rep.determinate[static_cast<std::size_t>(k)];
                    indeterminate += ok ? 0 : 1;
                    tab.add_row({grid_[k], rep.D_eig[k], rep.D_state[k], rep.denom[k], rep.eps_lower[k], rep.eps_hat,
                                 ok ? 1.0 : 0.0});
                }
                sum = {{"level", n},
                       {"eps_hat", rep.eps_hat},
                       {"max_eps_lower", rep.max_bound()},
                       {"indeterminate_points", indeterminate},
                       {"split_convention", rep.split_convention},
                       {"regime", rep.regime}};
                emit(man, "epsilon_bound", "epsilon", tab);
                break;
            }
            case Task::Fidelity: {
                const auto U_ad = propagate_adiabatic(series(), coup(), cfg_.quadrature);
                const RVector<double> F = fidelity_adiabatic_vs_exact(U_ad, traj(), series(), n);
                Table tab{{"t", "F"}, {}};
                for (Index k = 0; k < K; ++k) tab.add_row({grid_[k], F[k]});
                sum = {{"level", n}, {"min_F", F.minCoeff()}};
                emit(man, "fidelity", "fidelity", tab);
                break;
            }
            case Task::Sweep:
                break;
        }
    }

    const ExperimentConfig& cfg_;
    fs::path dir_;
    HamiltonianModel<double> model_;
    TimeGrid<double> grid_;
    PropagationOptions popts_;
    PhaseOptions phase_opts_;
    std::optional<Trajectory<double>> traj_;
    std::optional<FrameSeries<double>> series_;
    std::optional<std::vector<CouplingMatrix<double>>> coup_;
    std::optional<PropagatorDecomposition<double>> dec_;
};

std::string point_directory(std::size_t index, const std::string& param, double value) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%03zu", index);
    return std::string(buf) + "_" + param + "_" + format_number(value, 12);
}

}  // namespace

json RunManifest::to_json() const {
    json files_json = json::array();
    for (const auto& f : files)
        files_json.push_back({{"task", f.task}, {"file", f.file.generic_string()}, {"columns", f.columns}});
    json out{{"code_version", code_version},
             {"config", config},
             {"grid_hash", grid_hash},
             {"gauge_convention", gauge_convention},
             {"epsilon_convention", epsilon_convention},
             {"files", files_json},
             {"summary", summary}};
    if (!points.empty()) {
        json pts = json::array();
        for (const auto& p : points) {
            pts.push_back({{"directory", p.directory.filename().generic_string()},
                           {"manifest", (p.directory.filename() / "manifest.json").generic_string()},
                           {"grid_hash", p.grid_hash},
                           {"files", p.to_json()["files"]}});
        }
        out["points"] = std::move(pts);
    }
    return out;
}

HamiltonianModel<double> build_model(const ModelConfig& cfg) {
    if (cfg.type == "ms") return make_ms_model(MSParams<double>{cfg.omega0, cfg.Omega});
    if (cfg.type == "schwinger") return make_schwinger_model(SchwingerParams<double>{cfg.b, cfg.theta, cfg.omega});
    if (cfg.type == "matrix_file") {
        if (!fs::is_regular_file(cfg.path)) throw ConfigInvalid("model.path", "no such file: " + cfg.path.string());
        return load_matrix_model(cfg.path);
    }
    throw ConfigInvalid("model.type", "expected ms, schwinger or matrix_file");
}

std::string grid_hash(const GridConfig& grid) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.17g|%.17g|%lld", grid.t_start, grid.t_end, static_cast<long long>(grid.steps));
    std::uint64_t h = 1469598103934665603ULL;
    for (const char* p = buf; *p; ++p) {
        h ^= static_cast<unsigned char>(*p);
        h *= 1099511628211ULL;
    }
    return hex64(h);
}

RunManifest run(const ExperimentConfig& cfg) {
    const fs::path root = cfg.output.directory;
    if (!cfg.sweep) return Pipeline(cfg, root).execute();

    const auto& sweep = *cfg.sweep;
    const std::size_t P = sweep.values.size();
    std::vector<ExperimentConfig> point_cfgs;
    std::vector<fs::path> dirs;
    for (std::size_t i = 0; i < P; ++i) {
        point_cfgs.push_back(with_parameter(cfg, sweep.param, sweep.values[i]));
        dirs.push_back(root / point_directory(i, sweep.param, sweep.values[i]));
    }

    // Points are independent: each owns its config copy, model and output directory.
    std::vector<RunManifest> results(P);
    std::vector<std::exception_ptr> errors(P);
    std::atomic<std::size_t> next{0};
    const std::size_t workers =
        std::max<std::size_t>(1, std::min<std::size_t>(P, std::max(1u, std::thread::hardware_concurrency())));
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < P; i = next++) {
                try {
                    results[i] = Pipeline(point_cfgs[i], dirs[i]).execute();
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    RunManifest man;
    man.config = cfg.source;
    man.grid_hash = grid_hash(cfg.grid);
    man.gauge_convention = results.front().gauge_convention;
    man.epsilon_convention = kEpsilonSplit;
    man.directory = root;
    man.summary["resolved"] = resolved(cfg);
    man.summary["sweep"] = {{"param", sweep.param}, {"values", sweep.values}};
    man.points = std::move(results);
    fs::create_directories(root);
    write_json(root / "manifest.json", man.to_json());
    return man;
}

}  // namespace adlab
