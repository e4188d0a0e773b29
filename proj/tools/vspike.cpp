#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "vspike/io.hpp"
#include "vspike/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vspike;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNumerical = 2;

struct CliOverrides {
    std::string config_path;
    double delta = -1.0;
    std::string out;
    int threads = -1;
    bool seedless = false;  // reserved: the pipeline carries no random state
};

RunConfig resolve_config(const CliOverrides& o) {
    RunConfig cfg = o.config_path.empty() ? RunConfig{} : load_config_file(o.config_path);
    if (o.delta > 0) cfg.delta = o.delta;
    if (!o.out.empty()) cfg.out_dir = o.out;
    if (o.threads > 0) cfg.threads = o.threads;
    validate(cfg);
    for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << "\n";
    return cfg;
}

void write_error_json(const fs::path& dir, const std::string& stage, const std::string& message,
                      const std::vector<std::string>& log) {
    json j;
    j["stage"] = stage;
    j["message"] = message;
    j["iteration_log"] = log;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!ec) atomic_write_text(dir / "error.json", j.dump(2) + "\n");
    std::cerr << "error [" << stage << "]: " << message << "\n";
}

int cmd_ground_state(const CliOverrides& o) {
    RunConfig cfg;
    try {
        cfg = resolve_config(o);
    } catch (const std::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    }
    try {
        GroundState gs = pipeline_ground_state(cfg);
        fs::path dir(cfg.out_dir);
        fs::create_directories(dir);
        write_ground_state_outputs(cfg, gs, dir);
        std::cout << "ground state: a = " << gs.center_value << ", lambda = " << gs.lambda
                  << ", outputs in " << dir.string() << "\n";
        return kExitOk;
    } catch (const StageError& e) {
        write_error_json(cfg.out_dir, e.stage, e.what(), e.iteration_log);
        return kExitNumerical;
    } catch (const std::exception& e) {
        write_error_json(cfg.out_dir, "ground_state", e.what(), {});
        return kExitNumerical;
    }
}

int cmd_solve(const CliOverrides& o) {
    RunConfig cfg;
    try {
        cfg = resolve_config(o);
    } catch (const std::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    }
    try {
        GroundState gs = pipeline_ground_state(cfg);
        SolveBundle b = run_solve(cfg, gs, cfg.delta);
        fs::path dir = fs::path(cfg.out_dir);
        fs::create_directories(dir);
        write_solution_bundle(b, dir);
        std::cout << "solve delta = " << cfg.delta << ": tau* = " << b.tau_star
                  << ", l = " << b.root.eig.l << ", min eta = " << b.diag.min_eta << "\n"
                  << "bundle written to " << dir.string() << "\n";
        return kExitOk;
    } catch (const StageError& e) {
        write_error_json(cfg.out_dir, e.stage, e.what(), e.iteration_log);
        return kExitNumerical;
    } catch (const std::exception& e) {
        write_error_json(cfg.out_dir, "solve", e.what(), {});
        return kExitNumerical;
    }
}

int cmd_sweep(const CliOverrides& o) {
    RunConfig cfg;
    try {
        cfg = resolve_config(o);
        if (cfg.delta_list.empty())
            throw std::invalid_argument("sweep requires delta_list in the config");
    } catch (const std::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    }
    try {
        GroundState gs = pipeline_ground_state(cfg);
        std::vector<SolveBundle> bundles;
        ScalingReport rep = run_sweep(cfg, gs, &bundles);
        fs::path dir(cfg.out_dir);
        fs::create_directories(dir);
        atomic_write_text(dir / "scaling_report.json", scaling_report_json(rep, cfg));
        for (size_t i = 0; i < bundles.size(); ++i) {
            if (!bundles[i].grid) continue;
            std::ostringstream sub;
            sub << "delta_" << bundles[i].delta;
            fs::path d = dir / sub.str();
            fs::create_directories(d);
            write_solution_bundle(bundles[i], d);
        }
        for (const auto& f : rep.fits)
            std::cout << f.quantity << ": c2 = " << f.c2_fit << " (predicted " << f.c2_predicted
                      << ", deviation " << 100.0 * f.rel_deviation << "%, R^2 = " << f.r_squared
                      << ")\n";
        for (const auto& f : rep.failures) std::cerr << "sweep failure: " << f << "\n";
        return rep.failures.empty() ? kExitOk : kExitNumerical;
    } catch (const StageError& e) {
        write_error_json(cfg.out_dir, e.stage, e.what(), e.iteration_log);
        return kExitNumerical;
    } catch (const std::exception& e) {
        write_error_json(cfg.out_dir, "sweep", e.what(), {});
        return kExitNumerical;
    }
}

int cmd_diagnose(const std::string& in_dir) {
    try {
        LoadedBundle lb = load_solution_inputs(in_dir);
        GroundState gs = pipeline_ground_state(lb.cfg);
        SolveBundle b = rebuild_bundle(lb, gs);
        std::cout << diagnostics_json(b);
        return kExitOk;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

int cmd_plot(const std::string& in_dir) {
    try {
        LoadedBundle lb = load_solution_inputs(in_dir);
        GroundState gs = pipeline_ground_state(lb.cfg);
        SolveBundle b = rebuild_bundle(lb, gs);
        write_figures(b, in_dir);
        std::cout << "figures written to " << in_dir << "\n";
        return kExitOk;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"vortex-spike stationary capillary-gravity wave laboratory"};
    app.require_subcommand(1);

    CliOverrides o;
    std::string in_dir;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "JSON config file");
        sub->add_option("--delta", o.delta, "override the slab parameter delta");
        sub->add_option("--out", o.out, "output directory");
        sub->add_option("--threads", o.threads, "worker pool size for sweeps");
        sub->add_flag("--seedless", o.seedless, "reserved; the pipeline uses no randomness");
    };

    CLI::App* sub_gs = app.add_subcommand("ground-state", "solve and export the radial profile");
    add_common(sub_gs);
    CLI::App* sub_solve = app.add_subcommand("solve", "full solve at one delta");
    add_common(sub_solve);
    CLI::App* sub_sweep = app.add_subcommand("sweep", "delta sweep with scaling-law regression");
    add_common(sub_sweep);
    CLI::App* sub_diag = app.add_subcommand("diagnose", "recompute diagnostics for a bundle");
    sub_diag->add_option("--in", in_dir, "solution bundle directory")->required();
    CLI::App* sub_plot = app.add_subcommand("plot", "re-emit figures for a bundle");
    sub_plot->add_option("--in", in_dir, "solution bundle directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    if (sub_gs->parsed()) return cmd_ground_state(o);
    if (sub_solve->parsed()) return cmd_solve(o);
    if (sub_sweep->parsed()) return cmd_sweep(o);
    if (sub_diag->parsed()) return cmd_diagnose(in_dir);
    if (sub_plot->parsed()) return cmd_plot(in_dir);
    return kExitInput;
}
