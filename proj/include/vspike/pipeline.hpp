#ifndef VSPIKE_PIPELINE_HPP
#define VSPIKE_PIPELINE_HPP

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "vspike/config.hpp"
#include "vspike/elliptic.hpp"
#include "vspike/ground_state.hpp"
#include "vspike/wave.hpp"

namespace vspike {

class StageError : public std::runtime_error {
public:
    StageError(std::string stage, const std::string& msg, std::vector<std::string> log = {})
        : std::runtime_error(msg), stage(std::move(stage)), iteration_log(std::move(log)) {}
    std::string stage;
    std::vector<std::string> iteration_log;
};

struct SolveBundle {
    RunConfig cfg;
    std::shared_ptr<StripGrid> grid;  // owns the grid the fields point into
    double delta = 0.0;
    double tau_star = 0.0;
    TauRootResult root;
    WaveSolution sol;
    Diagnostics diag;
    double F_origin_norm = 0.0;      // |F(0,0,0)| on this grid
    double fp_amplitude = 0.0;       // |v| + (C/delta)|Gamma_s|
    double sup_eta = 0.0;
};

// Grid used for a given delta: the configured Ny fixes the wall spacing at the
// baseline delta, other sweep points keep that spacing.
std::shared_ptr<StripGrid> grid_for_delta(const RunConfig& cfg, double delta);

// Orchestration entry points shared by the CLI and the test suites.
GroundState pipeline_ground_state(const RunConfig& cfg);
void write_ground_state_outputs(const RunConfig& cfg, const GroundState& gs,
                                const std::filesystem::path& dir);

SolveBundle run_solve(const RunConfig& cfg, const GroundState& gs, double delta);
void write_solution_bundle(const SolveBundle& b, const std::filesystem::path& dir);

struct ScalingFit {
    std::string quantity;
    std::string law;           // human-readable statement of the expected scaling
    double c1_fixed = 0.0;     // pinned log-delta prefactor exponent
    double c2_fit = 0.0;       // fitted 1/delta coefficient
    double c2_predicted = 0.0;
    double rel_deviation = 0.0;
    double r_squared = 0.0;
};

struct SweepQuantity {
    std::string name;
    std::vector<double> values;  // one per delta
};

struct ScalingReport {
    std::vector<double> deltas;
    std::vector<ScalingFit> fits;
    std::vector<SweepQuantity> tracked;
    std::vector<std::string> failures;  // per-delta failure notes
};

// Least-squares fit of log y = c0 + c1*log(delta) + c2/delta with c1 pinned.
ScalingFit fit_scaling(const std::string& quantity, const std::string& law, double c1,
                       double c2_predicted, const std::vector<double>& deltas,
                       const std::vector<double>& values);

ScalingReport run_sweep(const RunConfig& cfg, const GroundState& gs,
                        std::vector<SolveBundle>* bundles = nullptr);

std::string scaling_report_json(const ScalingReport& rep, const RunConfig& cfg);
std::string diagnostics_json(const SolveBundle& b);

// Bundle re-load for diagnose/plot: the stored state plus the deterministic
// ground-state rebuild are enough to reassemble everything else.
struct LoadedBundle {
    RunConfig cfg;
    double delta = 0.0;
    double tau_star = 0.0;
    std::vector<double> v_data;
    std::vector<double> gamma_data;
};
LoadedBundle load_solution_inputs(const std::filesystem::path& dir);
SolveBundle rebuild_bundle(const LoadedBundle& lb, const GroundState& gs);

void write_figures(const SolveBundle& b, const std::filesystem::path& dir);

} // namespace vspike

#endif
