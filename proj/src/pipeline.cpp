#include "vspike/pipeline.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "vspike/figures.hpp"
#include "vspike/io.hpp"

namespace vspike {

using nlohmann::json;

GroundState pipeline_ground_state(const RunConfig& cfg) {
    try {
        return shoot(NonlinearitySpec(cfg.p), cfg.tol_shoot);
    } catch (const std::exception& e) {
        throw StageError("ground_state", e.what());
    }
}

void write_ground_state_outputs(const RunConfig& cfg, const GroundState& gs,
                                const std::filesystem::path& dir) {
    atomic_write_text(dir / "profile.csv", profile_csv(gs));

    json hdr = json::parse(profile_json_header(gs));
    hdr["config_hash"] = cfg.hash();
    atomic_write_text(dir / "profile.json", hdr.dump(2) + "\n");

    NondegeneracyAudit audit = nondegeneracy_audit(gs, 16.0, 0.05);
    json aj;
    aj["eig_small"] = audit.eig_small;
    aj["eig_next"] = audit.eig_next;
    aj["mode_small"] = audit.mode_small;
    aj["mode_next"] = audit.mode_next;
    aj["corr_with_dU"] = audit.corr_with_dU;
    aj["config_hash"] = cfg.hash();
    atomic_write_text(dir / "nondegeneracy_audit.json", aj.dump(2) + "\n");
}

std::shared_ptr<StripGrid> grid_for_delta(const RunConfig& cfg, double delta) {
    double hy_base = (2.0 / cfg.delta) / (cfg.Ny + 1);
    double Lx = std::max(cfg.Lx, std::ceil(1.0 / delta + 10.0));
    return std::make_shared<StripGrid>(StripGrid::with_spacing(delta, Lx, cfg.Nx, hy_base));
}

SolveBundle run_solve(const RunConfig& cfg, const GroundState& gs, double delta) {
    SolveBundle b;
    b.cfg = cfg;
    b.delta = delta;
    b.grid = grid_for_delta(cfg, delta);

    WaveContext ctx;
    ctx.gs = &gs;
    ctx.grid = b.grid.get();
    ctx.prm = {cfg.g, cfg.alpha};
    ctx.opt.tol = cfg.tol_fixed_point;
    ctx.opt.solve_tol = cfg.tol_solve;
    ctx.opt.rescale_C = cfg.rescale_C;
    ctx.eigen_tol = cfg.tol_eigen;

    try {
        b.root = find_tau_root(ctx, 0.0, cfg.tol_tau);
    } catch (const std::exception& e) {
        throw StageError("tau_root", e.what());
    }
    b.tau_star = b.root.tau_star;
    try {
        b.sol = assemble_solution(ctx, b.tau_star, b.root.state);
    } catch (const std::exception& e) {
        throw StageError("assemble", e.what());
    }
    try {
        b.diag = diagnostics(b.sol, ctx, b.root.eig);
    } catch (const std::exception& e) {
        throw StageError("diagnostics", e.what());
    }

    SpikeFields sf0 = make_spike_fields(gs, 0.0, *b.grid);
    Field2D zero(*b.grid);
    b.F_origin_norm = norm(assemble_F(sf0, zero, nullptr));
    b.fp_amplitude =
        norm(b.root.state.v) + (cfg.rescale_C / delta) * norm(b.root.state.gamma_s);
    for (double e : b.sol.eta) b.sup_eta = std::max(b.sup_eta, std::abs(e));
    return b;
}

std::string diagnostics_json(const SolveBundle& b) {
    const Diagnostics& d = b.diag;
    json j;
    j["config_hash"] = b.cfg.hash();
    j["delta"] = b.delta;
    j["tau_star"] = b.tau_star;
    j["bracket"] = {b.root.bracket_lo, b.root.bracket_hi};
    j["eigenvalue_l"] = b.root.eig.l;
    j["eigen_residual"] = b.root.eig.residual;
    j["fp_residual_u"] = b.root.state.residual_u;
    j["fp_residual_bernoulli"] = b.root.state.residual_bernoulli;
    j["energy"] = d.energy;
    j["energy_kinetic"] = d.energy_kinetic;
    j["energy_gravity"] = d.energy_gravity;
    j["energy_surface"] = d.energy_surface;
    j["kinetic_norm_sq"] = d.kinetic_norm_sq;
    j["total_vorticity"] = d.total_vorticity;
    j["omega_L1"] = d.omega_L1;
    j["omega_Linf"] = d.omega_Linf;
    j["boundary_identity"] = d.boundary_identity;
    j["pde_residual"] = d.pde_residual;
    j["bernoulli_residual"] = d.bernoulli_residual;
    j["psi0_distance"] = d.psi0_distance;
    j["eta0_distance"] = d.eta0_distance;
    j["b_tilde"] = d.b_tilde;
    j["b_proj"] = d.b_proj;
    j["min_eta"] = d.min_eta;
    j["eta_argmin"] = d.eta_argmin;
    j["omega_neg_count"] = d.omega_neg_count;
    j["omega_pos_count"] = d.omega_pos_count;
    j["omega_center"] = d.omega_center;
    j["omega_annulus_max"] = d.omega_annulus_max;
    j["closed_streamlines"] = d.closed_streamlines;
    j["F_origin_norm"] = b.F_origin_norm;
    j["fp_amplitude"] = b.fp_amplitude;
    j["sup_eta"] = b.sup_eta;
    json probes = json::array();
    for (const auto& p : b.root.probes)
        probes.push_back({{"tau", p.tau}, {"b_tilde", p.b_tilde}, {"b_proj", p.b_proj}, {"l", p.l}});
    j["probes"] = probes;
    return j.dump(2) + "\n";
}

void write_figures(const SolveBundle& b, const std::filesystem::path& dir) {
    std::vector<double> sx(b.sol.eta_x), sy(b.sol.eta.size());
    for (size_t j = 0; j < b.sol.eta.size(); ++j) sy[j] = 1.0 + b.sol.eta[j];
    atomic_write_text(dir / "psi_streamlines.svg",
                      svg_streamlines(b.sol.mesh_y1, b.sol.mesh_y2, b.sol.phi, b.sol.omega, sx, sy));
    atomic_write_text(dir / "omega.svg",
                      svg_heatmap(b.sol.mesh_y1, b.sol.mesh_y2, b.sol.omega, "vorticity"));
    std::vector<double> eta0v(b.sol.eta0.v.begin(), b.sol.eta0.v.end());
    atomic_write_text(dir / "eta_profile.svg",
                      svg_line_plot(b.sol.eta_x, b.sol.eta, eta0v,
                                    "surface elevation with leading-order overlay"));
}

void write_solution_bundle(const SolveBundle& b, const std::filesystem::path& dir) {
    const StripGrid& g = *b.grid;
    auto Nx = static_cast<std::uint32_t>(g.Nx);
    auto Ny = static_cast<std::uint32_t>(g.Ny);
    write_field_file(dir / "psi.f64", b.sol.phi.v, Nx, Ny, g.Lx, g.delta);
    write_field_file(dir / "omega.f64", b.sol.omega.v, Nx, Ny, g.Lx, g.delta);
    write_field_file(dir / "v.f64", b.root.state.v.v, Nx, Ny, g.Lx, g.delta);
    write_field_file(dir / "mesh_y1.f64", b.sol.mesh_y1.v, Nx, Ny, g.Lx, g.delta);
    write_field_file(dir / "mesh_y2.f64", b.sol.mesh_y2.v, Nx, Ny, g.Lx, g.delta);
    write_field_file(dir / "psi0.f64", b.sol.psi0.v, Nx, Ny, g.Lx, g.delta);
    write_field_file(dir / "gamma_s.f64", b.root.state.gamma_s.v, Nx, 1, g.Lx, g.delta);
    write_field_file(dir / "eta.f64", b.sol.eta, Nx, 1, g.Lx, g.delta);
    write_field_file(dir / "eta0.f64", b.sol.eta0.v, Nx, 1, g.Lx, g.delta);
    atomic_write_text(dir / "diagnostics.json", diagnostics_json(b));

    json m;
    m["schema"] = "vspike-solution-1";
    m["config"] = json::parse(b.cfg.canonical_json());
    m["config_hash"] = b.cfg.hash();
    m["delta"] = b.delta;
    m["tau_star"] = b.tau_star;
    m["files"] = {"psi.f64",     "omega.f64",   "v.f64",   "mesh_y1.f64", "mesh_y2.f64",
                  "psi0.f64",    "gamma_s.f64", "eta.f64", "eta0.f64",    "diagnostics.json"};
    atomic_write_text(dir / "manifest.json", m.dump(2) + "\n");
    write_figures(b, dir);
}

ScalingFit fit_scaling(const std::string& quantity, const std::string& law, double c1,
                       double c2_predicted, const std::vector<double>& deltas,
                       const std::vector<double>& values) {
    const size_t n = deltas.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<double> xs(n), ys(n);
    for (size_t i = 0; i < n; ++i) {
        xs[i] = 1.0 / deltas[i];
        ys[i] = std::log(values[i]) - c1 * std::log(deltas[i]);
        sx += xs[i];
        sy += ys[i];
    }
    double mx = sx / n, my = sy / n;
    for (size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    double c2 = sxy / sxx;
    double ssr = 0, sst = 0;
    for (size_t i = 0; i < n; ++i) {
        double fit = my + c2 * (xs[i] - mx);
        ssr += (ys[i] - fit) * (ys[i] - fit);
        sst += (ys[i] - my) * (ys[i] - my);
    }
    ScalingFit f;
    f.quantity = quantity;
    f.law = law;
    f.c1_fixed = c1;
    f.c2_fit = c2;
    f.c2_predicted = c2_predicted;
    f.rel_deviation = std::abs(c2 - c2_predicted) / std::abs(c2_predicted);
    f.r_squared = 1.0 - ssr / sst;
    return f;
}

ScalingReport run_sweep(const RunConfig& cfg, const GroundState& gs,
                        std::vector<SolveBundle>* bundles) {
    std::vector<double> deltas = cfg.delta_list.empty() ? std::vector<double>{cfg.delta}
                                                        : cfg.delta_list;
    std::vector<SolveBundle> results(deltas.size());
    std::vector<std::string> failures(deltas.size());
    std::vector<char> ok(deltas.size(), 0);

    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= deltas.size()) break;
            try {
                results[i] = run_solve(cfg, gs, deltas[i]);
                ok[i] = 1;
            } catch (const StageError& e) {
                failures[i] = "delta " + std::to_string(deltas[i]) + " [" + e.stage +
                              "]: " + e.what();
            } catch (const std::exception& e) {
                failures[i] = "delta " + std::to_string(deltas[i]) + ": " + e.what();
            }
        }
    };
    int nthreads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(deltas.size())));
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    ScalingReport rep;
    std::vector<double> dd, l, sup_eta, forig, fpamp, eta0d, tvr, taus;
    for (size_t i = 0; i < deltas.size(); ++i) {
        if (!ok[i]) {
            rep.failures.push_back(failures[i]);
            continue;
        }
        const SolveBundle& b = results[i];
        dd.push_back(deltas[i]);
        l.push_back(b.root.eig.l);
        sup_eta.push_back(b.sup_eta);
        forig.push_back(b.F_origin_norm);
        fpamp.push_back(b.fp_amplitude);
        eta0d.push_back(b.diag.eta0_distance);
        tvr.push_back(std::abs(b.diag.total_vorticity) / b.diag.omega_L1);
        taus.push_back(std::abs(b.tau_star));
    }
    rep.deltas = dd;
    rep.tracked = {{"eigenvalue_l", l},
                   {"sup_eta", sup_eta},
                   {"F_origin_norm", forig},
                   {"fp_amplitude", fpamp},
                   {"eta0_distance", eta0d},
                   {"vorticity_ratio", tvr},
                   {"abs_tau_star", taus}};
    if (dd.size() >= 3) {
        rep.fits.push_back(fit_scaling(
            "eigenvalue_l", "near-degenerate eigenvalue ~ delta^{1/2} exp(-2(1-|tau|)/delta)", 0.5,
            -2.0, dd, l));
        rep.fits.push_back(fit_scaling(
            "sup_eta", "surface amplitude ~ delta^{-1/2} exp(-2/delta)", -0.5, -2.0, dd, sup_eta));
        rep.fits.push_back(fit_scaling(
            "F_origin_norm", "spike defect ~ delta^{1/4} |log delta|^{1/2} exp(-2/delta)", 0.25,
            -2.0, dd, forig));
        rep.fits.push_back(fit_scaling(
            "fp_amplitude", "correction amplitude ~ delta^{-2} exp(-2/delta)", -2.0, -2.0, dd,
            fpamp));
    }
    if (bundles) *bundles = std::move(results);
    return rep;
}

std::string scaling_report_json(const ScalingReport& rep, const RunConfig& cfg) {
    json j;
    j["config_hash"] = cfg.hash();
    j["deltas"] = rep.deltas;
    json fits = json::array();
    for (const auto& f : rep.fits)
        fits.push_back({{"quantity", f.quantity},
                        {"law", f.law},
                        {"c1_fixed", f.c1_fixed},
                        {"c2_fit", f.c2_fit},
                        {"c2_predicted", f.c2_predicted},
                        {"rel_deviation", f.rel_deviation},
                        {"r_squared", f.r_squared}});
    j["fits"] = fits;
    json tracked;
    for (const auto& t : rep.tracked) tracked[t.name] = t.values;
    j["tracked"] = tracked;
    j["failures"] = rep.failures;
    return j.dump(2) + "\n";
}

LoadedBundle load_solution_inputs(const std::filesystem::path& dir) {
    std::ifstream in(dir / "manifest.json");
    if (!in) throw std::invalid_argument("bundle: missing manifest.json in " + dir.string());
    json m = json::parse(in);
    LoadedBundle lb;
    lb.cfg = parse_config(m.at("config").dump());
    validate(lb.cfg);
    lb.delta = m.at("delta").get<double>();
    lb.tau_star = m.at("tau_star").get<double>();
    lb.v_data = read_field_file(dir / "v.f64", nullptr);
    lb.gamma_data = read_field_file(dir / "gamma_s.f64", nullptr);
    return lb;
}

SolveBundle rebuild_bundle(const LoadedBundle& lb, const GroundState& gs) {
    SolveBundle b;
    b.cfg = lb.cfg;
    b.delta = lb.delta;
    b.tau_star = lb.tau_star;
    b.grid = grid_for_delta(lb.cfg, lb.delta);
    const StripGrid& g = *b.grid;
    if (lb.v_data.size() != g.size())
        throw std::invalid_argument("bundle: stored field does not match the rebuilt grid");

    WaveContext ctx;
    ctx.gs = &gs;
    ctx.grid = b.grid.get();
    ctx.prm = {lb.cfg.g, lb.cfg.alpha};
    ctx.opt.tol = lb.cfg.tol_fixed_point;
    ctx.opt.solve_tol = lb.cfg.tol_solve;
    ctx.opt.rescale_C = lb.cfg.rescale_C;
    ctx.eigen_tol = lb.cfg.tol_eigen;

    WaveState st;
    st.tau = lb.tau_star;
    st.v = Field2D(g);
    st.v.v = lb.v_data;
    st.gamma_s = SurfaceField(g, LineScale::physical);
    st.gamma_s.v = lb.gamma_data;

    EllipticOperator L = build(g, gs, lb.tau_star);
    Field2D U2 = make_U2(gs, lb.tau_star, g);
    EigenPair eig = eigenpair(L, U2, lb.cfg.tol_eigen);
    b.root.tau_star = lb.tau_star;
    b.root.state = st;
    b.root.eig = std::move(eig);
    b.sol = assemble_solution(ctx, lb.tau_star, st);
    b.diag = diagnostics(b.sol, ctx, b.root.eig);
    for (double e : b.sol.eta) b.sup_eta = std::max(b.sup_eta, std::abs(e));
    SpikeFields sf0 = make_spike_fields(gs, 0.0, g);
    Field2D zero(g);
    b.F_origin_norm = norm(assemble_F(sf0, zero, nullptr));
    b.fp_amplitude = norm(st.v) + (lb.cfg.rescale_C / lb.delta) * norm(st.gamma_s);
    return b;
}

} // namespace vspike
