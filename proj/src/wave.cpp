#include "vspike/wave.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "vspike/fft.hpp"
#include "vspike/figures.hpp"

namespace vspike {

namespace {

using cd = std::complex<double>;

SurfaceField spectral_line(const std::vector<cd>& spec, const StripGrid& g, LineScale scale) {
    Rfft fft(g.Nx);
    SurfaceField out(g, scale);
    std::vector<cd> tmp = spec;
    fft.inverse(tmp.data(), out.v.data());
    return out;
}

SurfaceField helmholtz_apply(const SurfaceField& f, double g, double alpha) {
    Rfft fft(f.grid->Nx);
    auto xi = line_wavenumbers(f);
    std::vector<cd> spec(fft.nmodes());
    fft.forward(f.v.data(), spec.data());
    for (size_t k = 0; k < spec.size(); ++k) spec[k] *= (g + alpha * alpha * xi[k] * xi[k]);
    return spectral_line(spec, *f.grid, f.scale);
}

} // namespace

SpikeFields make_spike_fields(const GroundState& gs, double tau, const StripGrid& grid) {
    if (std::abs(tau) > 1.0 / 3.0 + 1e-12)
        throw std::invalid_argument("make_spike_fields: |tau| must not exceed 1/3");
    SpikeFields sf;
    sf.grid = &grid;
    sf.spec = gs.spec;
    sf.tau = tau;
    sf.U = Field2D(grid);
    sf.gamma_U = Field2D(grid);
    sf.gamma_prime_U = Field2D(grid);
    const double shift = tau / grid.delta;
    for (int i = 0; i < grid.Ny; ++i) {
        for (int j = 0; j < grid.Nx; ++j) {
            double u = sample_at(gs, grid.x1[j], grid.x2[i], shift, SampleWhat::U);
            sf.U.at(i, j) = u;
            sf.gamma_U.at(i, j) = gamma_eval(gs.spec, u);
            sf.gamma_prime_U.at(i, j) = gamma_prime(gs.spec, u);
        }
    }
    SurfaceField top(grid, LineScale::rescaled), bot(grid, LineScale::rescaled);
    sf.d2U_top = SurfaceField(grid, LineScale::rescaled);
    sf.d2U_bot = SurfaceField(grid, LineScale::rescaled);
    for (int j = 0; j < grid.Nx; ++j) {
        top.v[j] = sample_at(gs, grid.x1[j], grid.wall(), shift, SampleWhat::U);
        bot.v[j] = sample_at(gs, grid.x1[j], -grid.wall(), shift, SampleWhat::U);
        sf.d2U_top.v[j] = sample_at(gs, grid.x1[j], grid.wall(), shift, SampleWhat::d2U);
        sf.d2U_bot.v[j] = sample_at(gs, grid.x1[j], -grid.wall(), shift, SampleWhat::d2U);
    }
    sf.U_bc = apply_bc(top, bot);
    sf.dUbc_top = bc_normal_derivative(top, bot, true);
    sf.dUbc_bot = bc_normal_derivative(top, bot, false);
    return sf;
}

Field2D assemble_F(const SpikeFields& sf, const Field2D& v, const ConformalPack* pack,
                   double sigma_threshold) {
    const StripGrid& g = *sf.grid;
    if (pack && pack->amplitude > sigma_threshold)
        throw std::runtime_error("assemble_F: conformal pack amplitude above the small-amplitude threshold");
    Field2D out(g);
    for (int i = 0; i < g.Ny; ++i) {
        const double* vv = v.row(i);
        const double* Ur = sf.U.row(i);
        const double* gU = sf.gamma_U.row(i);
        const double* gpU = sf.gamma_prime_U.row(i);
        const double* Ubc = sf.U_bc.row(i);
        const double* jac = pack ? pack->jac_sq.row(i) : nullptr;
        double* o = out.row(i);
        for (int j = 0; j < g.Nx; ++j) {
            double phi = vv[j] + Ur[j] - Ubc[j];
            double gphi = gamma_eval(sf.spec, phi);
            double J = jac ? jac[j] : 1.0;
            o[j] = J * gphi - gU[j] - gpU[j] * vv[j] + Ubc[j];
        }
    }
    return out;
}

SurfaceField apply_A(const ConformalPack& pack, const SurfaceField& w, const PhysicalParams& prm) {
    const StripGrid& g = *pack.grid;
    Rfft fft(g.Nx);
    auto xi = pack.xi;
    std::vector<cd> zh(fft.nmodes());
    fft.forward(w.v.data(), zh.data());
    for (size_t k = 0; k < zh.size(); ++k) zh[k] /= (prm.g + prm.alpha * prm.alpha * xi[k] * xi[k]);

    std::vector<cd> spec(zh.size());
    SurfaceField z(g, LineScale::physical), zpp(g, LineScale::physical), mzp(g, LineScale::physical);
    fft.inverse(zh.data(), z.v.data());
    for (size_t k = 0; k < zh.size(); ++k) spec[k] = -xi[k] * xi[k] * zh[k];
    fft.inverse(spec.data(), zpp.v.data());
    for (size_t k = 0; k < zh.size(); ++k) {
        double m = (k == 0) ? 0.5 : xi[k] * (1.0 + std::exp(-4.0 * xi[k])) / (1.0 - std::exp(-4.0 * xi[k]));
        spec[k] = m * cd(0.0, 1.0) * xi[k] * zh[k];
    }
    fft.inverse(spec.data(), mzp.v.data());

    SurfaceField out(g, LineScale::physical);
    const double a2 = prm.alpha * prm.alpha;
    for (int j = 0; j < g.Nx; ++j) {
        double B = pack.Bline.v[j];
        out.v[j] = prm.g * z.v[j] -
                   a2 * std::pow(B, -1.5) *
                       ((1.0 + pack.mG.v[j]) * zpp.v[j] - pack.Gp.v[j] * mzp.v[j]);
    }
    return out;
}

SurfaceField apply_A_inverse(const ConformalPack& pack, const SurfaceField& rhs,
                             const PhysicalParams& prm, double tol, int maxit) {
    SurfaceField w = rhs;
    double prev = 1e300;
    int growth = 0;
    for (int it = 0; it < maxit; ++it) {
        SurfaceField Aw = apply_A(pack, w, prm);
        // w_new = rhs - (A - I) w
        SurfaceField w_new = w;
        double upd = 0.0, scale_ref = 1.0;
        for (int j = 0; j < pack.grid->Nx; ++j) {
            w_new.v[j] = rhs.v[j] - Aw.v[j] + w.v[j];
            upd = std::max(upd, std::abs(w_new.v[j] - w.v[j]));
            scale_ref = std::max(scale_ref, std::abs(w_new.v[j]));
        }
        w = w_new;
        if (upd < tol * scale_ref) return w;
        if (upd > prev * (1.0 + 1e-12)) {
            if (++growth >= 3)
                throw std::runtime_error("apply_A_inverse: contraction failure, surface amplitude too large");
        } else {
            growth = 0;
        }
        prev = upd;
    }
    throw std::runtime_error("apply_A_inverse: no convergence");
}

SurfaceField wall_trace(const SpikeFields& sf, const Field2D& v, bool top) {
    const StripGrid& g = *sf.grid;
    SurfaceField t(g, LineScale::rescaled);
    const double h = g.hy;
    for (int j = 0; j < g.Nx; ++j) {
        double fd;
        if (top) {
            fd = -(-48.0 * v.at(g.Ny - 1, j) + 36.0 * v.at(g.Ny - 2, j) - 16.0 * v.at(g.Ny - 3, j) +
                   3.0 * v.at(g.Ny - 4, j)) /
                 (12.0 * h);
            t.v[j] = fd + sf.d2U_top.v[j] - sf.dUbc_top.v[j];
        } else {
            fd = (-48.0 * v.at(0, j) + 36.0 * v.at(1, j) - 16.0 * v.at(2, j) + 3.0 * v.at(3, j)) /
                 (12.0 * h);
            t.v[j] = fd + sf.d2U_bot.v[j] - sf.dUbc_bot.v[j];
        }
    }
    return t;
}

SurfaceField assemble_G(const SpikeFields& sf, const Field2D& v, const ConformalPack& pack,
                        const PhysicalParams& prm) {
    const StripGrid& g = *sf.grid;
    SurfaceField t = wall_trace(sf, v, true);
    SurfaceField q(g, LineScale::physical);
    for (int j = 0; j < g.Nx; ++j) q.v[j] = t.v[j] * t.v[j] / pack.Bline.v[j];
    project_even(q);
    SurfaceField w = apply_A_inverse(pack, q, prm);
    const double f = 1.0 / (2.0 * g.delta * g.delta);
    for (auto& x : w.v) x *= f;
    return w;
}

WaveState ls_fixed_point(const GroundState& gs, const StripGrid& grid, double tau,
                         const EllipticOperator& L, const EigenPair& eig,
                         const PhysicalParams& prm, const FixedPointOptions& opt,
                         const WaveState* warm_start) {
    if (std::abs(tau) > 1.0 / 3.0)
        throw std::invalid_argument("ls_fixed_point: |tau| > 1/3 is outside the admissible band");
    if (!(prm.g > 0.0) || !(prm.alpha > 0.0))
        throw std::invalid_argument("ls_fixed_point: g and alpha must be positive");

    SpikeFields sf = make_spike_fields(gs, tau, grid);
    WaveState st;
    st.tau = tau;
    st.v = warm_start ? warm_start->v : Field2D(grid);
    st.gamma_s = warm_start ? warm_start->gamma_s : SurfaceField(grid, LineScale::physical);

    const double Cd = opt.rescale_C / grid.delta;
    const double n_u0 = dot(eig.U0, eig.U0);
    double prev_update = 1e300;
    int growth = 0;
    bool converged = false;

    for (int it = 0; it < opt.max_iter; ++it) {
        ConformalPack pack = build_conformal_pack(st.gamma_s);
        if (pack.amplitude > opt.sigma_threshold)
            throw std::runtime_error("ls_fixed_point: surface amplitude breached the sigma threshold");

        Field2D F = assemble_F(sf, st.v, &pack, opt.sigma_threshold);
        Field2D Fp = F;
        axpy(-dot(F, eig.U0) / n_u0, eig.U0, Fp);
        Field2D v_new = solve_projected(L, Fp, eig.U0, opt.solve_tol);
        scale(v_new, -1.0);

        SurfaceField gs_new(grid, LineScale::physical);
        if (!opt.force_flat_surface) {
            SurfaceField Gw = assemble_G(sf, st.v, pack, prm);
            gs_new = helmholtz_inverse_surface(Gw, prm.g, prm.alpha);
            for (auto& x : gs_new.v) x = -x;
        }

        Field2D dv = v_new;
        axpy(-1.0, st.v, dv);
        SurfaceField dg = gs_new;
        for (int j = 0; j < grid.Nx; ++j) dg.v[j] -= st.gamma_s.v[j];
        double nv = norm(v_new), ng = norm(gs_new);
        double upd = norm(dv) + Cd * norm(dg);
        double total = nv + Cd * ng;
        double rel = upd / std::max(total, 1e-300);
        st.v = v_new;
        st.gamma_s = gs_new;
        st.log.push_back({it, nv, ng, rel});

        if (rel < opt.tol) {
            converged = true;
            break;
        }
        // the first few steps legitimately grow while the surface settles in;
        // afterwards a sustained growth of the update signals divergence
        if (it >= 8 && upd > prev_update * 1.05) {
            if (++growth >= 5) {
                std::ostringstream os;
                os << "ls_fixed_point: divergence, update norm grew five consecutive steps"
                   << " (last " << upd << ")";
                throw std::runtime_error(os.str());
            }
        } else {
            growth = 0;
        }
        prev_update = upd;
    }
    if (!converged) throw std::runtime_error("ls_fixed_point: no convergence within max_iter");

    // residuals of the two projected equations, reassembled fresh
    ConformalPack pack = build_conformal_pack(st.gamma_s);
    Field2D F = assemble_F(sf, st.v, &pack, opt.sigma_threshold);
    Field2D res1 = L.apply(st.v);
    axpy(1.0, F, res1);
    axpy(-dot(F, eig.U0) / n_u0, eig.U0, res1);
    st.residual_u = norm(res1);
    if (!opt.force_flat_surface) {
        SurfaceField Gw = assemble_G(sf, st.v, pack, prm);
        SurfaceField res2 = helmholtz_apply(st.gamma_s, prm.g, prm.alpha);
        for (int j = 0; j < grid.Nx; ++j) res2.v[j] += Gw.v[j];
        st.residual_bernoulli = norm(res2);
    }
    return st;
}

SurfaceField eta0_leading(double delta, double tau, const GroundState& gs,
                          const PhysicalParams& prm, const StripGrid& grid) {
    SurfaceField q(grid, LineScale::physical);
    const double shift = tau / delta;
    for (int j = 0; j < grid.Nx; ++j) {
        double t = sample_at(gs, grid.x1[j], grid.wall(), shift, SampleWhat::d2U);
        q.v[j] = t * t;
    }
    SurfaceField eta0 = helmholtz_inverse_surface(q, prm.g, prm.alpha);
    const double f = -2.0 / (delta * delta);
    for (auto& x : eta0.v) x *= f;
    return eta0;
}

double bifurcation_b(const SpikeFields& sf, const WaveState& state, const EigenPair& eig,
                     const FixedPointOptions& opt) {
    ConformalPack pack = build_conformal_pack(state.gamma_s);
    Field2D F = assemble_F(sf, state.v, &pack, opt.sigma_threshold);
    return dot(eig.U0, F);
}

double bifurcation_b_boundary(const SpikeFields& sf, const WaveState& state) {
    const StripGrid& g = *sf.grid;
    ConformalPack pack = build_conformal_pack(state.gamma_s);
    SurfaceField tt = wall_trace(sf, state.v, true);
    SurfaceField tb = wall_trace(sf, state.v, false);
    double I_top = 0.0, I_bot = 0.0;
    for (int j = 0; j < g.Nx; ++j) {
        double wt = (1.0 + pack.mG.v[j]) / pack.jac_sq.trace_top[j];
        double wb = (1.0 + pack.g2x2_bot.v[j]) / pack.jac_sq.trace_bottom[j];
        I_top += wt * tt.v[j] * tt.v[j];
        I_bot += wb * tb.v[j] * tb.v[j];
    }
    I_top *= g.hx;
    I_bot *= g.hx;
    return 0.5 * (I_bot - I_top);
}

namespace {

struct ProbeResult {
    EigenPair eig;
    WaveState state;
    double b_tilde, b_proj;
};

ProbeResult run_probe(const WaveContext& ctx, double tau, const WaveState* warm) {
    const StripGrid& grid = *ctx.grid;
    EllipticOperator L = build(grid, *ctx.gs, tau);
    Field2D U2 = make_U2(*ctx.gs, tau, grid);
    EigenPair eig = eigenpair(L, U2, ctx.eigen_tol);
    WaveState st = ls_fixed_point(*ctx.gs, grid, tau, L, eig, ctx.prm, ctx.opt, warm);
    SpikeFields sf = make_spike_fields(*ctx.gs, tau, grid);
    ProbeResult pr{std::move(eig), std::move(st), 0.0, 0.0};
    pr.b_tilde = bifurcation_b_boundary(sf, pr.state);
    pr.b_proj = bifurcation_b(sf, pr.state, pr.eig, ctx.opt);
    return pr;
}

} // namespace

TauRootResult find_tau_root(const WaveContext& ctx, double bracket_hint, double tol_tau) {
    const double delta = ctx.grid->delta;
    double h = bracket_hint > 0.0
                   ? bracket_hint
                   : std::min(0.15, 2.0 * std::pow(delta, -3.5) * std::exp(-2.0 / delta));
    TauRootResult out;

    auto probe = [&](double tau, const WaveState* warm) {
        ProbeResult pr = run_probe(ctx, tau, warm);
        out.probes.push_back({tau, pr.b_tilde, pr.b_proj, pr.eig.l});
        return pr;
    };

    ProbeResult plo = probe(-h, nullptr);
    ProbeResult phi_ = probe(+h, &plo.state);
    while (plo.b_tilde * phi_.b_tilde > 0.0) {
        h *= 1.6;
        if (h > 0.3) {
            std::ostringstream os;
            os << "find_tau_root: no sign change of the boundary signal up to |tau| = 0.3"
               << " (b(-h) = " << plo.b_tilde << ", b(+h) = " << phi_.b_tilde << ")";
            throw std::runtime_error(os.str());
        }
        plo = probe(-h, &plo.state);
        phi_ = probe(+h, &phi_.state);
    }

    double lo = -h, hi = +h;
    ProbeResult best = (std::abs(plo.b_tilde) < std::abs(phi_.b_tilde)) ? plo : phi_;
    double b_lo = plo.b_tilde;
    while (hi - lo > tol_tau) {
        double mid = 0.5 * (lo + hi);
        ProbeResult pm = probe(mid, &best.state);
        if (pm.b_tilde * b_lo <= 0.0) {
            hi = mid;
        } else {
            lo = mid;
            b_lo = pm.b_tilde;
        }
        best = std::move(pm);
    }
    out.tau_star = 0.5 * (lo + hi);
    ProbeResult pf = probe(out.tau_star, &best.state);
    out.state = std::move(pf.state);
    out.eig = std::move(pf.eig);
    out.bracket_lo = lo;
    out.bracket_hi = hi;
    return out;
}

double invert_surface_abscissa(const ConformalPack& pack, double X_target) {
    double u = X_target;
    for (int it = 0; it < 80; ++it) {
        auto g12 = eval_conformal(pack, u, 1.0);
        double u_new = u + 0.8 * (X_target - (u + g12[0]));
        if (std::abs(u_new - u) < 1e-14 * std::max(1.0, std::abs(X_target))) return u_new;
        u = u_new;
    }
    throw std::runtime_error("invert_surface_abscissa: map inversion failed to contract");
}

WaveSolution assemble_solution(const WaveContext& ctx, double tau_star, const WaveState& state) {
    const StripGrid& g = *ctx.grid;
    const double delta = g.delta;
    WaveSolution sol;
    sol.tau = tau_star;
    sol.state = state;
    sol.pack = build_conformal_pack(state.gamma_s);

    SpikeFields sf = make_spike_fields(*ctx.gs, tau_star, g);
    sol.phi = Field2D(g);
    sol.omega = Field2D(g);
    sol.psi0 = Field2D(g);
    sol.mesh_y1 = Field2D(g);
    sol.mesh_y2 = Field2D(g);
    const NonlinearitySpec spec = ctx.gs->spec;
    const double shift = tau_star / delta;
    for (int i = 0; i < g.Ny; ++i) {
        for (int j = 0; j < g.Nx; ++j) {
            double phi = state.v.at(i, j) + sf.U.at(i, j) - sf.U_bc.at(i, j);
            sol.phi.at(i, j) = phi;
            sol.omega.at(i, j) = gamma_eval(spec, phi) / (delta * delta);
            double X1 = delta * g.x1[j], X2 = delta * g.x2[i];
            sol.mesh_y1.at(i, j) = X1 + sol.pack.gamma1.at(i, j);
            sol.mesh_y2.at(i, j) = X2 + sol.pack.gamma2.at(i, j);
            // three-spike comparison profile at the physical node
            double y1 = sol.mesh_y1.at(i, j) / delta, y2 = sol.mesh_y2.at(i, j) / delta;
            sol.psi0.at(i, j) = sample_at(*ctx.gs, y1, y2, shift, SampleWhat::U) -
                                sample_at(*ctx.gs, y1, 2.0 / delta - y2, shift, SampleWhat::U) -
                                sample_at(*ctx.gs, y1, -2.0 / delta - y2, shift, SampleWhat::U);
        }
    }

    // surface graph resampled to the uniform physical abscissae
    sol.eta_x.resize(g.Nx);
    sol.eta.resize(g.Nx);
    for (int j = 0; j < g.Nx; ++j) {
        double X = delta * g.x1[j];
        sol.eta_x[j] = X;
        double u = invert_surface_abscissa(sol.pack, X);
        sol.eta[j] = eval_conformal(sol.pack, u, 1.0)[1];
    }
    sol.eta0 = eta0_leading(delta, tau_star, *ctx.gs, ctx.prm, g);
    return sol;
}

Diagnostics diagnostics(const WaveSolution& sol, const WaveContext& ctx, const EigenPair& eig) {
    const StripGrid& g = *ctx.grid;
    const double delta = g.delta;
    Diagnostics d;

    // kinetic energy via conformal invariance of the Dirichlet integral
    Rfft fft(g.Nx);
    std::vector<cd> spec(fft.nmodes());
    std::vector<double> xi(fft.nmodes());
    for (int k = 0; k < fft.nmodes(); ++k) xi[k] = std::numbers::pi * k / g.Lx;
    std::vector<double> dx1(g.Nx);
    double ksq = 0.0;
    for (int i = 0; i < g.Ny; ++i) {
        fft.forward(sol.phi.row(i), spec.data());
        for (int k = 0; k < fft.nmodes(); ++k) spec[k] *= cd(0.0, 1.0) * xi[k];
        fft.inverse(spec.data(), dx1.data());
        for (int j = 0; j < g.Nx; ++j) {
            double up = (i + 1 < g.Ny) ? sol.phi.at(i + 1, j) : 0.0;
            double dn = (i > 0) ? sol.phi.at(i - 1, j) : 0.0;
            double d2 = (up - dn) / (2.0 * g.hy);
            ksq += dx1[j] * dx1[j] + d2 * d2;
        }
    }
    d.kinetic_norm_sq = ksq * g.hx * g.hy;

    // vorticity integrals with the conformal volume element
    double tv = 0.0, l1 = 0.0, linf = 0.0;
    for (int i = 0; i < g.Ny; ++i)
        for (int j = 0; j < g.Nx; ++j) {
            double gphi = sol.omega.at(i, j) * delta * delta;
            double w = sol.pack.jac_sq.at(i, j);
            tv += gphi * w;
            l1 += std::abs(gphi) * w;
            linf = std::max(linf, std::abs(gphi));
        }
    d.total_vorticity = tv * g.hx * g.hy;
    d.omega_L1 = l1 * g.hx * g.hy;
    d.omega_Linf = linf / (delta * delta);

    // surface energies on the parametric grid
    double e_g = 0.0, e_s = 0.0;
    for (int j = 0; j < g.Nx; ++j) {
        double eta_p = sol.pack.gamma_s.v[j];
        double dX = (1.0 + sol.pack.mG.v[j]) * delta * g.hx;
        double etap = sol.pack.Gp.v[j] / (1.0 + sol.pack.mG.v[j]);
        e_g += 0.5 * ctx.prm.g * eta_p * eta_p * dX;
        e_s += ctx.prm.alpha * ctx.prm.alpha * (std::sqrt(1.0 + etap * etap) - 1.0) * dX;
    }
    d.energy_kinetic = 0.5 * d.kinetic_norm_sq;
    d.energy_gravity = e_g;
    d.energy_surface = e_s;
    d.energy = d.energy_kinetic + e_g + e_s;

    SpikeFields sf = make_spike_fields(*ctx.gs, sol.tau, g);
    d.b_tilde = bifurcation_b_boundary(sf, sol.state);
    d.b_proj = bifurcation_b(sf, sol.state, eig, ctx.opt);
    d.boundary_identity = -2.0 * d.b_tilde;

    // collocation residual of the bulk equation (unprojected)
    {
        EllipticOperator L = build(g, *ctx.gs, sol.tau);
        Field2D F = assemble_F(sf, sol.state.v, &sol.pack, ctx.opt.sigma_threshold);
        Field2D res = L.apply(sol.state.v);
        axpy(1.0, F, res);
        double scale_n = 0.0;
        for (int i = 0; i < g.Ny; ++i)
            for (int j = 0; j < g.Nx; ++j) {
                double t = sol.pack.jac_sq.at(i, j) * delta * delta * sol.omega.at(i, j);
                scale_n += t * t;
            }
        scale_n = std::sqrt(scale_n * g.hx * g.hy);
        d.pde_residual = norm(res) / scale_n;
    }

    // surface equation residual in the curvature form
    {
        SurfaceField t = wall_trace(sf, sol.state.v, true);
        double num = 0.0, den = 0.0;
        const double a2 = ctx.prm.alpha * ctx.prm.alpha;
        for (int j = 0; j < g.Nx; ++j) {
            double B = sol.pack.Bline.v[j];
            double head = t.v[j] * t.v[j] / (2.0 * delta * delta * B);
            double curv = a2 * ((1.0 + sol.pack.mG.v[j]) * sol.pack.Gpp.v[j] -
                                sol.pack.Gp.v[j] * sol.pack.mGp.v[j]) /
                          std::pow(B, 1.5);
            double r = head - curv + ctx.prm.g * sol.pack.gamma_s.v[j];
            num += r * r;
            den += head * head;
        }
        d.bernoulli_residual = std::sqrt(num / std::max(den, 1e-300));
    }

    // distances to the leading-order profiles
    {
        double n_num = 0.0, n_den = 0.0;
        for (int i = 0; i < g.Ny; ++i)
            for (int j = 0; j < g.Nx; ++j) {
                double w = sol.pack.jac_sq.at(i, j);
                double diff = sol.phi.at(i, j) - sol.psi0.at(i, j);
                n_num += diff * diff * w;
                n_den += sol.psi0.at(i, j) * sol.psi0.at(i, j) * w;
            }
        d.psi0_distance = std::sqrt(n_num / n_den);
        double e_num = 0.0, e_den = 0.0;
        for (int j = 0; j < g.Nx; ++j) {
            double diff = sol.eta[j] - sol.eta0.v[j];
            e_num += diff * diff;
            e_den += sol.eta0.v[j] * sol.eta0.v[j];
        }
        d.eta0_distance = std::sqrt(e_num / e_den);
    }

    d.min_eta = 1e300;
    for (int j = 0; j < g.Nx; ++j)
        if (sol.eta[j] < d.min_eta) {
            d.min_eta = sol.eta[j];
            d.eta_argmin = sol.eta_x[j];
        }

    // vorticity sign structure in the strip frame
    {
        const double shift = sol.tau / delta;
        long neg = 0, pos = 0;
        double center = 0.0, best = 1e300, ann = -1e300;
        for (int i = 0; i < g.Ny; ++i)
            for (int j = 0; j < g.Nx; ++j) {
                double w = sol.omega.at(i, j);
                if (w < 0) ++neg;
                if (w > 0) ++pos;
                double r = std::hypot(g.x1[j], g.x2[i] - shift);
                if (r < best) {
                    best = r;
                    center = w;
                }
                if (r >= 1.5 && r <= 3.0) ann = std::max(ann, w);
            }
        d.omega_neg_count = neg;
        d.omega_pos_count = pos;
        d.omega_center = center;
        d.omega_annulus_max = ann;
    }

    // closed streamlines around the spike
    {
        double level = 0.0;
        for (int i = 0; i < g.Ny; ++i)
            for (int j = 0; j < g.Nx; ++j) level = std::max(level, sol.phi.at(i, j));
        auto loops = extract_contours(sol.mesh_y1, sol.mesh_y2, sol.phi, 0.5 * level);
        int closed = 0;
        for (auto& p : loops)
            if (p.closed) ++closed;
        d.closed_streamlines = closed;
    }
    return d;
}

} // namespace vspike
