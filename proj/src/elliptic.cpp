#include "vspike/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "vspike/fft.hpp"
#include "vspike/strip_operators.hpp"

namespace vspike {

namespace {

using cd = std::complex<double>;

std::vector<double> rescaled_wavenumbers(const StripGrid& g) {
    std::vector<double> xi(g.Nx / 2 + 1);
    for (int k = 0; k < g.Nx / 2 + 1; ++k) xi[k] = std::numbers::pi * k / g.Lx;
    return xi;
}

} // namespace

Field2D EllipticOperator::apply(const Field2D& u) const {
    const StripGrid& g = *grid;
    if (u.grid != grid) throw std::invalid_argument("EllipticOperator::apply: grid mismatch");
    Field2D out(g);
    Rfft fft(g.Nx);
    auto xi = rescaled_wavenumbers(g);
    std::vector<cd> spec(fft.nmodes());

    // -d^2/dx1^2 per row, spectral
    for (int i = 0; i < g.Ny; ++i) {
        fft.forward(u.row(i), spec.data());
        for (int k = 0; k < fft.nmodes(); ++k) spec[k] *= xi[k] * xi[k];
        fft.inverse(spec.data(), out.row(i));
    }
    // -d^2/dx2^2 second-order stencil with homogeneous walls, plus potential
    const double ihy2 = 1.0 / (g.hy * g.hy);
    for (int i = 0; i < g.Ny; ++i) {
        const double* um = (i > 0) ? u.row(i - 1) : nullptr;
        const double* up = (i + 1 < g.Ny) ? u.row(i + 1) : nullptr;
        const double* uc = u.row(i);
        const double* q = potential.row(i);
        double* o = out.row(i);
        for (int j = 0; j < g.Nx; ++j) {
            double lap = -2.0 * uc[j];
            if (um) lap += um[j];
            if (up) lap += up[j];
            o[j] += -lap * ihy2 + q[j] * uc[j];
        }
    }
    return out;
}

Field2D EllipticOperator::precondition(const Field2D& f) const {
    const StripGrid& g = *grid;
    Rfft fft(g.Nx);
    auto xi = rescaled_wavenumbers(g);
    const int nm = fft.nmodes();
    const int Ny = g.Ny;

    std::vector<cd> spec(static_cast<size_t>(Ny) * nm);
    for (int i = 0; i < Ny; ++i) fft.forward(f.row(i), spec.data() + static_cast<size_t>(i) * nm);

    const double off = -1.0 / (g.hy * g.hy);
    std::vector<cd> col(Ny), dp(Ny);
    std::vector<double> cp(Ny);
    Field2D out(g);
    for (int k = 0; k < nm; ++k) {
        double d = (1.0 + xi[k] * xi[k]) + 2.0 / (g.hy * g.hy);
        for (int i = 0; i < Ny; ++i) col[i] = spec[static_cast<size_t>(i) * nm + k];
        cp[0] = off / d;
        dp[0] = col[0] / d;
        for (int i = 1; i < Ny; ++i) {
            double m = d - off * cp[i - 1];
            cp[i] = off / m;
            dp[i] = (col[i] - off * dp[i - 1]) / m;
        }
        col[Ny - 1] = dp[Ny - 1];
        for (int i = Ny - 2; i >= 0; --i) col[i] = dp[i] - cp[i] * col[i + 1];
        for (int i = 0; i < Ny; ++i) spec[static_cast<size_t>(i) * nm + k] = col[i];
    }
    for (int i = 0; i < Ny; ++i) fft.inverse(spec.data() + static_cast<size_t>(i) * nm, out.row(i));
    return out;
}

EllipticOperator build(const StripGrid& grid, const GroundState& gs, double tau) {
    if (std::abs(tau) > 1.0 / 3.0 + 1e-12)
        throw std::invalid_argument("build: |tau| must not exceed 1/3");
    EllipticOperator L;
    L.grid = &grid;
    L.tau = tau;
    L.potential = Field2D(grid);
    const double shift = tau / grid.delta;
    for (int i = 0; i < grid.Ny; ++i)
        for (int j = 0; j < grid.Nx; ++j)
            L.potential.at(i, j) =
                sample_at(gs, grid.x1[j], grid.x2[i], shift, SampleWhat::gamma_prime_U);
    return L;
}

Field2D minres(const std::function<Field2D(const Field2D&)>& apply_op,
               const std::function<Field2D(const Field2D&)>& prec, const Field2D& b,
               double tol, int maxit, SolveInfo* info) {
    const double normb = norm(b);
    Field2D x(*b.grid);
    if (info) *info = SolveInfo{};
    if (normb == 0.0) {
        if (info) info->converged = true;
        return x;
    }

    Field2D r1 = b;
    Field2D y = prec(r1);
    double beta1 = dot(r1, y);
    if (beta1 <= 0.0) throw std::runtime_error("minres: preconditioner not positive definite");
    beta1 = std::sqrt(beta1);

    double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0;
    double qrnorm = beta1, phibar = beta1, cs = -1.0, sn = 0.0;
    double check_level = 0.5 * tol;
    Field2D r2 = r1;
    Field2D w(*b.grid), w2(*b.grid);

    int itn = 0;
    bool done = false;
    while (itn < maxit && !done) {
        ++itn;
        double s = 1.0 / beta;
        Field2D v = y;
        scale(v, s);
        y = apply_op(v);
        if (itn >= 2) axpy(-beta / oldb, r1, y);
        double alfa = dot(v, y);
        axpy(-alfa / beta, r2, y);
        r1 = r2;
        r2 = y;
        y = prec(r2);
        oldb = beta;
        beta = dot(r2, y);
        if (beta < 0.0) throw std::runtime_error("minres: preconditioner not positive definite");
        beta = std::sqrt(beta);

        double oldeps = epsln;
        double delta = cs * dbar + sn * alfa;
        double gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;

        double gamma = std::max(std::hypot(gbar, beta), 1e-300);
        cs = gbar / gamma;
        sn = beta / gamma;
        double phi = cs * phibar;
        phibar = sn * phibar;

        // w_new = (v - oldeps*w1 - delta*w2)/gamma, rolling the two back vectors
        Field2D wn = v;
        axpy(-oldeps, w2, wn);
        axpy(-delta, w, wn);
        scale(wn, 1.0 / gamma);
        w2 = w;
        w = wn;
        axpy(phi, w, x);

        qrnorm = phibar;
        if (info) info->history.push_back(qrnorm / beta1);
        if (qrnorm <= check_level * beta1) {
            Field2D res = apply_op(x);
            axpy(-1.0, b, res);
            double tr = norm(res) / normb;
            if (tr <= tol) {
                if (info) {
                    info->converged = true;
                    info->rel_residual = tr;
                }
                done = true;
            } else {
                check_level *= 0.25;  // recurrence estimate ran ahead of the true residual
            }
        }
        if (qrnorm <= 1e-14 * beta1) break;  // roundoff floor
    }
    if (info) {
        info->iterations = itn;
        if (!done) {
            Field2D res = apply_op(x);
            axpy(-1.0, b, res);
            info->rel_residual = norm(res) / normb;
            info->converged = info->rel_residual <= tol;
        }
    }
    return x;
}

Field2D solve(const EllipticOperator& L, const Field2D& f, double tol, int maxit,
              SolveInfo* info) {
    if (!(tol > 0)) throw std::invalid_argument("solve: tol must be positive");
    SolveInfo local;
    Field2D x = minres([&L](const Field2D& u) { return L.apply(u); },
                       [&L](const Field2D& r) { return L.precondition(r); }, f, tol, maxit, &local);
    if (info) *info = local;
    if (!local.converged) {
        std::ostringstream os;
        os << "solve: max iterations (" << local.iterations
           << ") exceeded, rel residual " << local.rel_residual
           << " (expected near the degenerate direction when the right side has a"
              " large U0 component and l is tiny)";
        throw SolveError(os.str(), local);
    }
    return x;
}

Field2D solve_projected(const EllipticOperator& L, const Field2D& f, const Field2D& dir,
                        double tol, int maxit, SolveInfo* info) {
    const double nd2 = dot(dir, dir);
    auto project = [&](Field2D u) {
        axpy(-dot(u, dir) / nd2, dir, u);
        return u;
    };
    Field2D fp = project(f);
    SolveInfo local;
    Field2D x = minres([&](const Field2D& u) { return project(L.apply(project(u))); },
                       [&](const Field2D& r) { return project(L.precondition(project(r))); }, fp,
                       tol, maxit, &local);
    x = project(x);
    if (info) *info = local;
    if (!local.converged) {
        std::ostringstream os;
        os << "solve_projected: max iterations (" << local.iterations << ") exceeded, rel residual "
           << local.rel_residual;
        throw SolveError(os.str(), local);
    }
    return x;
}

Field2D make_U2(const GroundState& gs, double tau, const StripGrid& grid) {
    if (std::abs(tau) > 1.0 / 3.0 + 1e-12)
        throw std::invalid_argument("make_U2: |tau| must not exceed 1/3");
    const double shift = tau / grid.delta;
    SurfaceField top(grid, LineScale::rescaled), bot(grid, LineScale::rescaled);
    for (int j = 0; j < grid.Nx; ++j) {
        top.v[j] = sample_at(gs, grid.x1[j], grid.wall(), shift, SampleWhat::d2U);
        bot.v[j] = sample_at(gs, grid.x1[j], -grid.wall(), shift, SampleWhat::d2U);
    }
    Field2D U2 = apply_bc(top, bot);
    for (int i = 0; i < grid.Ny; ++i)
        for (int j = 0; j < grid.Nx; ++j)
            U2.at(i, j) = sample_at(gs, grid.x1[j], grid.x2[i], shift, SampleWhat::d2U) - U2.at(i, j);
    U2.trace_top.assign(grid.Nx, 0.0);
    U2.trace_bottom.assign(grid.Nx, 0.0);
    project_even(U2);
    return U2;
}

EigenPair eigenpair(const EllipticOperator& L, const Field2D& seed, double tol, int max_iter) {
    if (!(tol > 0)) throw std::invalid_argument("eigenpair: tol must be positive");
    Field2D x = seed;
    scale(x, 1.0 / norm(x));
    Field2D Lx = L.apply(x);
    double theta = dot(x, Lx);

    EigenPair ep;
    ep.residual = 1e300;
    int it = 0;
    for (; it < max_iter; ++it) {
        Field2D resf = Lx;
        axpy(-theta, x, resf);
        double res = norm(resf);
        ep.residual = res;
        if (res < tol) break;

        // Shifted step toward the branch the seed selects.  The system is
        // near-singular on purpose; only the direction of y matters, so the
        // inner iteration runs on a budget instead of a residual target.
        SolveInfo si;
        Field2D y = minres([&](const Field2D& u) {
                               Field2D r = L.apply(u);
                               axpy(-theta, u, r);
                               return r;
                           },
                           [&L](const Field2D& r) { return L.precondition(r); }, x, 1e-12, 400,
                           &si);
        double ny = norm(y);
        if (!(ny > 0) || !std::isfinite(ny))
            throw std::runtime_error("eigenpair: inverse iteration produced a degenerate step");
        scale(y, 1.0 / ny);
        if (dot(y, seed) < 0) scale(y, -1.0);
        x = y;
        Lx = L.apply(x);
        theta = dot(x, Lx);
    }
    if (ep.residual >= tol) {
        std::ostringstream os;
        os << "eigenpair: no convergence in " << max_iter << " iterations, residual "
           << ep.residual;
        throw std::runtime_error(os.str());
    }
    double align = dot(x, seed) / norm(seed);
    if (align < 0.5)
        throw std::runtime_error("eigenpair: converged mode is not aligned with the seed");

    ep.l = theta;
    ep.U0 = x;
    ep.iterations = it;
    const double n2 = dot(seed, seed);
    ep.a0 = dot(x, seed) / n2;
    ep.w = ep.U0;
    scale(ep.w, 1.0 / ep.a0);
    axpy(-1.0, seed, ep.w);
    return ep;
}

EigenPair eigen_contraction(const EllipticOperator& L, const Field2D& U2, double tol,
                            int max_iter) {
    const double n2 = dot(U2, U2);
    Field2D LU2 = L.apply(U2);
    Field2D w(*U2.grid);  // start at zero
    double ell = dot(U2, LU2) / n2;

    double prev_update = 1e300;
    int growth_streak = 0;
    for (int it = 0; it < max_iter; ++it) {
        // w_new solves the deflated system L w = ell(w) w - (I-P2) L U2 on U2-perp
        Field2D rhs = w;
        scale(rhs, ell);
        axpy(-1.0, LU2, rhs);
        Field2D w_new = solve_projected(L, rhs, U2, 1e-11, 4000);
        Field2D diff = w_new;
        axpy(-1.0, w, diff);
        double upd = norm(diff);
        if (upd > prev_update * (1.0 + 1e-12)) {
            if (++growth_streak >= 3)
                throw std::runtime_error("eigen_contraction: non-contraction detected");
        } else {
            growth_streak = 0;
        }
        prev_update = upd;
        w = w_new;
        double ell_new = (dot(w, LU2) + dot(U2, LU2)) / n2;
        bool settled = std::abs(ell_new - ell) <= tol * std::abs(ell_new) && upd <= tol * std::sqrt(n2);
        ell = ell_new;
        if (settled) break;
    }

    EigenPair ep;
    ep.l = ell;
    ep.w = w;
    Field2D U0 = U2;
    axpy(1.0, w, U0);
    double nu = norm(U0);
    scale(U0, 1.0 / nu);
    if (dot(U0, U2) < 0) scale(U0, -1.0);
    ep.U0 = U0;
    ep.a0 = dot(U0, U2) / n2;
    Field2D resf = L.apply(ep.U0);
    axpy(-ep.l, ep.U0, resf);
    ep.residual = norm(resf);
    return ep;
}

std::vector<ScalingRow> spectral_scaling_table(const GroundState& gs,
                                               const std::vector<double>& deltas, double tau,
                                               const GridPolicy& policy) {
    for (double d : deltas)
        if (d < 0.2 || d > 0.6)
            throw std::invalid_argument("spectral_scaling_table: deltas must lie in [0.2, 0.6]");
    std::vector<ScalingRow> rows;
    for (double d : deltas) {
        StripGrid grid = StripGrid::with_spacing(d, policy.Lx, policy.Nx, policy.hy_target);
        EllipticOperator L = build(grid, gs, tau);
        Field2D U2 = make_U2(gs, tau, grid);
        Field2D LU2 = L.apply(U2);
        double n2 = dot(U2, U2);
        EigenPair ep = eigenpair(L, U2, 1e-10);
        rows.push_back({d, ep.l, dot(U2, LU2) / n2, norm(LU2)});
    }
    return rows;
}

} // namespace vspike
