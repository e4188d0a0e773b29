#ifndef VSPIKE_WAVE_HPP
#define VSPIKE_WAVE_HPP

#include <array>
#include <optional>
#include <vector>

#include "vspike/elliptic.hpp"
#include "vspike/grid.hpp"
#include "vspike/ground_state.hpp"
#include "vspike/strip_operators.hpp"

namespace vspike {

struct PhysicalParams {
    double g = 1.0;      // gravitational acceleration
    double alpha = 1.0;  // surface tension coefficient (alpha^2 multiplies curvature)
};

// tau-dependent ground-state samples cached on a grid.
struct SpikeFields {
    const StripGrid* grid = nullptr;
    NonlinearitySpec spec;
    double tau = 0.0;
    Field2D U, gamma_U, gamma_prime_U;
    Field2D U_bc;
    SurfaceField dUbc_top, dUbc_bot;  // wall-normal derivative of the interpolant
    SurfaceField d2U_top, d2U_bot;    // d_{x2}U on the walls
};

SpikeFields make_spike_fields(const GroundState& gs, double tau, const StripGrid& grid);

// Bulk nonlinearity: |1+Gamma'(delta .)|^2 gamma(v+U-U_bc) - gamma(U) - gamma'(U) v + U_bc.
// A null pack means a flat surface (|1+Gamma'|^2 = 1).
Field2D assemble_F(const SpikeFields& sf, const Field2D& v, const ConformalPack* pack,
                   double sigma_threshold = 0.5);

// Zero-order surface operator of the curvature linearization and its inverse by
// Neumann iteration (A(0) = id, contraction for small traces).
SurfaceField apply_A(const ConformalPack& pack, const SurfaceField& w, const PhysicalParams& prm);
SurfaceField apply_A_inverse(const ConformalPack& pack, const SurfaceField& rhs,
                             const PhysicalParams& prm, double tol = 1e-12, int maxit = 300);

// Wall trace of d_{x2}(v + U - U_bc): fourth-order one-sided differences for the
// interior field, closed forms for the U and U_bc parts.
SurfaceField wall_trace(const SpikeFields& sf, const Field2D& v, bool top);

SurfaceField assemble_G(const SpikeFields& sf, const Field2D& v, const ConformalPack& pack,
                        const PhysicalParams& prm);

struct IterationEntry {
    int iter;
    double norm_v, norm_gamma, rel_update;
};

struct WaveState {
    double tau = 0.0;
    Field2D v;               // orthogonal to U0(tau)
    SurfaceField gamma_s;    // physical scale
    std::vector<IterationEntry> log;
    double residual_u = 0.0;          // |L v + (I-P0)F| at convergence
    double residual_bernoulli = 0.0;  // |(g - a^2 D^2)Gamma_s + G|
};

struct FixedPointOptions {
    double tol = 1e-12;
    int max_iter = 100;
    double solve_tol = 1e-12;
    double rescale_C = 10.0;        // weight C/delta on the surface part
    double sigma_threshold = 0.5;   // small-amplitude gauge on the conformal pack
    bool force_flat_surface = false;  // pure-strip testing hook: keeps Gamma_s = 0
};

WaveState ls_fixed_point(const GroundState& gs, const StripGrid& grid, double tau,
                         const EllipticOperator& L, const EigenPair& eig,
                         const PhysicalParams& prm, const FixedPointOptions& opt = {},
                         const WaveState* warm_start = nullptr);

// Leading-order surface response -2 delta^-2 (g - a^2 D^2)^{-1} (d_{x2}U(./delta,1/delta))^2.
SurfaceField eta0_leading(double delta, double tau, const GroundState& gs,
                          const PhysicalParams& prm, const StripGrid& grid);

// Projection form of the bifurcation value, <U0, F(tau, v, Gamma_s)>.
double bifurcation_b(const SpikeFields& sf, const WaveState& state, const EigenPair& eig,
                     const FixedPointOptions& opt = {});

// Boundary form: weighted difference of the squared wall traces (top minus
// bottom) with the conformal weights; vanishes exactly where b does.
double bifurcation_b_boundary(const SpikeFields& sf, const WaveState& state);

struct TauProbe {
    double tau;
    double b_tilde;
    double b_proj;
    double l;
};

struct TauRootResult {
    double tau_star = 0.0;
    WaveState state;
    EigenPair eig;
    std::vector<TauProbe> probes;
    double bracket_lo = 0.0, bracket_hi = 0.0;
};

struct WaveContext {
    const GroundState* gs = nullptr;
    const StripGrid* grid = nullptr;
    PhysicalParams prm;
    FixedPointOptions opt;
    double eigen_tol = 1e-10;
};

// Bisection on the boundary bifurcation signal; each probe runs the eigenpair
// and fixed point at that tau.  bracket_hint <= 0 selects the default bracket.
TauRootResult find_tau_root(const WaveContext& ctx, double bracket_hint, double tol_tau);

struct WaveSolution {
    double tau = 0.0;
    WaveState state;
    ConformalPack pack;
    Field2D phi;              // v + U - U_bc on the strip grid (psi values)
    Field2D mesh_y1, mesh_y2; // physical positions of the grid nodes
    Field2D omega;            // delta^-2 gamma(phi) at the same nodes
    Field2D psi0;             // three-spike comparison field at the same nodes
    std::vector<double> eta_x;   // uniform physical abscissae
    std::vector<double> eta;     // surface elevation resampled to eta_x
    SurfaceField eta0;           // leading-order profile on the physical line
};

WaveSolution assemble_solution(const WaveContext& ctx, double tau_star, const WaveState& state);

// Pointwise inversion of X -> X + Gamma1(X,1) on the surface line by damped
// fixed point; throws if the near-identity contraction fails.
double invert_surface_abscissa(const ConformalPack& pack, double X_target);

struct Diagnostics {
    double energy = 0.0, energy_kinetic = 0.0, energy_gravity = 0.0, energy_surface = 0.0;
    double kinetic_norm_sq = 0.0;  // |grad Psi|^2_{L2(Omega)}
    double total_vorticity = 0.0, omega_L1 = 0.0, omega_Linf = 0.0;
    double boundary_identity = 0.0;  // integral of |grad Psi|^2 N2 over the boundary
    double pde_residual = 0.0;       // relative collocation residual of the bulk equation
    double bernoulli_residual = 0.0; // relative residual of the surface equation
    double psi0_distance = 0.0, eta0_distance = 0.0;
    double b_tilde = 0.0, b_proj = 0.0;
    double min_eta = 0.0, eta_argmin = 0.0;
    long omega_neg_count = 0, omega_pos_count = 0;
    double omega_center = 0.0, omega_annulus_max = 0.0;
    int closed_streamlines = 0;
};

Diagnostics diagnostics(const WaveSolution& sol, const WaveContext& ctx, const EigenPair& eig);

} // namespace vspike

#endif
