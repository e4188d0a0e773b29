#ifndef VSPIKE_GROUND_STATE_HPP
#define VSPIKE_GROUND_STATE_HPP

#include <array>
#include <string>
#include <vector>

#include "vspike/nonlinearity.hpp"

namespace vspike {

// Radial profile of the planar ground state Delta U = gamma(U), tabulated on a
// uniform r-grid up to R_match and continued by the decaying far-field solution
// c_tail*K0(r) beyond.  Immutable once built; sampling is reentrant.
struct GroundState {
    NonlinearitySpec spec;
    std::vector<double> r_nodes;    // uniform, r in [0, R_max]
    std::vector<double> U_values;
    std::vector<double> U_r_values;
    std::vector<double> U_rr_values;
    double center_value = 0.0;      // a = U(0)
    double lambda = 0.0;            // windowed mean of r^{1/2} e^r U over the fit window
    double c_tail = 0.0;            // amplitude of the K0 continuation, lambda ~ c_tail*sqrt(pi/2)
    double R_match = 12.0;
    double R_max = 25.0;

    // PCHIP slope tables for the three profiles (same nodes).
    std::vector<double> dU_slopes, dUr_slopes, dUrr_slopes;

    double value(double r) const;     // U(r)
    double deriv(double r) const;     // U_r(r)
    double second(double r) const;    // U_rr(r)
};

enum class SampleWhat { U, d2U, d22U, gamma_prime_U };

struct ShootReport {
    double bracket_lo = 0.0, bracket_hi = 0.0;
    int bisections = 0;
    int polish_steps = 0;
    double wronskian = 0.0;          // matching defect at R_match after polish
    std::vector<std::array<double, 2>> scan;  // (a, +1 high / -1 low)
};

// Bisection shooting for the positive decaying radial solution, followed by a
// secant polish of U(0) on the far-field matching condition at R_match.
// Throws std::runtime_error on bracket-not-found or integrator step underflow.
GroundState shoot(const NonlinearitySpec& spec, double tol, ShootReport* report = nullptr);

// lambda = mean of r^{1/2} e^r U(r) over [fit_lo, fit_hi].  Also enforces that
// the window is flat (relative spread <= 5%) and that the derivative-based
// estimate, corrected by the (1 + 1/(2r)) factor of the differentiated
// asymptote, agrees within 2%.
double decay_constant(const GroundState& gs, double fit_lo = 12.0, double fit_hi = 20.0);

// Evaluate U or its vertical derivatives at 2-D points with center (0, shift).
std::vector<double> sample(const GroundState& gs,
                           const std::vector<std::array<double, 2>>& points,
                           double shift, SampleWhat what);

// Single-point flavor (hot path for grid sampling).
double sample_at(const GroundState& gs, double x1, double x2, double shift, SampleWhat what);

struct NondegeneracyAudit {
    // Two smallest-magnitude eigenvalues of -Delta + gamma'(U) restricted to
    // the even-in-x1 subspace of a Dirichlet disk, with their angular modes.
    double eig_small = 0.0;     // near-zero (vertical translation) eigenvalue
    double eig_next = 0.0;      // next smallest magnitude, bounded away from zero
    int mode_small = 1;         // angular index of eig_small
    int mode_next = 0;
    std::vector<double> r_cells;       // cell-centered radial grid
    std::vector<double> efun_small;    // radial part of the near-zero eigenfunction
    double corr_with_dU = 0.0;         // |<efun, U_r>| / (|efun| |U_r|), r dr weight
};

NondegeneracyAudit nondegeneracy_audit(const GroundState& gs, double disk_radius,
                                       double grid_step);

// Profile export: CSV columns r,U,U_r,U_rr and a JSON header {p,a,lambda,R_match}.
std::string profile_csv(const GroundState& gs);
std::string profile_json_header(const GroundState& gs);

} // namespace vspike

#endif
