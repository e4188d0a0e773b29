#ifndef VSPIKE_ELLIPTIC_HPP
#define VSPIKE_ELLIPTIC_HPP

#include <functional>
#include <string>
#include <vector>

#include "vspike/grid.hpp"
#include "vspike/ground_state.hpp"

namespace vspike {

// Linearization -Delta + gamma'(U(tau)) on the strip, Dirichlet walls, even
// cosine modes in x1 and a symmetric second-order stencil in x2.
struct EllipticOperator {
    const StripGrid* grid = nullptr;
    double tau = 0.0;
    Field2D potential;  // gamma'(U) at the interior nodes

    Field2D apply(const Field2D& u) const;
    // exact per-mode tridiagonal inverse of the constant-coefficient part 1-Delta
    Field2D precondition(const Field2D& f) const;
};

EllipticOperator build(const StripGrid& grid, const GroundState& gs, double tau);

struct SolveInfo {
    int iterations = 0;
    double rel_residual = 0.0;
    bool converged = false;
    std::vector<double> history;  // preconditioned residual estimates
};

class SolveError : public std::runtime_error {
public:
    SolveError(const std::string& msg, SolveInfo info)
        : std::runtime_error(msg), info(std::move(info)) {}
    SolveInfo info;
};

// Preconditioned MINRES on a symmetric (possibly indefinite) operator.
Field2D minres(const std::function<Field2D(const Field2D&)>& apply_op,
               const std::function<Field2D(const Field2D&)>& prec, const Field2D& b,
               double tol, int maxit, SolveInfo* info);

// Relative-residual solve; throws SolveError when the iteration budget runs out
// (expected when the right side leans on the near-degenerate direction).
Field2D solve(const EllipticOperator& L, const Field2D& f, double tol, int maxit = 2000,
              SolveInfo* info = nullptr);

// Deflated solve on the orthogonal complement of dir: returns u with u | dir
// and (I-P)(Lu - f) small.
Field2D solve_projected(const EllipticOperator& L, const Field2D& f, const Field2D& dir,
                        double tol, int maxit = 2000, SolveInfo* info = nullptr);

// U2 = d_{x2}U(tau) - (d_{x2}U(tau))_bc, the approximate near-degenerate direction.
Field2D make_U2(const GroundState& gs, double tau, const StripGrid& grid);

struct EigenPair {
    double l = 0.0;       // near-degenerate eigenvalue
    Field2D U0;           // unit eigenfunction, <U0,U2> > 0
    double a0 = 0.0;      // U0 = a0 (U2 + w)
    Field2D w;            // correction orthogonal to U2
    double residual = 0.0;
    int iterations = 0;
};

// Rayleigh-quotient iteration seeded at U2.  The shift keeps the iteration on
// the wall-induced branch: for wide strips the operator owns an interior mode
// whose eigenvalue dips below l, so targeting smallest magnitude would stray.
EigenPair eigenpair(const EllipticOperator& L, const Field2D& seed, double tol,
                    int max_iter = 50);

// Fixed-point construction of the same eigenpair via the deflated map
// w -> solve_{U2-perp}(ell(w) w - (I-P2) L U2); verification twin of eigenpair.
EigenPair eigen_contraction(const EllipticOperator& L, const Field2D& U2, double tol = 1e-12,
                            int max_iter = 60);

struct ScalingRow {
    double delta;
    double l;
    double rayleigh_U2;  // <U2, L U2> / |U2|^2
    double norm_LU2;
};

struct GridPolicy {
    double Lx = 16.0;
    int Nx = 512;
    double hy_target = 0.012;
};

std::vector<ScalingRow> spectral_scaling_table(const GroundState& gs,
                                               const std::vector<double>& deltas, double tau,
                                               const GridPolicy& policy = {});

} // namespace vspike

#endif
