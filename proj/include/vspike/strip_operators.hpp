#ifndef VSPIKE_STRIP_OPERATORS_HPP
#define VSPIKE_STRIP_OPERATORS_HPP

#include <array>
#include <complex>
#include <vector>

#include "vspike/grid.hpp"

namespace vspike {

// Fourier wavenumbers of the line the field lives on (pi*k/half_length).
std::vector<double> line_wavenumbers(const SurfaceField& f);

// Screened-harmonic interpolant of two wall traces: (1 - Delta) f_bc = 0 in the
// strip, f_bc = f_pm on the walls.  Multipliers are evaluated in
// exponential-difference form, so arbitrarily large <xi>/delta stays finite.
Field2D apply_bc(const SurfaceField& f_plus, const SurfaceField& f_minus);

// Wall-normal derivative of the interpolant on the top (or bottom) wall,
// evaluated from the closed form of the multiplier.
SurfaceField bc_normal_derivative(const SurfaceField& f_plus, const SurfaceField& f_minus,
                                  bool top);

// Harmonic extension into the reference strip {|y| < 1} with zero trace on
// y = -1: values at the given heights for every x1 node.  Input is a
// physical-scale even line.
std::vector<std::vector<double>> harmonic_extension(const SurfaceField& gamma_s,
                                                    const std::vector<double>& heights);

// Dirichlet-to-Neumann map on the reference strip: |xi| coth(2|xi|), 1/2 at 0.
SurfaceField dn_map(const SurfaceField& gamma_s);

// Harmonic conjugate of the extension (odd in x1, zero mean).
std::vector<std::vector<double>> harmonic_conjugate(const SurfaceField& gamma_s,
                                                    const std::vector<double>& heights);

// (g - alpha^2 D^2)^{-1} on the line.
SurfaceField helmholtz_inverse_surface(const SurfaceField& f, double g, double alpha);

// The same operator as real-space quadrature against the decaying exponential
// kernel (periodized); trapezoid with endpoint corrections for the kernel kink.
SurfaceField exp_kernel_convolve(const SurfaceField& f, double g, double alpha);

// Conformal strip map determined by its surface trace: the harmonic extension
// of the trace, its conjugate, and every derived line/row quantity the
// nonlinear layer consumes.  Rows are sampled at (delta*x1_j, delta*x2_i).
struct ConformalPack {
    const StripGrid* grid = nullptr;
    SurfaceField gamma_s;                  // physical scale, even
    std::vector<std::complex<double>> gs_hat;
    std::vector<double> xi;                // physical-line wavenumbers

    Field2D gamma1, gamma2;                // map components on the rows
    Field2D g2x2, g2x1;                    // d(Gamma2)/dx2, d(Gamma2)/dx1 rows
    Field2D jac_sq;                        // |1 + Gamma'|^2 rows (+ wall traces)

    SurfaceField mG, Gp, Gpp, mGp, Bline;  // top-line data
    SurfaceField g2x2_bot;                 // d(Gamma2)/dx2 on the bottom line
    SurfaceField g1_top;                   // Gamma1 on the top line

    double amplitude = 0.0;                // max(|mG|, |Gp|)
};

ConformalPack build_conformal_pack(const SurfaceField& gamma_s_phys);

// Mode-sum evaluation of (Gamma1, Gamma2) at an arbitrary reference point;
// spectrally accurate, used by the pointwise map inversion.
std::array<double, 2> eval_conformal(const ConformalPack& pack, double X1, double y);

} // namespace vspike

#endif
