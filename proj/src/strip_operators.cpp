#include "vspike/strip_operators.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vspike/fft.hpp"

namespace vspike {

namespace {

using cd = std::complex<double>;

// sinh(u)/sinh(b) for 0 <= u <= b, safe for huge b.
double sinh_ratio(double u, double b) {
    return std::exp(u - b) * (1.0 - std::exp(-2.0 * u)) / (1.0 - std::exp(-2.0 * b));
}

// cosh(u)/sinh(b) for 0 <= u <= b.
double cosh_ratio(double u, double b) {
    return std::exp(u - b) * (1.0 + std::exp(-2.0 * u)) / (1.0 - std::exp(-2.0 * b));
}

std::vector<cd> fwd(const SurfaceField& f) {
    Rfft fft(f.grid->Nx);
    std::vector<cd> out(fft.nmodes());
    fft.forward(f.v.data(), out.data());
    return out;
}

SurfaceField bwd(std::vector<cd> spec, const StripGrid& g, LineScale scale) {
    Rfft fft(g.Nx);
    SurfaceField f(g, scale);
    fft.inverse(spec.data(), f.v.data());
    return f;
}

} // namespace

std::vector<double> line_wavenumbers(const SurfaceField& f) {
    const StripGrid& g = *f.grid;
    double half = (f.scale == LineScale::physical) ? g.delta * g.Lx : g.Lx;
    std::vector<double> xi(g.Nx / 2 + 1);
    for (int k = 0; k < g.Nx / 2 + 1; ++k) xi[k] = std::numbers::pi * k / half;
    return xi;
}

Field2D apply_bc(const SurfaceField& f_plus, const SurfaceField& f_minus) {
    const StripGrid& g = *f_plus.grid;
    if (f_plus.scale != LineScale::rescaled || f_minus.scale != LineScale::rescaled)
        throw std::invalid_argument("apply_bc: traces must be on the rescaled line");
    auto xi = line_wavenumbers(f_plus);
    auto Fp = fwd(f_plus);
    auto Fm = fwd(f_minus);
    Rfft fft(g.Nx);

    Field2D out(g);
    std::vector<cd> spec(fft.nmodes());
    const double wall = g.wall();
    for (int i = 0; i < g.Ny; ++i) {
        double y = g.x2[i];
        for (int k = 0; k < fft.nmodes(); ++k) {
            double jb = std::sqrt(1.0 + xi[k] * xi[k]);
            double b = 2.0 * jb * wall;
            spec[k] = sinh_ratio(jb * (y + wall), b) * Fp[k] + sinh_ratio(jb * (wall - y), b) * Fm[k];
        }
        fft.inverse(spec.data(), out.row(i));
    }
    out.trace_top = f_plus.v;
    out.trace_bottom = f_minus.v;
    return out;
}

SurfaceField bc_normal_derivative(const SurfaceField& f_plus, const SurfaceField& f_minus,
                                  bool top) {
    const StripGrid& g = *f_plus.grid;
    auto xi = line_wavenumbers(f_plus);
    auto Fp = fwd(f_plus);
    auto Fm = fwd(f_minus);
    std::vector<cd> spec(Fp.size());
    const double wall = g.wall();
    for (size_t k = 0; k < spec.size(); ++k) {
        double jb = std::sqrt(1.0 + xi[k] * xi[k]);
        double b = 2.0 * jb * wall;
        double e = std::exp(-b);
        double coth = (1.0 + e * e) / (1.0 - e * e);
        double csch = 2.0 * e / (1.0 - e * e);
        spec[k] = top ? jb * (coth * Fp[k] - csch * Fm[k])
                      : jb * (csch * Fp[k] - coth * Fm[k]);
    }
    return bwd(std::move(spec), g, LineScale::rescaled);
}

std::vector<std::vector<double>> harmonic_extension(const SurfaceField& gamma_s,
                                                    const std::vector<double>& heights) {
    const StripGrid& g = *gamma_s.grid;
    if (gamma_s.scale != LineScale::physical)
        throw std::invalid_argument("harmonic_extension: input must be on the physical line");
    auto xi = line_wavenumbers(gamma_s);
    auto gh = fwd(gamma_s);
    Rfft fft(g.Nx);
    std::vector<std::vector<double>> out(heights.size(), std::vector<double>(g.Nx));
    std::vector<cd> spec(fft.nmodes());
    for (size_t r = 0; r < heights.size(); ++r) {
        double y = heights[r];
        for (int k = 0; k < fft.nmodes(); ++k) {
            double mult = (k == 0) ? 0.5 * (y + 1.0) : sinh_ratio(xi[k] * (y + 1.0), 2.0 * xi[k]);
            spec[k] = mult * gh[k];
        }
        fft.inverse(spec.data(), out[r].data());
    }
    return out;
}

SurfaceField dn_map(const SurfaceField& gamma_s) {
    const StripGrid& g = *gamma_s.grid;
    auto xi = line_wavenumbers(gamma_s);
    auto gh = fwd(gamma_s);
    for (size_t k = 0; k < gh.size(); ++k) {
        if (k == 0) {
            gh[k] *= 0.5;
        } else {
            double e = std::exp(-4.0 * xi[k]);
            gh[k] *= xi[k] * (1.0 + e) / (1.0 - e);
        }
    }
    auto out = bwd(std::move(gh), g, gamma_s.scale);
    project_even(out);
    return out;
}

std::vector<std::vector<double>> harmonic_conjugate(const SurfaceField& gamma_s,
                                                    const std::vector<double>& heights) {
    const StripGrid& g = *gamma_s.grid;
    if (gamma_s.scale != LineScale::physical)
        throw std::invalid_argument("harmonic_conjugate: input must be on the physical line");
    auto xi = line_wavenumbers(gamma_s);
    auto gh = fwd(gamma_s);
    Rfft fft(g.Nx);
    std::vector<std::vector<double>> out(heights.size(), std::vector<double>(g.Nx));
    std::vector<cd> spec(fft.nmodes());
    for (size_t r = 0; r < heights.size(); ++r) {
        double y = heights[r];
        spec[0] = 0.0;
        for (int k = 1; k < fft.nmodes(); ++k)
            spec[k] = cd(0.0, -1.0) * cosh_ratio(xi[k] * (y + 1.0), 2.0 * xi[k]) * gh[k];
        fft.inverse(spec.data(), out[r].data());
    }
    return out;
}

SurfaceField helmholtz_inverse_surface(const SurfaceField& f, double g, double alpha) {
    if (!(g > 0.0) || !(alpha > 0.0))
        throw std::invalid_argument("helmholtz_inverse_surface: g, alpha must be positive");
    auto xi = line_wavenumbers(f);
    auto fh = fwd(f);
    for (size_t k = 0; k < fh.size(); ++k) fh[k] /= (g + alpha * alpha * xi[k] * xi[k]);
    auto out = bwd(std::move(fh), *f.grid, f.scale);
    project_even(out);
    return out;
}

SurfaceField exp_kernel_convolve(const SurfaceField& f, double g, double alpha) {
    if (!(g > 0.0) || !(alpha > 0.0))
        throw std::invalid_argument("exp_kernel_convolve: g, alpha must be positive");
    const StripGrid& grid = *f.grid;
    const int N = grid.Nx;
    const double h = f.spacing();
    const double half = 0.5 * N * h;  // half period of the line
    const double kappa = std::sqrt(g) / alpha;
    const double norm = 1.0 / (2.0 * alpha * std::sqrt(g));

    // periodized kernel K(s) = cosh(kappa(half-|s|)) / (2 a sqrt(g) sinh(kappa half))
    std::vector<double> K(N);
    const double den = 1.0 - std::exp(-2.0 * kappa * half);
    for (int j = 0; j < N; ++j) {
        double s = std::abs(j * h);
        s = std::min(s, 2.0 * half - s);
        K[j] = norm * std::exp(-kappa * s) * (1.0 + std::exp(-2.0 * kappa * (half - s))) / den;
    }

    SurfaceField out(grid, f.scale);
    for (int i = 0; i < N; ++i) {
        double acc = 0.0;
        for (int j = 0; j < N; ++j) {
            int d = i - j;
            if (d < 0) d += N;
            acc += K[d] * f.v[j];
        }
        // Euler-Maclaurin corrections for the kernel kink at zero separation
        double fdd = (f.v[(i + 1) % N] - 2.0 * f.v[i] + f.v[(i + N - 1) % N]) / (h * h);
        double a2 = alpha * alpha;
        out.v[i] = h * acc - (h * h / 12.0) * f.v[i] / a2 +
                   (h * h * h * h / 720.0) * (g / (a2 * a2) * f.v[i] + 3.0 / a2 * fdd);
    }
    return out;
}

ConformalPack build_conformal_pack(const SurfaceField& gamma_s_phys) {
    const StripGrid& g = *gamma_s_phys.grid;
    if (gamma_s_phys.scale != LineScale::physical)
        throw std::invalid_argument("build_conformal_pack: trace must be physical scale");

    ConformalPack p;
    p.grid = &g;
    p.gamma_s = gamma_s_phys;
    p.xi = line_wavenumbers(gamma_s_phys);
    p.gs_hat = fwd(gamma_s_phys);

    Rfft fft(g.Nx);
    const int nm = fft.nmodes();
    p.gamma1 = Field2D(g);
    p.gamma2 = Field2D(g);
    p.g2x2 = Field2D(g);
    p.g2x1 = Field2D(g);
    p.jac_sq = Field2D(g);

    std::vector<cd> s1(nm), s2(nm), sx2(nm), sx1(nm);
    for (int i = 0; i < g.Ny; ++i) {
        double y = g.delta * g.x2[i];
        for (int k = 0; k < nm; ++k) {
            double xk = p.xi[k];
            double sinr, cosr;
            if (k == 0) {
                sinr = 0.5 * (y + 1.0);
                cosr = 0.5;  // d/dy of the zero-mode extension
            } else {
                sinr = sinh_ratio(xk * (y + 1.0), 2.0 * xk);
                cosr = xk * cosh_ratio(xk * (y + 1.0), 2.0 * xk);
            }
            s2[k] = sinr * p.gs_hat[k];
            s1[k] = (k == 0) ? cd(0.0) : cd(0.0, -1.0) * cosh_ratio(xk * (y + 1.0), 2.0 * xk) * p.gs_hat[k];
            sx2[k] = cosr * p.gs_hat[k];
            sx1[k] = cd(0.0, 1.0) * xk * sinr * p.gs_hat[k];
        }
        fft.inverse(s2.data(), p.gamma2.row(i));
        fft.inverse(s1.data(), p.gamma1.row(i));
        fft.inverse(sx2.data(), p.g2x2.row(i));
        fft.inverse(sx1.data(), p.g2x1.row(i));
        for (int j = 0; j < g.Nx; ++j) {
            double a = 1.0 + p.g2x2.at(i, j);
            double b = p.g2x1.at(i, j);
            p.jac_sq.at(i, j) = a * a + b * b;
        }
    }

    // top line
    p.mG = dn_map(gamma_s_phys);
    std::vector<cd> tmp(nm);
    for (int k = 0; k < nm; ++k) tmp[k] = cd(0.0, 1.0) * p.xi[k] * p.gs_hat[k];
    p.Gp = bwd(tmp, g, LineScale::physical);
    project_odd(p.Gp);
    for (int k = 0; k < nm; ++k) tmp[k] = -p.xi[k] * p.xi[k] * p.gs_hat[k];
    p.Gpp = bwd(tmp, g, LineScale::physical);
    project_even(p.Gpp);
    p.mGp = dn_map(p.Gp);
    project_odd(p.mGp);
    p.Bline = SurfaceField(g, LineScale::physical);
    for (int j = 0; j < g.Nx; ++j) {
        double a = 1.0 + p.mG.v[j];
        p.Bline.v[j] = a * a + p.Gp.v[j] * p.Gp.v[j];
    }

    // bottom line: Gamma2(:, -1) = 0, so only the vertical derivative survives
    for (int k = 0; k < nm; ++k) {
        double mult = (k == 0) ? 0.5 : p.xi[k] * cosh_ratio(0.0, 2.0 * p.xi[k]);
        tmp[k] = mult * p.gs_hat[k];
    }
    p.g2x2_bot = bwd(tmp, g, LineScale::physical);
    project_even(p.g2x2_bot);

    // Gamma1 on the top line
    for (int k = 0; k < nm; ++k)
        tmp[k] = (k == 0) ? cd(0.0)
                          : cd(0.0, -1.0) * cosh_ratio(2.0 * p.xi[k], 2.0 * p.xi[k]) * p.gs_hat[k];
    p.g1_top = bwd(tmp, g, LineScale::physical);
    project_odd(p.g1_top);

    // wall traces of |1+Gamma'|^2
    for (int j = 0; j < g.Nx; ++j) {
        double a = 1.0 + p.mG.v[j];
        p.jac_sq.trace_top[j] = a * a + p.Gp.v[j] * p.Gp.v[j];
        double ab = 1.0 + p.g2x2_bot.v[j];
        p.jac_sq.trace_bottom[j] = ab * ab;
    }

    p.amplitude = std::max(max_abs(p.mG), max_abs(p.Gp));
    return p;
}

std::array<double, 2> eval_conformal(const ConformalPack& p, double X1, double y) {
    const int nm = static_cast<int>(p.gs_hat.size());
    const int N = p.grid->Nx;
    // nodes are X = -half + j*h; mode k carries exp(i xi_k (X + half))
    const double half = p.grid->delta * p.grid->Lx;
    double g1 = 0.0, g2 = 0.0;
    for (int k = 0; k < nm; ++k) {
        double w = (k == 0 || k == N / 2) ? 1.0 : 2.0;
        double xk = p.xi[k];
        double phase = xk * (X1 + half);
        double cre = p.gs_hat[k].real() / N, cim = p.gs_hat[k].imag() / N;
        double c = std::cos(phase), s = std::sin(phase);
        double sinr = (k == 0) ? 0.5 * (y + 1.0) : sinh_ratio(xk * (y + 1.0), 2.0 * xk);
        double cosr = (k == 0) ? 0.0 : cosh_ratio(xk * (y + 1.0), 2.0 * xk);
        // Re[(cre + i cim)(c + i s)] and the conjugate with the -i factor
        g2 += w * sinr * (cre * c - cim * s);
        g1 += w * cosr * (cre * s + cim * c);
    }
    return {g1, g2};
}

} // namespace vspike
