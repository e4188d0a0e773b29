#include "vspike/grid.hpp"

#include <cmath>

namespace vspike {

StripGrid::StripGrid(double delta_, double Lx_, int Nx_, int Ny_)
    : delta(delta_), Lx(Lx_), Nx(Nx_), Ny(Ny_) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("StripGrid: delta must be in (0,1)");
    if (Nx < 8 || Nx % 2 != 0) throw std::invalid_argument("StripGrid: Nx must be even and >= 8");
    if (Ny < 4) throw std::invalid_argument("StripGrid: Ny too small");
    hx = 2.0 * Lx / Nx;
    hy = (2.0 / delta) / (Ny + 1);
    if (hx > 0.25 + 1e-12) throw std::invalid_argument("StripGrid: hx exceeds 0.25");
    if (hy > 0.25 + 1e-12) throw std::invalid_argument("StripGrid: hy exceeds 0.25");
    if (Lx < 1.0 / delta + 10.0 - 1e-12)
        throw std::invalid_argument("StripGrid: Lx must be at least 1/delta + 10");
    x1.resize(Nx);
    for (int j = 0; j < Nx; ++j) x1[j] = -Lx + hx * j;
    x2.resize(Ny);
    for (int i = 0; i < Ny; ++i) x2[i] = -1.0 / delta + hy * (i + 1);
}

StripGrid StripGrid::with_spacing(double delta, double Lx, int Nx, double hy_target) {
    int Ny = static_cast<int>(std::lround((2.0 / delta) / hy_target)) - 1;
    return StripGrid(delta, Lx, Nx, Ny);
}

double dot(const Field2D& a, const Field2D& b) {
    double s = 0.0;
    const std::size_t n = a.v.size();
    for (std::size_t i = 0; i < n; ++i) s += a.v[i] * b.v[i];
    return a.grid->hx * a.grid->hy * s;
}

double norm(const Field2D& a) { return std::sqrt(dot(a, a)); }

double dot(const SurfaceField& a, const SurfaceField& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.v.size(); ++i) s += a.v[i] * b.v[i];
    return a.spacing() * s;
}

double norm(const SurfaceField& a) { return std::sqrt(dot(a, a)); }

double max_abs(const Field2D& a) {
    double m = 0.0;
    for (double x : a.v) m = std::max(m, std::abs(x));
    return m;
}

double max_abs(const SurfaceField& a) {
    double m = 0.0;
    for (double x : a.v) m = std::max(m, std::abs(x));
    return m;
}

void axpy(double alpha, const Field2D& x, Field2D& y) {
    for (std::size_t i = 0; i < y.v.size(); ++i) y.v[i] += alpha * x.v[i];
}

void scale(Field2D& x, double alpha) {
    for (double& t : x.v) t *= alpha;
}

void project_even(SurfaceField& f) {
    const int N = f.grid->Nx;
    for (int j = 1; j <= N / 2; ++j) {
        int k = N - j;
        double avg = 0.5 * (f.v[j] + f.v[k]);
        f.v[j] = avg;
        f.v[k] = avg;
    }
}

void project_even(Field2D& f) {
    const int N = f.grid->Nx;
    for (int iy = 0; iy < f.grid->Ny; ++iy) {
        double* r = f.row(iy);
        for (int j = 1; j <= N / 2; ++j) {
            int k = N - j;
            double avg = 0.5 * (r[j] + r[k]);
            r[j] = avg;
            r[k] = avg;
        }
    }
}

void project_odd(SurfaceField& f) {
    const int N = f.grid->Nx;
    f.v[0] = 0.0;
    f.v[N / 2] = 0.0;
    for (int j = 1; j < N / 2; ++j) {
        int k = N - j;
        double half = 0.5 * (f.v[j] - f.v[k]);
        f.v[j] = half;
        f.v[k] = -half;
    }
}

double odd_fraction(const SurfaceField& f) {
    const int N = f.grid->Nx;
    double odd = 0.0, tot = 0.0;
    for (int j = 0; j < N; ++j) {
        int k = f.grid->mirror(j);
        double o = 0.5 * (f.v[j] - f.v[k]);
        odd += o * o;
        tot += f.v[j] * f.v[j];
    }
    return tot > 0 ? std::sqrt(odd / tot) : 0.0;
}

double odd_fraction(const Field2D& f) {
    const int N = f.grid->Nx;
    double odd = 0.0, tot = 0.0;
    for (int iy = 0; iy < f.grid->Ny; ++iy) {
        const double* r = f.row(iy);
        for (int j = 0; j < N; ++j) {
            int k = f.grid->mirror(j);
            double o = 0.5 * (r[j] - r[k]);
            odd += o * o;
            tot += r[j] * r[j];
        }
    }
    return tot > 0 ? std::sqrt(odd / tot) : 0.0;
}

} // namespace vspike
