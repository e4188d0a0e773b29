#ifndef VSPIKE_GRID_HPP
#define VSPIKE_GRID_HPP

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace vspike {

// Truncated, periodized strip |x2| < 1/delta.  x1 runs over [-Lx, Lx) with Nx
// periodic nodes; x2 holds Ny interior nodes, the two walls are trace lines.
struct StripGrid {
    double delta = 0.35;
    double Lx = 16.0;
    int Nx = 512;
    int Ny = 192;
    double hx = 0.0, hy = 0.0;
    std::vector<double> x1, x2;

    StripGrid() = default;
    StripGrid(double delta_, double Lx_, int Nx_, int Ny_);

    // Ny chosen so the x2 spacing lands close to hy_target.
    static StripGrid with_spacing(double delta, double Lx, int Nx, double hy_target);

    double wall() const { return 1.0 / delta; }
    std::size_t size() const { return static_cast<std::size_t>(Nx) * Ny; }
    int mirror(int j) const { return j == 0 ? 0 : Nx - j; }
};

enum class LineScale { rescaled, physical };

// 1-D field on the Nx-node horizontal line.  In rescaled scale the nodes are
// the grid's x1; in physical scale they are delta*x1.
struct SurfaceField {
    const StripGrid* grid = nullptr;
    LineScale scale = LineScale::rescaled;
    std::vector<double> v;

    SurfaceField() = default;
    SurfaceField(const StripGrid& g, LineScale s) : grid(&g), scale(s), v(g.Nx, 0.0) {}

    double spacing() const {
        return scale == LineScale::physical ? grid->delta * grid->hx : grid->hx;
    }
    double node(int j) const {
        double x = grid->x1[j];
        return scale == LineScale::physical ? grid->delta * x : x;
    }
};

// Scalar field on the interior nodes, data row-major: v[iy*Nx + jx].  Boundary
// rows live in the trace members; Dirichlet fields keep them at zero.
struct Field2D {
    const StripGrid* grid = nullptr;
    std::vector<double> v;
    std::vector<double> trace_top, trace_bottom;

    Field2D() = default;
    explicit Field2D(const StripGrid& g)
        : grid(&g), v(g.size(), 0.0), trace_top(g.Nx, 0.0), trace_bottom(g.Nx, 0.0) {}

    double& at(int iy, int jx) { return v[static_cast<std::size_t>(iy) * grid->Nx + jx]; }
    double at(int iy, int jx) const { return v[static_cast<std::size_t>(iy) * grid->Nx + jx]; }
    double* row(int iy) { return v.data() + static_cast<std::size_t>(iy) * grid->Nx; }
    const double* row(int iy) const { return v.data() + static_cast<std::size_t>(iy) * grid->Nx; }
};

// Discrete L2 pairing over the interior nodes (trapezoid; periodic in x1,
// homogeneous walls in x2).
double dot(const Field2D& a, const Field2D& b);
double norm(const Field2D& a);
double dot(const SurfaceField& a, const SurfaceField& b);
double norm(const SurfaceField& a);
double max_abs(const Field2D& a);
double max_abs(const SurfaceField& a);

// In-place linear algebra helpers (same grid assumed).
void axpy(double alpha, const Field2D& x, Field2D& y);
void scale(Field2D& x, double alpha);

void project_even(SurfaceField& f);
void project_even(Field2D& f);
void project_odd(SurfaceField& f);

// Largest odd (or even) component relative to the field norm; parity checks.
double odd_fraction(const SurfaceField& f);
double odd_fraction(const Field2D& f);

} // namespace vspike

#endif
