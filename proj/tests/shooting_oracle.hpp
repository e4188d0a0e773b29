#ifndef VSPIKE_TESTS_SHOOTING_ORACLE_HPP
#define VSPIKE_TESTS_SHOOTING_ORACLE_HPP

// Test-only reference solver for the radial profile: classical fixed-step RK4
// plus bisection on the center value.  Kept independent of the library path it
// checks (its own integrator, its own classification walk).

#include <cmath>
#include <stdexcept>
#include <vector>

namespace oracle {

struct Result {
    double a = 0.0;
    std::vector<double> r, U, V;
};

inline double gam(int p, double t) { return t - std::pow(std::abs(t), p) * t; }

enum class Fate { cross, turn };

inline Fate classify_rk4(int p, double a, double h, double r_max) {
    double r = 1e-3;
    double U = a + gam(p, a) * r * r / 4.0;
    double V = gam(p, a) * r / 2.0;
    if (V >= 0.0) return Fate::turn;
    auto f = [&](double rr, double u, double v, double& du, double& dv) {
        du = v;
        dv = -v / rr + gam(p, u);
    };
    while (r < r_max) {
        double k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;
        f(r, U, V, k1u, k1v);
        f(r + h / 2, U + h / 2 * k1u, V + h / 2 * k1v, k2u, k2v);
        f(r + h / 2, U + h / 2 * k2u, V + h / 2 * k2v, k3u, k3v);
        f(r + h, U + h * k3u, V + h * k3v, k4u, k4v);
        U += h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
        V += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
        r += h;
        if (U <= 0.0) return Fate::cross;
        if (V >= 0.0 || U > 2.0 * a) return Fate::turn;
    }
    return Fate::turn;
}

inline double bisect_center(int p, double h, double r_max = 25.0) {
    double lo = 0.0, hi = 0.0;
    bool found = false;
    double a_prev = 0.0;
    Fate f_prev = Fate::cross;
    bool have = false;
    for (double a = 1.0; a <= 8.0; a += 0.5) {
        Fate f = classify_rk4(p, a, h, r_max);
        if (have && f_prev == Fate::turn && f == Fate::cross) {
            lo = a_prev;
            hi = a;
            found = true;
            break;
        }
        a_prev = a;
        f_prev = f;
        have = true;
    }
    if (!found) throw std::runtime_error("oracle: no bracket");
    while (hi - lo > 1e-12 * hi) {
        double mid = 0.5 * (lo + hi);
        if (classify_rk4(p, mid, h, r_max) == Fate::cross)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

inline Result profile(int p, double a, double h, double r_max) {
    Result res;
    res.a = a;
    double r = 1e-3;
    double U = a + gam(p, a) * r * r / 4.0;
    double V = gam(p, a) * r / 2.0;
    auto f = [&](double rr, double u, double v, double& du, double& dv) {
        du = v;
        dv = -v / rr + gam(p, u);
    };
    res.r.push_back(r);
    res.U.push_back(U);
    res.V.push_back(V);
    while (r < r_max) {
        double k1u, k1v, k2u, k2v, k3u, k3v, k4u, k4v;
        f(r, U, V, k1u, k1v);
        f(r + h / 2, U + h / 2 * k1u, V + h / 2 * k1v, k2u, k2v);
        f(r + h / 2, U + h / 2 * k2u, V + h / 2 * k2v, k3u, k3v);
        f(r + h, U + h * k3u, V + h * k3v, k4u, k4v);
        U += h / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
        V += h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
        r += h;
        res.r.push_back(r);
        res.U.push_back(U);
        res.V.push_back(V);
    }
    return res;
}

// 2 pi int U^2 r dr by trapezoid on the fixed-step nodes.
inline double mass(const Result& res, double r_cut) {
    double s = 0.0;
    for (size_t i = 1; i < res.r.size() && res.r[i] <= r_cut; ++i) {
        double f0 = res.U[i - 1] * res.U[i - 1] * res.r[i - 1];
        double f1 = res.U[i] * res.U[i] * res.r[i];
        s += 0.5 * (f0 + f1) * (res.r[i] - res.r[i - 1]);
    }
    return 2.0 * 3.14159265358979323846 * s;
}

} // namespace oracle

#endif
