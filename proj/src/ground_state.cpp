#include "vspike/ground_state.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace vspike {

namespace {

constexpr double kTableStep = 0.0025;
constexpr double kSeriesEnd = 1e-3;   // series start radius for the regularized origin

struct RadialState {
    double U, V;  // V = dU/dr
};

// Dormand-Prince 5(4) step for the radial equation U'' = -U'/r + gamma(U).
class RadialIntegrator {
public:
    RadialIntegrator(const NonlinearitySpec& spec, double rtol, double atol)
        : spec_(spec), rtol_(rtol), atol_(atol) {}

    RadialState rhs(double r, RadialState y) const {
        return {y.V, -y.V / r + gamma_eval(spec_, y.U)};
    }

    // Advance from (r, y) to r_end exactly.  step_cb, when set, is called after
    // every accepted step and may stop the integration early (event detection).
    template <typename Cb>
    bool advance(double& r, RadialState& y, double r_end, Cb&& step_cb) {
        double h = std::min(0.05, r_end - r);
        while (r < r_end) {
            h = std::min(h, r_end - r);
            if (h < 1e-14) throw std::runtime_error("shoot: integrator step underflow");
            RadialState ynew;
            double err = step(r, y, h, ynew);
            if (err <= 1.0) {
                r += h;
                y = ynew;
                if (!step_cb(r, y)) return false;
            }
            double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
            h *= std::clamp(fac, 0.2, 5.0);
        }
        return true;
    }

private:
    double step(double r, RadialState y, double h, RadialState& out) const {
        auto add = [](RadialState a, double c, RadialState b) {
            return RadialState{a.U + c * b.U, a.V + c * b.V};
        };
        RadialState k1 = rhs(r, y);
        RadialState k2 = rhs(r + h / 5, add(y, h / 5, k1));
        RadialState y3 = add(add(y, h * 3.0 / 40, k1), h * 9.0 / 40, k2);
        RadialState k3 = rhs(r + 3 * h / 10, y3);
        RadialState y4 = add(add(add(y, h * 44.0 / 45, k1), -h * 56.0 / 15, k2), h * 32.0 / 9, k3);
        RadialState k4 = rhs(r + 4 * h / 5, y4);
        RadialState y5 = add(add(add(add(y, h * 19372.0 / 6561, k1), -h * 25360.0 / 2187, k2),
                                 h * 64448.0 / 6561, k3),
                             -h * 212.0 / 729, k4);
        RadialState k5 = rhs(r + 8 * h / 9, y5);
        RadialState y6 = add(add(add(add(add(y, h * 9017.0 / 3168, k1), -h * 355.0 / 33, k2),
                                     h * 46732.0 / 5247, k3),
                                 h * 49.0 / 176, k4),
                             -h * 5103.0 / 18656, k5);
        RadialState k6 = rhs(r + h, y6);
        out = add(add(add(add(add(y, h * 35.0 / 384, k1), h * 500.0 / 1113, k3),
                          h * 125.0 / 192, k4),
                      -h * 2187.0 / 6784, k5),
                  h * 11.0 / 84, k6);
        RadialState k7 = rhs(r + h, out);
        const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
        double errU = h * (e1 * k1.U + e3 * k3.U + e4 * k4.U + e5 * k5.U + e6 * k6.U + e7 * k7.U);
        double errV = h * (e1 * k1.V + e3 * k3.V + e4 * k4.V + e5 * k5.V + e6 * k6.V + e7 * k7.V);
        double su = atol_ + rtol_ * std::max(std::abs(y.U), std::abs(out.U));
        double sv = atol_ + rtol_ * std::max(std::abs(y.V), std::abs(out.V));
        double eU = errU / su, eV = errV / sv;
        return std::sqrt(0.5 * (eU * eU + eV * eV));
    }

    NonlinearitySpec spec_;
    double rtol_, atol_;
};

RadialState series_start(const NonlinearitySpec& spec, double a, double r) {
    double g = gamma_eval(spec, a);
    double gg = gamma_prime(spec, a) * g;
    return {a + g * r * r / 4 + gg * r * r * r * r / 64,
            g * r / 2 + gg * r * r * r / 16};
}

enum class Fate { low, high };

// Connecting-orbit dichotomy: trajectories either cross zero (U(0) too large)
// or turn around while still positive and drift back toward the u = 1
// equilibrium (U(0) too small).  The turn test V >= 0 fires long before the
// secondary guard U > 2a.
Fate classify(const NonlinearitySpec& spec, double a, double r_max, double rtol) {
    RadialIntegrator integ(spec, rtol, 1e-18);
    double r = kSeriesEnd;
    RadialState y = series_start(spec, a, r);
    if (y.V >= 0.0) return Fate::high;
    Fate fate = Fate::high;
    integ.advance(r, y, r_max, [&](double, const RadialState& s) {
        if (s.U <= 0.0) {
            fate = Fate::low;
            return false;
        }
        if (s.V >= 0.0 || s.U >= 2 * a) {
            fate = Fate::high;
            return false;
        }
        return true;
    });
    return fate;
}

// Endpoint (U, V) at R_match for a given center value.
RadialState endpoint(const NonlinearitySpec& spec, double a, double r_match, double rtol) {
    RadialIntegrator integ(spec, rtol, 1e-18);
    double r = kSeriesEnd;
    RadialState y = series_start(spec, a, r);
    integ.advance(r, y, r_match, [](double, const RadialState&) { return true; });
    return y;
}

double besk0(double x) { return std::cyl_bessel_k(0.0, x); }
double besk1(double x) { return std::cyl_bessel_k(1.0, x); }

// Monotone cubic (pchip) slopes on a uniform grid.
std::vector<double> pchip_slopes(const std::vector<double>& y, double h) {
    const size_t n = y.size();
    std::vector<double> m(n, 0.0);
    if (n < 2) return m;
    std::vector<double> d(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i]) / h;
    auto end_slope = [&](double d0, double d1) {
        double s = (3.0 * d0 - d1) / 2.0;
        if (s * d0 <= 0.0) return 0.0;
        if (d0 * d1 < 0.0 && std::abs(s) > 3.0 * std::abs(d0)) return 3.0 * d0;
        return s;
    };
    m[0] = end_slope(d[0], n > 2 ? d[1] : d[0]);
    m[n - 1] = end_slope(d[n - 2], n > 2 ? d[n - 3] : d[n - 2]);
    for (size_t i = 1; i + 1 < n; ++i) {
        if (d[i - 1] == 0.0 || d[i] == 0.0 || (d[i - 1] > 0) != (d[i] > 0)) {
            m[i] = 0.0;
        } else {
            m[i] = 2.0 * d[i - 1] * d[i] / (d[i - 1] + d[i]);
        }
    }
    return m;
}

double pchip_eval(const std::vector<double>& r, const std::vector<double>& y,
                  const std::vector<double>& m, double h, double x) {
    size_t n = y.size();
    double t = x / h;
    size_t i = std::min(static_cast<size_t>(std::max(t, 0.0)), n - 2);
    double s = (x - r[i]) / h;
    double s2 = s * s, s3 = s2 * s;
    double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
    double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
    return h00 * y[i] + h * h10 * m[i] + h01 * y[i + 1] + h * h11 * m[i + 1];
}

} // namespace

double GroundState::value(double r) const {
    if (r >= R_match) return c_tail * besk0(r);
    return pchip_eval(r_nodes, U_values, dU_slopes, kTableStep, r);
}

double GroundState::deriv(double r) const {
    if (r >= R_match) return -c_tail * besk1(r);
    return pchip_eval(r_nodes, U_r_values, dUr_slopes, kTableStep, r);
}

double GroundState::second(double r) const {
    if (r >= R_match) return c_tail * (besk0(r) + besk1(r) / r);
    return pchip_eval(r_nodes, U_rr_values, dUrr_slopes, kTableStep, r);
}

GroundState shoot(const NonlinearitySpec& spec, double tol, ShootReport* report) {
    if (tol <= 0) throw std::invalid_argument("shoot: tol must be positive");
    const double R_match = 12.0, R_max = 25.0;
    const double rtol = 1e-12;

    // Initial scan for a (high, low) bracket in the center value.
    double lo = 0.0, hi = 0.0;
    std::vector<std::array<double, 2>> scan;
    double a_prev = 0.0;
    Fate f_prev = Fate::low;
    bool have_prev = false, found = false;
    for (double a = 1.0; a <= 8.0 + 1e-12; a += 0.5) {
        Fate f = classify(spec, a, R_max, rtol);
        scan.push_back({a, f == Fate::high ? 1.0 : -1.0});
        if (have_prev && f_prev == Fate::high && f == Fate::low) {
            lo = a_prev;
            hi = a;
            found = true;
            break;
        }
        a_prev = a;
        f_prev = f;
        have_prev = true;
    }
    if (report) report->scan = scan;
    if (!found) {
        std::ostringstream os;
        os << "shoot: bracket not found in initial scan;";
        for (auto& s : scan) os << " a=" << s[0] << (s[1] > 0 ? ":high" : ":low");
        throw std::runtime_error(os.str());
    }

    int bisections = 0;
    while (hi - lo > std::max(tol, 1e-15) * hi) {
        double mid = 0.5 * (lo + hi);
        if (classify(spec, mid, R_max, rtol) == Fate::low)
            hi = mid;
        else
            lo = mid;
        if (++bisections > 200) break;
    }

    // Secant polish on the far-field matching defect W(a) at R_match.  The
    // forward instability of the separatrix makes W extremely sensitive to a,
    // so a few steps pin the center value to machine precision.
    auto wronskian = [&](double a) {
        RadialState e = endpoint(spec, a, R_match, rtol);
        return e.V * besk0(R_match) + e.U * besk1(R_match);
    };
    double a1 = lo, a2 = hi;
    double w1 = wronskian(a1), w2 = wronskian(a2);
    int polish = 0;
    for (; polish < 30; ++polish) {
        if (w2 == w1) break;
        double a3 = a2 - w2 * (a2 - a1) / (w2 - w1);
        if (!std::isfinite(a3) || a3 < lo - (hi - lo) || a3 > hi + (hi - lo)) break;
        a1 = a2;
        w1 = w2;
        a2 = a3;
        w2 = wronskian(a2);
        if (std::abs(a2 - a1) < 1e-16 * a2) break;
    }
    double a_star = a2;

    GroundState gs;
    gs.spec = spec;
    gs.center_value = a_star;
    gs.R_match = R_match;
    gs.R_max = R_max;

    const size_t n = static_cast<size_t>(std::llround(R_max / kTableStep)) + 1;
    const size_t i_match = static_cast<size_t>(std::llround(R_match / kTableStep));
    gs.r_nodes.resize(n);
    gs.U_values.resize(n);
    gs.U_r_values.resize(n);
    gs.U_rr_values.resize(n);
    for (size_t i = 0; i < n; ++i) gs.r_nodes[i] = i * kTableStep;

    gs.U_values[0] = a_star;
    gs.U_r_values[0] = 0.0;
    gs.U_rr_values[0] = gamma_eval(spec, a_star) / 2.0;

    RadialIntegrator integ(spec, rtol, 1e-18);
    double r = kSeriesEnd;
    RadialState y = series_start(spec, a_star, r);
    for (size_t i = 1; i <= i_match; ++i) {
        double r_node = gs.r_nodes[i];
        if (r_node <= kSeriesEnd) {
            RadialState s = series_start(spec, a_star, r_node);
            gs.U_values[i] = s.U;
            gs.U_r_values[i] = s.V;
        } else {
            integ.advance(r, y, r_node, [](double, const RadialState&) { return true; });
            gs.U_values[i] = y.U;
            gs.U_r_values[i] = y.V;
        }
        gs.U_rr_values[i] = gamma_eval(spec, gs.U_values[i]) - gs.U_r_values[i] / r_node;
    }

    gs.c_tail = gs.U_values[i_match] / besk0(R_match);
    for (size_t i = i_match + 1; i < n; ++i) {
        double rn = gs.r_nodes[i];
        gs.U_values[i] = gs.c_tail * besk0(rn);
        gs.U_r_values[i] = -gs.c_tail * besk1(rn);
        gs.U_rr_values[i] = gs.c_tail * (besk0(rn) + besk1(rn) / rn);
    }

    gs.dU_slopes = pchip_slopes(gs.U_values, kTableStep);
    gs.dUr_slopes = pchip_slopes(gs.U_r_values, kTableStep);
    gs.dUrr_slopes = pchip_slopes(gs.U_rr_values, kTableStep);

    gs.lambda = decay_constant(gs);

    if (report) {
        report->bracket_lo = lo;
        report->bracket_hi = hi;
        report->bisections = bisections;
        report->polish_steps = polish;
        report->wronskian = w2;
    }
    return gs;
}

double decay_constant(const GroundState& gs, double fit_lo, double fit_hi) {
    if (gs.r_nodes.empty() || gs.r_nodes.back() <= 10.0)
        throw std::invalid_argument("decay_constant: profile must extend past r = 10");
    fit_hi = std::min(fit_hi, gs.r_nodes.back());

    double sum0 = 0.0, sum1 = 0.0, mn = 1e300, mx = -1e300;
    size_t cnt = 0;
    for (size_t i = 0; i < gs.r_nodes.size(); ++i) {
        double r = gs.r_nodes[i];
        if (r < fit_lo || r > fit_hi) continue;
        double w0 = std::sqrt(r) * std::exp(r) * gs.U_values[i];
        // derivative estimate divided by the factor the asymptote's own
        // derivative carries, so both estimators target the same constant
        double w1 = std::sqrt(r) * std::exp(r) * (-gs.U_r_values[i]) / (1.0 + 0.5 / r);
        sum0 += w0;
        sum1 += w1;
        mn = std::min(mn, w0);
        mx = std::max(mx, w0);
        ++cnt;
    }
    if (cnt < 8) throw std::invalid_argument("decay_constant: fit window too small");
    double lam = sum0 / cnt;
    double lam1 = sum1 / cnt;
    if ((mx - mn) / std::abs(lam) > 0.05)
        throw std::runtime_error("decay_constant: non-flat fit window, integration horizon too short");
    if (std::abs(lam1 / lam - 1.0) > 0.02)
        throw std::runtime_error("decay_constant: derivative-based estimate disagrees beyond 2%");
    return lam;
}

double sample_at(const GroundState& gs, double x1, double x2, double shift, SampleWhat what) {
    const double dy = x2 - shift;
    const double r = std::hypot(x1, dy);
    const double a = gs.center_value;
    const double r_eps = 1e-7;
    switch (what) {
        case SampleWhat::U:
            if (r < r_eps) return a;
            return gs.value(r);
        case SampleWhat::d2U:
            if (r < r_eps) return gamma_eval(gs.spec, a) * dy / 2.0;
            return (dy / r) * gs.deriv(r);
        case SampleWhat::d22U: {
            if (r < r_eps) return gamma_eval(gs.spec, a) / 2.0;
            double s = dy / r, c = x1 / r;
            return s * s * gs.second(r) + c * c * gs.deriv(r) / r;
        }
        case SampleWhat::gamma_prime_U:
            if (r < r_eps) return gamma_prime(gs.spec, a);
            return gamma_prime(gs.spec, gs.value(r));
    }
    return 0.0;
}

std::vector<double> sample(const GroundState& gs,
                           const std::vector<std::array<double, 2>>& points,
                           double shift, SampleWhat what) {
    if (!std::isfinite(shift)) throw std::invalid_argument("sample: shift must be finite");
    std::vector<double> out(points.size());
    for (size_t i = 0; i < points.size(); ++i)
        out[i] = sample_at(gs, points[i][0], points[i][1], shift, what);
    return out;
}

NondegeneracyAudit nondegeneracy_audit(const GroundState& gs, double disk_radius,
                                       double grid_step) {
    if (disk_radius < 15.0)
        throw std::invalid_argument("nondegeneracy_audit: disk_radius must be >= 15");
    const int n = static_cast<int>(std::floor(disk_radius / grid_step));
    const double h = disk_radius / n;

    std::vector<double> rc(n);
    for (int i = 0; i < n; ++i) rc[i] = (i + 0.5) * h;

    struct Entry {
        double mu;
        int m;
        Eigen::VectorXd vec;
    };
    std::vector<Entry> entries;

    // Even-in-x1 subspace of the disk: angular factors cos(m theta) for even m
    // and sin(m theta) for odd m, one radial family per m.
    for (int m = 0; m <= 4; ++m) {
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            double rm = i * h, rp = (i + 1) * h;
            double q = gamma_prime(gs.spec, gs.value(rc[i]));
            double diag = (rm + rp) / (h * h);
            if (i + 1 < n) {
                A(i, i + 1) = -rp / (h * h);
                A(i + 1, i) = -rp / (h * h);
            } else {
                diag += rp / (h * h);  // Dirichlet wall at half-cell distance
            }
            A(i, i) = diag + (m * m / (rc[i] * rc[i]) + q) * rc[i];
            M(i, i) = rc[i];
        }
        Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, M);
        // keep the two lowest-|mu| of this family
        std::vector<int> idx(n);
        for (int i = 0; i < n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](int a, int b) {
            return std::abs(es.eigenvalues()(a)) < std::abs(es.eigenvalues()(b));
        });
        for (int k = 0; k < 2 && k < n; ++k)
            entries.push_back({es.eigenvalues()(idx[k]), m, es.eigenvectors().col(idx[k])});
    }

    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return std::abs(a.mu) < std::abs(b.mu); });

    NondegeneracyAudit audit;
    audit.eig_small = entries[0].mu;
    audit.mode_small = entries[0].m;
    audit.eig_next = entries[1].mu;
    audit.mode_next = entries[1].m;
    audit.r_cells = rc;
    audit.efun_small.assign(entries[0].vec.data(), entries[0].vec.data() + n);

    double s_fu = 0, s_ff = 0, s_uu = 0;
    for (int i = 0; i < n; ++i) {
        double ur = gs.deriv(rc[i]);
        s_fu += audit.efun_small[i] * ur * rc[i];
        s_ff += audit.efun_small[i] * audit.efun_small[i] * rc[i];
        s_uu += ur * ur * rc[i];
    }
    audit.corr_with_dU = std::abs(s_fu) / std::sqrt(s_ff * s_uu);
    return audit;
}

std::string profile_csv(const GroundState& gs) {
    std::ostringstream os;
    os.precision(17);
    os << "r,U,U_r,U_rr\n";
    for (size_t i = 0; i < gs.r_nodes.size(); ++i)
        os << gs.r_nodes[i] << ',' << gs.U_values[i] << ',' << gs.U_r_values[i] << ','
           << gs.U_rr_values[i] << '\n';
    return os.str();
}

std::string profile_json_header(const GroundState& gs) {
    std::ostringstream os;
    os.precision(17);
    os << "{\"p\": " << gs.spec.p << ", \"a\": " << gs.center_value
       << ", \"lambda\": " << gs.lambda << ", \"R_match\": " << gs.R_match << "}";
    return os.str();
}

} // namespace vspike
