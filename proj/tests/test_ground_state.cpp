#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <random>

#include "shooting_oracle.hpp"
#include "vspike/ground_state.hpp"
#include "vspike/nonlinearity.hpp"

using namespace vspike;

namespace {

const GroundState& cached_gs() {
    static GroundState gs = shoot(NonlinearitySpec(2), 1e-13);
    return gs;
}

// Frozen oracle outputs (fixed-step RK4 + bisection, steps 1e-3 and 5e-4
// agreeing to 1e-10; the spot values below were produced by that very code).
constexpr double kCenterFrozen = 2.2062008646505;
constexpr double kMassFrozen = 11.70090;

} // namespace

TEST_CASE("gamma family values and derivative consistency") {
    NonlinearitySpec p2(2), p1(1);
    CHECK(gamma_eval(p2, 0.0) == 0.0);
    CHECK(gamma_eval(p2, 1.0) == doctest::Approx(0.0));
    CHECK(gamma_eval(p1, 2.0) == doctest::Approx(-2.0));
    CHECK(gamma_prime(p2, 0.0) == 1.0);
    CHECK(gamma_prime(p2, 1.0) == doctest::Approx(-2.0));

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(-2.5, 2.5);
    for (int i = 0; i < 50; ++i) {
        double t = dist(rng);
        double h = 1e-6;
        double fd = (gamma_eval(p2, t + h) - gamma_eval(p2, t - h)) / (2 * h);
        CHECK(std::abs(fd - gamma_prime(p2, t)) < 1e-8);
        CHECK(gamma_eval(p2, -t) == doctest::Approx(-gamma_eval(p2, t)).epsilon(1e-14));
    }
}

TEST_CASE("shooting center value against the independent integrator") {
    double a_h = oracle::bisect_center(2, 1e-3);
    double a_h2 = oracle::bisect_center(2, 5e-4);
    CHECK(std::abs(a_h - a_h2) < 1e-10);
    CHECK(std::abs(a_h2 - kCenterFrozen) < 1e-8);

    const GroundState& gs = cached_gs();
    CHECK(std::abs(gs.center_value - a_h2) < 1e-6);

    auto prof = oracle::profile(2, a_h2, 5e-4, 14.0);
    double m = oracle::mass(prof, 14.0);
    CHECK(std::abs(m - kMassFrozen) < 1e-3);
    CHECK(std::abs(m - 11.70) < 0.01);
}

TEST_CASE("profile invariants") {
    const GroundState& gs = cached_gs();
    CHECK(gs.center_value > 0.0);
    CHECK(gs.U_values[0] == gs.center_value);
    CHECK(gs.U_r_values[0] == 0.0);

    for (size_t i = 1; i < gs.U_values.size(); ++i) CHECK(gs.U_values[i] < gs.U_values[i - 1]);

    // tabulated ODE residual at every interior node
    for (size_t i = 1; i < gs.r_nodes.size(); ++i) {
        double r = gs.r_nodes[i];
        double res = gs.U_rr_values[i] + gs.U_r_values[i] / r - gamma_eval(gs.spec, gs.U_values[i]);
        CHECK(std::abs(res) < 1e-9);
    }

    // decay plateau across the matched tail
    for (size_t i = 0; i < gs.r_nodes.size(); ++i) {
        double r = gs.r_nodes[i];
        if (r < gs.R_match) continue;
        double w = std::sqrt(r) * std::exp(r) * gs.U_values[i];
        CHECK(std::abs(w / gs.lambda - 1.0) < 0.01);
    }
    CHECK(gs.lambda > 0.0);
}

TEST_CASE("table cross-consistency by finite differences") {
    const GroundState& gs = cached_gs();
    const double h = gs.r_nodes[1] - gs.r_nodes[0];
    // centered differences at stride s approximate the derivative tables with
    // an O((sh)^2) defect; doubling the stride must quadruple it
    auto worst_at_stride = [&](size_t s) {
        double wu = 0.0, wv = 0.0;
        for (size_t i = s; i + s < gs.r_nodes.size(); ++i) {
            double fdu = (gs.U_values[i + s] - gs.U_values[i - s]) / (2 * s * h);
            double fdv = (gs.U_r_values[i + s] - gs.U_r_values[i - s]) / (2 * s * h);
            wu = std::max(wu, std::abs(fdu - gs.U_r_values[i]));
            wv = std::max(wv, std::abs(fdv - gs.U_rr_values[i]));
        }
        return std::pair{wu, wv};
    };
    auto [u1, v1] = worst_at_stride(1);
    auto [u2, v2] = worst_at_stride(2);
    CHECK(u1 < 1e-3);
    CHECK(v1 < 1e-3);
    CHECK(u2 / u1 == doctest::Approx(4.0).epsilon(0.25));
    CHECK(v2 / v1 == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("decay constant window checks and synthetic tail") {
    const GroundState& gs = cached_gs();
    double lam = decay_constant(gs);
    CHECK(lam == doctest::Approx(gs.lambda));
    CHECK(lam > 0.0);

    // handoff continuity at the matching radius
    size_t i_match = static_cast<size_t>(std::llround(gs.R_match / (gs.r_nodes[1] - gs.r_nodes[0])));
    double asym = gs.lambda * std::pow(gs.R_match, -0.5) * std::exp(-gs.R_match);
    CHECK(std::abs(gs.U_values[i_match] / asym - 1.0) < 0.01);

    // synthetic pure-tail profile reproduces lambda = 1 exactly
    GroundState syn;
    syn.spec = NonlinearitySpec(2);
    size_t n = 5001;
    double hh = 25.0 / (n - 1);
    syn.r_nodes.resize(n);
    syn.U_values.resize(n);
    syn.U_r_values.resize(n);
    syn.U_rr_values.resize(n);
    for (size_t i = 0; i < n; ++i) {
        double r = std::max(i * hh, 1e-8);
        syn.r_nodes[i] = i * hh;
        syn.U_values[i] = std::pow(r, -0.5) * std::exp(-r);
        syn.U_r_values[i] = -(1.0 + 0.5 / r) * std::pow(r, -0.5) * std::exp(-r);
        syn.U_rr_values[i] = 0.0;
    }
    double lam_syn = decay_constant(syn);
    CHECK(std::abs(lam_syn - 1.0) < 1e-10);

    // short horizon must be rejected
    GroundState shorty = syn;
    shorty.r_nodes.resize(1500);
    shorty.U_values.resize(1500);
    shorty.U_r_values.resize(1500);
    shorty.U_rr_values.resize(1500);
    CHECK_THROWS_AS(decay_constant(shorty), std::invalid_argument);
}

TEST_CASE("sampling: center, symmetry line, shift covariance, tail sign") {
    const GroundState& gs = cached_gs();
    CHECK(sample_at(gs, 0.0, 0.7, 0.7, SampleWhat::U) == doctest::Approx(gs.center_value));
    // on the horizontal line through the center the vertical derivative vanishes
    for (double x1 : {0.3, 1.0, 5.0})
        CHECK(sample_at(gs, x1, 0.25, 0.25, SampleWhat::d2U) == doctest::Approx(0.0));

    // shift covariance holds exactly
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(-8.0, 8.0);
    for (int k = 0; k < 30; ++k) {
        double x1 = dist(rng), x2 = dist(rng), s = dist(rng) / 4;
        for (auto what : {SampleWhat::U, SampleWhat::d2U, SampleWhat::d22U}) {
            CHECK(sample_at(gs, x1, x2, s, what) == sample_at(gs, x1, x2 - s, 0.0, what));
        }
    }

    // in the tail, above the center, the vertical derivative is negative
    for (double r : {13.0, 16.0, 20.0, 24.0})
        CHECK(sample_at(gs, r / 2, r, 0.0, SampleWhat::d2U) < 0.0);

    CHECK_THROWS_AS(sample(gs, {{0.0, 0.0}}, std::nan(""), SampleWhat::U), std::invalid_argument);
}

TEST_CASE("vertical translation mode annihilates the linearized operator") {
    const GroundState& gs = cached_gs();
    // residual of the 5-point stencil applied to the sampled mode is pure
    // truncation: it must shrink by 4 when the stencil halves
    auto worst_at = [&](double h) {
        double worst = 0.0;
        for (double x1 = -2.0; x1 <= 2.0; x1 += 0.25) {
            for (double x2 = -2.0; x2 <= 2.0; x2 += 0.25) {
                auto f = [&](double a, double b) {
                    return sample_at(gs, a, b, 0.0, SampleWhat::d2U);
                };
                double lap = (f(x1 + h, x2) + f(x1 - h, x2) + f(x1, x2 + h) + f(x1, x2 - h) -
                              4.0 * f(x1, x2)) /
                             (h * h);
                double q = sample_at(gs, x1, x2, 0.0, SampleWhat::gamma_prime_U);
                worst = std::max(worst, std::abs(-lap + q * f(x1, x2)));
            }
        }
        return worst;
    };
    double w1 = worst_at(0.08), w2 = worst_at(0.04);
    CHECK(w1 < 0.2);
    CHECK(w1 / w2 == doctest::Approx(4.0).epsilon(0.3));
}

TEST_CASE("nondegeneracy audit separates the translation mode") {
    const GroundState& gs = cached_gs();
    auto audit = nondegeneracy_audit(gs, 16.0, 0.05);
    CHECK(audit.mode_small == 1);
    CHECK(std::abs(audit.eig_small) < 0.02);
    CHECK(std::abs(audit.eig_next) > 0.1);
    CHECK(audit.corr_with_dU > 0.999);
    CHECK_THROWS_AS(nondegeneracy_audit(gs, 10.0, 0.05), std::invalid_argument);

    // independent oracle: 2-D Cartesian half-disk (even symmetry via a Neumann
    // wall at x1 = 0), sparse factorization plus inverse power iteration for
    // the two smallest-magnitude eigenvalues
    const double R = 12.0, h = 0.1;
    int n1 = static_cast<int>(R / h);
    int n2 = static_cast<int>(2 * R / h);
    std::vector<std::pair<int, int>> nodes;
    std::vector<int> id(n1 * n2, -1);
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) {
            double x1 = (i + 0.5) * h, x2 = -R + (j + 0.5) * h;
            if (x1 * x1 + x2 * x2 < R * R) {
                id[i * n2 + j] = static_cast<int>(nodes.size());
                nodes.push_back({i, j});
            }
        }
    int n = static_cast<int>(nodes.size());
    std::vector<Eigen::Triplet<double>> trips;
    for (int k = 0; k < n; ++k) {
        auto [i, j] = nodes[k];
        double x1 = (i + 0.5) * h, x2 = -R + (j + 0.5) * h;
        double diag = 4.0 / (h * h);
        auto link = [&](int ii, int jj) {
            if (ii < 0) return;  // mirrored ghost cancels the link across x1 = 0
            int kk = (ii < n1 && jj >= 0 && jj < n2) ? id[ii * n2 + jj] : -1;
            if (kk >= 0) trips.emplace_back(k, kk, -1.0 / (h * h));
        };
        if (i == 0) diag -= 1.0 / (h * h);
        link(i - 1, j);
        link(i + 1, j);
        link(i, j - 1);
        link(i, j + 1);
        trips.emplace_back(k, k, diag + sample_at(gs, x1, x2, 0.0, SampleWhat::gamma_prime_U));
    }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trips.begin(), trips.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
    REQUIRE(lu.info() == Eigen::Success);

    auto inverse_power = [&](const Eigen::VectorXd* deflate) {
        Eigen::VectorXd x = Eigen::VectorXd::Ones(n);
        for (int k = 0; k < n; ++k) x(k) = 1.0 + 0.3 * std::sin(0.7 * k);
        if (deflate) x -= (*deflate) * deflate->dot(x);
        double mu = 0.0;
        for (int it = 0; it < 300; ++it) {
            Eigen::VectorXd y = lu.solve(x);
            if (deflate) y -= (*deflate) * deflate->dot(y);
            y.normalize();
            double mu_new = y.dot(A * y);
            bool settled = std::abs(mu_new - mu) < 1e-10 * std::max(1.0, std::abs(mu_new));
            mu = mu_new;
            x = y;
            if (settled && it > 5) break;
        }
        return std::pair{mu, x};
    };
    auto [mu1, v1] = inverse_power(nullptr);
    auto [mu2, v2] = inverse_power(&v1);
    CHECK(std::abs(mu1 - audit.eig_small) < 0.05);
    CHECK(std::abs(mu2) > 0.1);

    // near-zero eigenvector lines up with the sampled vertical-translation mode
    double s_fu = 0, s_ff = 0, s_uu = 0;
    for (int k = 0; k < n; ++k) {
        double m = sample_at(gs, (nodes[k].first + 0.5) * h, -R + (nodes[k].second + 0.5) * h, 0.0,
                             SampleWhat::d2U);
        s_fu += v1(k) * m;
        s_ff += v1(k) * v1(k);
        s_uu += m * m;
    }
    CHECK(std::abs(s_fu) / std::sqrt(s_ff * s_uu) > 0.999);
}

TEST_CASE("profile export formats") {
    const GroundState& gs = cached_gs();
    std::string csv = profile_csv(gs);
    CHECK(csv.rfind("r,U,U_r,U_rr\n", 0) == 0);
    std::string hdr = profile_json_header(gs);
    CHECK(hdr.find("\"p\": 2") != std::string::npos);
    CHECK(hdr.find("\"lambda\"") != std::string::npos);
    CHECK(hdr.find("\"R_match\"") != std::string::npos);
}

TEST_CASE("shoot rejects a nonpositive tolerance") {
    CHECK_THROWS_AS(shoot(NonlinearitySpec(2), 0.0), std::invalid_argument);
}
