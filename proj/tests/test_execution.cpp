#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "amm/execution.hpp"
#include "amm/execution_multi.hpp"

using namespace amm;

namespace {

// Figure-caption parameters of the single-asset comparison study.
LiquidationConfig fig_config() {
    LiquidationConfig c;
    c.T = 0.1;
    c.phi = 1e-5;
    c.alpha = 5.0;
    c.eta = 1.0;
    c.kappa = 1e7;
    c.y0 = 100.0;
    return c;
}
constexpr double kFigBeta = 1.0;

// Independent oracle: plain uniform-step RK4 at h = 1e-5 on the coupled
// (A, B) system, coded separately from the production integrator.
std::pair<double, double> ab_oracle(const LiquidationConfig& c, double beta, double zeta,
                                    double t_eval) {
    const double inv = 1.0 / (c.eta * zeta);
    auto fa = [&](double a) { return c.phi - a * a * inv; };
    auto fb = [&](double a, double b) { return beta + beta * b - a * b * inv; };
    double a = -c.alpha, b = 0.0;
    double t = c.T;
    const double h = 1e-5;
    while (t > t_eval + 1e-12) {
        const double step = std::min(h, t - t_eval);
        const double k1a = fa(a), k1b = fb(a, b);
        const double k2a = fa(a - 0.5 * step * k1a), k2b = fb(a - 0.5 * step * k1a, b - 0.5 * step * k1b);
        const double k3a = fa(a - 0.5 * step * k2a), k3b = fb(a - 0.5 * step * k2a, b - 0.5 * step * k2b);
        const double k4a = fa(a - step * k3a), k4b = fb(a - step * k3a, b - step * k3b);
        a -= step / 6.0 * (k1a + 2 * k2a + 2 * k3a + k4a);
        b -= step / 6.0 * (k1b + 2 * k2b + 2 * k3b + k4b);
        t -= step;
    }
    return {a, b};
}

// tanh/coth closed form of A on the branch consistent with the terminal
// condition; valid as an oracle only where it satisfies the ODE residual.
double a_closed_form(const LiquidationConfig& c, double zeta, double t) {
    const double s = std::sqrt(c.phi * c.eta * zeta);
    const double r = std::sqrt(c.phi / (c.eta * zeta));
    const double x = c.alpha / s;
    if (x < 1.0) return s * std::tanh(r * (t - c.T) + std::atanh(-x));
    return s / std::tanh(r * (t - c.T) + std::atanh(-1.0 / x));
}

}  // namespace

TEST_CASE("scalar coefficient solve") {
    const auto cfg = fig_config();
    const std::vector<double> zg{1900.0, 1950.0, 2000.0, 2050.0, 2100.0};
    const auto coeffs = solve_scalar_coefficients(cfg, kFigBeta, zg, 64);

    SUBCASE("terminal conditions are exact") {
        for (std::size_t zi = 0; zi < zg.size(); ++zi) {
            CHECK(coeffs.a_at(coeffs.t.size() - 1, zi) == -cfg.alpha);
            CHECK(coeffs.b_at(coeffs.t.size() - 1, zi) == 0.0);
        }
    }
    SUBCASE("A at time zero matches the fixed-step RK4 oracle") {
        const double zeta = std::pow(2000.0, 1.5) / cfg.kappa;
        const auto oracle = ab_oracle(cfg, kFigBeta, zeta, 0.0);
        const auto got = scalar_ab_at(cfg, kFigBeta, zeta, 0.0);
        CHECK(got.a == doctest::Approx(oracle.first).epsilon(1e-8));
        CHECK(got.b == doctest::Approx(oracle.second).epsilon(1e-8));
        // Closed-form branch agrees where it satisfies the ODE.
        CHECK(got.a == doctest::Approx(a_closed_form(cfg, zeta, 0.0)).epsilon(1e-9));
        // Table interpolation at a grid node.
        const auto v = coeffs.interpolate(0.0, 2000.0);
        CHECK(v.a == doctest::Approx(oracle.first).epsilon(1e-7));
    }
    SUBCASE("B against the quadrature oracle") {
        const double zeta = std::pow(2000.0, 1.5) / cfg.kappa;
        const auto got = scalar_ab_at(cfg, kFigBeta, zeta, 0.0);
        CHECK(got.b == doctest::Approx(b_quadrature_oracle(cfg, kFigBeta, zeta, 0.0)).epsilon(1e-6));
        CHECK(got.b < 0.0);  // negative: positive oracle premium buys the asset
    }
    SUBCASE("bounded by the tanh envelope") {
        for (std::size_t ti = 0; ti < coeffs.t.size(); ++ti)
            for (std::size_t zi = 0; zi < zg.size(); ++zi) {
                const double zeta = std::pow(zg[zi], 1.5) / cfg.kappa;
                const double bound = std::max(cfg.alpha, std::sqrt(cfg.phi * cfg.eta * zeta));
                CHECK(coeffs.a_at(ti, zi) <= 0.0);
                CHECK(std::abs(coeffs.a_at(ti, zi)) <= bound * (1.0 + 1e-12));
            }
    }
    SUBCASE("dense solve satisfies the finite-difference residual") {
        const std::vector<double> z_one{2000.0};
        const auto dense = solve_scalar_coefficients_dense(cfg, kFigBeta, z_one, 60000);
        const double zeta = std::pow(2000.0, 1.5) / cfg.kappa;
        const double inv = 1.0 / (cfg.eta * zeta);
        double worst_a = 0.0, worst_b = 0.0;
        for (std::size_t k = 1; k + 1 < dense.t.size(); ++k) {
            const double hm = dense.t[k] - dense.t[k - 1];
            const double hp = dense.t[k + 1] - dense.t[k];
            const double am = dense.a_at(k - 1, 0), a0 = dense.a_at(k, 0), ap = dense.a_at(k + 1, 0);
            const double bm = dense.b_at(k - 1, 0), b0 = dense.b_at(k, 0), bp = dense.b_at(k + 1, 0);
            const double da =
                (hm * hm * ap - hp * hp * am + (hp * hp - hm * hm) * a0) / (hm * hp * (hm + hp));
            const double db =
                (hm * hm * bp - hp * hp * bm + (hp * hp - hm * hm) * b0) / (hm * hp * (hm + hp));
            worst_a = std::max(worst_a, std::abs(da - (cfg.phi - a0 * a0 * inv)));
            worst_b = std::max(worst_b, std::abs(db - (kFigBeta + kFigBeta * b0 - a0 * b0 * inv)));
        }
        CHECK(worst_a < 1e-6);
        CHECK(worst_b < 1e-6);
    }
}

TEST_CASE("closed-form speed") {
    const auto cfg = fig_config();
    std::vector<double> zg(41);
    for (int i = 0; i < 41; ++i) zg[i] = 1900.0 + 10.0 * i;
    const auto coeffs = solve_scalar_coefficients(cfg, kFigBeta, zg, 128);

    SUBCASE("flat book, aligned rates: no trading") {
        CHECK(closed_form_speed(0.05, 0.0, 2000.0, 2000.0, coeffs, cfg).nu == 0.0);
    }
    SUBCASE("positive inventory sells at aligned rates") {
        CHECK(closed_form_speed(0.05, 50.0, 2000.0, 2000.0, coeffs, cfg).nu > 0.0);
    }
    SUBCASE("oracle above the pool rate buys the asset") {
        // Buying means negative speed: dy = -nu dt.
        CHECK(closed_form_speed(0.0, 0.0, 2000.0, 2010.0, coeffs, cfg).nu < 0.0);
        CHECK(closed_form_speed(0.0, 0.0, 2000.0, 1990.0, coeffs, cfg).nu > 0.0);
    }
    SUBCASE("affine in inventory and spread") {
        const double base = closed_form_speed(0.03, 10.0, 2000.0, 2005.0, coeffs, cfg).nu;
        const double twice = closed_form_speed(0.03, 20.0, 2000.0, 2010.0, coeffs, cfg).nu;
        CHECK(twice == doctest::Approx(2.0 * base).epsilon(1e-10));
    }
    SUBCASE("clamping is flagged") {
        CHECK(closed_form_speed(0.0, 1.0, 3000.0, 3000.0, coeffs, cfg).clamped);
        CHECK_FALSE(closed_form_speed(0.0, 1.0, 2000.0, 2000.0, coeffs, cfg).clamped);
    }
}

TEST_CASE("piecewise strategy") {
    const auto cfg = fig_config();
    const double z_lo = 1900.0, z_hi = 2100.0;

    SUBCASE("equals the constant-impact strategy at anchors") {
        const int n = 16;
        const int j = piecewise_strip(2000.0, n, z_lo, z_hi);
        const double anchor = z_lo + (z_hi - z_lo) * j / n;
        const double zeta = std::pow(anchor, 1.5) / cfg.kappa;
        const auto ab = scalar_ab_at(cfg, kFigBeta, zeta, 0.02);
        const double direct = -ab.a / (cfg.eta * zeta) * 40.0 +
                              ab.b / (2.0 * cfg.eta * zeta) * (2012.0 - anchor);
        CHECK(piecewise_speed(0.02, 40.0, anchor, 2012.0, n, z_lo, z_hi, cfg, kFigBeta) ==
              doctest::Approx(direct).epsilon(1e-12));
    }
    SUBCASE("doubling N shrinks the largest inter-strip jump") {
        auto max_jump = [&](int n) {
            double worst = 0.0;
            for (int j = 0; j + 1 <= n; ++j) {
                const double zb = z_lo + (z_hi - z_lo) * (j + 1.0) / n;
                const double za = z_lo + (z_hi - z_lo) * static_cast<double>(j) / n;
                const double zeta_a = std::pow(za, 1.5) / cfg.kappa;
                const double zeta_b = std::pow(zb, 1.5) / cfg.kappa;
                const auto ab_a = scalar_ab_at(cfg, kFigBeta, zeta_a, 0.0);
                const auto ab_b = scalar_ab_at(cfg, kFigBeta, zeta_b, 0.0);
                const double ya = -ab_a.a / (cfg.eta * zeta_a) * 60.0 +
                                  ab_a.b / (2.0 * cfg.eta * zeta_a) * (2020.0 - zb);
                const double yb = -ab_b.a / (cfg.eta * zeta_b) * 60.0 +
                                  ab_b.b / (2.0 * cfg.eta * zeta_b) * (2020.0 - zb);
                worst = std::max(worst, std::abs(ya - yb));
            }
            return worst;
        };
        const double j16 = max_jump(16);
        const double j32 = max_jump(32);
        CHECK(j32 < 0.7 * j16);
    }
    SUBCASE("large N approaches the closed form") {
        std::vector<double> zg(129);
        for (int i = 0; i < 129; ++i) zg[i] = z_lo + (z_hi - z_lo) * i / 128.0;
        const auto coeffs = solve_scalar_coefficients(cfg, kFigBeta, zg, 64);
        double sup = 0.0, scale = 0.0;
        for (int i = 0; i < 400; ++i) {
            const double z = z_lo + (z_hi - z_lo) * (i + 0.5) / 400.0;
            const double pw = piecewise_speed(0.0, 25.0, z, z + 5.0, 512, z_lo, z_hi, cfg, kFigBeta);
            const double zeta = std::pow(z, 1.5) / cfg.kappa;
            const auto ab = scalar_ab_at(cfg, kFigBeta, zeta, 0.0);
            const double cf = -ab.a / (cfg.eta * zeta) * 25.0 + ab.b / (2.0 * cfg.eta * zeta) * 5.0;
            sup = std::max(sup, std::abs(pw - cf));
            scale = std::max(scale, std::abs(cf));
        }
        CHECK(sup / scale < 5e-3);
    }
}

TEST_CASE("benchmark strategies") {
    auto cfg = fig_config();
    cfg.y0 = 14877.0;
    cfg.T = 2.0 / 24.0;
    std::vector<double> zg{2600.0, 2700.0, 2800.0};
    const auto coeffs = solve_scalar_coefficients(cfg, kFigBeta, zg, 32);

    SUBCASE("TWAP speed") {
        const double nu = benchmark_speed(BenchmarkKind::Twap, 0.01, 5000.0, 2700.0, coeffs, cfg, 1e-3);
        CHECK(nu == doctest::Approx(14877.0 / (2.0 / 24.0)).epsilon(1e-14));
    }
    SUBCASE("single order drains inventory in one step") {
        const double dt = 1e-3;
        double y = cfg.y0;
        y -= benchmark_speed(BenchmarkKind::SingleOrder, 0.0, y, 2700.0, coeffs, cfg, dt) * dt;
        CHECK(y == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(benchmark_speed(BenchmarkKind::SingleOrder, 0.01, 0.0, 2700.0, coeffs, cfg, dt) == 0.0);
    }
    SUBCASE("Almgren-Chriss equals the closed form when beta = 0") {
        const auto c0 = solve_scalar_coefficients(cfg, 0.0, zg, 32);
        const double ac = benchmark_speed(BenchmarkKind::AlmgrenChriss, 0.02, 900.0, 2700.0, c0, cfg, 1e-3);
        const double cf = closed_form_speed(0.02, 900.0, 2700.0, 2750.0, c0, cfg).nu;
        CHECK(ac == doctest::Approx(cf).epsilon(1e-12));
    }
}

TEST_CASE("matrix coefficients") {
    MultiConfig mc;
    mc.T = 0.1;
    mc.phi = 1e-5;
    mc.eta = 1.0;
    mc.alpha = 5.0 * Eigen::MatrixXd::Identity(1, 1);
    const double zeta = std::pow(2000.0, 1.5) / 1e7;
    Eigen::VectorXd zv(1);
    zv << zeta;
    Eigen::MatrixXd beta(2, 2);
    beta << kFigBeta, -kFigBeta, 0.0, 0.0;
    const Eigen::MatrixXd sigma_tilde = Eigen::MatrixXd::Identity(1, 1);

    SUBCASE("terminal conditions") {
        const auto coeffs = solve_matrix_coefficients(mc, zv, beta, sigma_tilde, 64);
        CHECK(coeffs.a.back()(0, 0) == -5.0);
        CHECK(coeffs.b.back().cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("n = 1 reduces to the scalar system") {
        const auto coeffs = solve_matrix_coefficients(mc, zv, beta, sigma_tilde, 128);
        LiquidationConfig sc;
        sc.T = mc.T;
        sc.phi = mc.phi;
        sc.alpha = 5.0;
        sc.eta = mc.eta;
        sc.kappa = 1e7;
        for (std::size_t k = 0; k < coeffs.t.size(); k += 16) {
            const auto ab = scalar_ab_at(sc, kFigBeta, zeta, coeffs.t[k]);
            CHECK(coeffs.a[k](0, 0) == doctest::Approx(ab.a).epsilon(1e-8));
            CHECK(coeffs.b[k](0, 0) == doctest::Approx(ab.b).epsilon(1e-8));
            CHECK(coeffs.b[k](0, 1) == doctest::Approx(-ab.b).epsilon(1e-8));
        }
    }
    SUBCASE("speed reduction and linearity") {
        const auto coeffs = solve_matrix_coefficients(mc, zv, beta, sigma_tilde, 128);
        LiquidationConfig sc;
        sc.T = mc.T;
        sc.phi = mc.phi;
        sc.alpha = 5.0;
        sc.eta = mc.eta;
        sc.kappa = 1e7;
        Eigen::VectorXd y(1), r(2), mu(2), kap(1);
        y << 35.0;
        r << 2000.0, 2012.0;
        mu << 1990.0, 1990.0;
        kap << 1e7;
        const double t = coeffs.t[32];
        const auto nu = closed_form_speed_multi(t, y, r, mu, coeffs, kap, mc.eta);
        const auto ab = scalar_ab_at(sc, kFigBeta, zeta, t);
        const double expect =
            -ab.a / (sc.eta * zeta) * 35.0 + ab.b / (2.0 * sc.eta * zeta) * (2012.0 - 2000.0);
        CHECK(nu(0) == doctest::Approx(expect).epsilon(1e-7));
        // Flat book at the long-run mean: no trading.
        Eigen::VectorXd y0 = Eigen::VectorXd::Zero(1);
        const auto nu0 = closed_form_speed_multi(t, y0, mu, mu, coeffs, kap, mc.eta);
        CHECK(std::abs(nu0(0)) < 1e-12);
    }
    SUBCASE("diagonal two-asset system block-decouples") {
        MultiConfig m2;
        m2.T = 0.1;
        m2.phi = 1e-5;
        m2.eta = 1.0;
        m2.alpha = Eigen::MatrixXd::Zero(2, 2);
        m2.alpha.diagonal() << 5.0, 8.0;
        Eigen::VectorXd z2(2);
        z2 << zeta, 2.0 * zeta;
        Eigen::MatrixXd b4 = Eigen::MatrixXd::Zero(4, 4);
        b4(0, 0) = 1.0;
        b4(0, 2) = -1.0;
        b4(1, 1) = 2.5;
        b4(1, 3) = -2.5;
        const auto coeffs = solve_matrix_coefficients(m2, z2, b4, Eigen::MatrixXd::Identity(2, 2), 64);
        LiquidationConfig s1;
        s1.T = 0.1, s1.phi = 1e-5, s1.alpha = 5.0, s1.eta = 1.0, s1.kappa = 1.0;
        LiquidationConfig s2 = s1;
        s2.alpha = 8.0;
        const double t = coeffs.t[16];
        const auto ab1 = scalar_ab_at(s1, 1.0, zeta, t);
        const auto ab2 = scalar_ab_at(s2, 2.5, 2.0 * zeta, t);
        CHECK(coeffs.a[16](0, 0) == doctest::Approx(ab1.a).epsilon(1e-8));
        CHECK(coeffs.a[16](1, 1) == doctest::Approx(ab2.a).epsilon(1e-8));
        CHECK(std::abs(coeffs.a[16](0, 1)) < 1e-10);
        CHECK(coeffs.b[16](0, 0) == doctest::Approx(ab1.b).epsilon(1e-8));
        CHECK(coeffs.b[16](1, 1) == doctest::Approx(ab2.b).epsilon(1e-8));
        CHECK(std::abs(coeffs.b[16](0, 1)) < 1e-10);
        CHECK(std::abs(coeffs.b[16](1, 0)) < 1e-10);
    }
    SUBCASE("time-ordered exponential oracle for B") {
        const auto coeffs = solve_matrix_coefficients(mc, zv, beta, sigma_tilde, 128);
        const Eigen::MatrixXd b_toe = b_time_ordered_exponential(mc, zv, beta, sigma_tilde, 0.0, 800);
        CHECK(b_toe(0, 0) == doctest::Approx(coeffs.b.front()(0, 0)).epsilon(1e-5));
        CHECK(b_toe(0, 1) == doctest::Approx(coeffs.b.front()(0, 1)).epsilon(1e-5));
    }
    SUBCASE("spread sign drives the trade direction") {
        MultiConfig m2;
        m2.T = 0.5;
        m2.phi = 1e-6;
        m2.eta = 1.0;
        m2.alpha = 10.0 * Eigen::MatrixXd::Identity(2, 2);
        Eigen::VectorXd z2(2);
        z2 << std::pow(2690.0, 1.5) / 2.04e7, std::pow(45000.0, 1.5) / 1.32e6;
        Eigen::MatrixXd b4 = Eigen::MatrixXd::Zero(4, 4);
        b4(0, 0) = 600.0;
        b4(0, 2) = -600.0;
        b4(1, 1) = 400.0;
        b4(1, 3) = -400.0;
        b4(1, 0) = 5.0;  // mild cross-coupling
        b4(0, 1) = -5.0;
        const auto coeffs =
            solve_matrix_coefficients(m2, z2, b4, Eigen::MatrixXd::Identity(2, 2), 128);
        Eigen::VectorXd y = Eigen::VectorXd::Zero(2), kap(2), mu(4), r(4);
        kap << 2.04e7, 1.32e6;
        mu << 2690.0, 45000.0, 2690.0, 45000.0;
        r << 2690.0, 45000.0, 2700.0, 45000.0;  // oracle 1 above pool 1
        const auto nu = closed_form_speed_multi(0.0, y, r, mu, coeffs, kap, m2.eta);
        CHECK(nu(0) < 0.0);  // buy the underpriced asset
        r(2) = 2680.0;       // oracle below: sell
        const auto nu2 = closed_form_speed_multi(0.0, y, r, mu, coeffs, kap, m2.eta);
        CHECK(nu2(0) > 0.0);
    }
}
