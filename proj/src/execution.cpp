#include "amm/execution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace amm {

namespace {

struct OdeParams {
    double phi, alpha, eta, beta, inv_eta_zeta;
};

inline void rhs(const OdeParams& p, double a, double b, double& da, double& db) {
    da = p.phi - a * a * p.inv_eta_zeta;
    db = p.beta + p.beta * b - a * b * p.inv_eta_zeta;
}

inline void rk4_step(const OdeParams& p, double h, double& a, double& b) {
    double k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
    rhs(p, a, b, k1a, k1b);
    rhs(p, a + 0.5 * h * k1a, b + 0.5 * h * k1b, k2a, k2b);
    rhs(p, a + 0.5 * h * k2a, b + 0.5 * h * k2b, k3a, k3b);
    rhs(p, a + h * k3a, b + h * k3b, k4a, k4b);
    a += h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
    b += h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
}

// Width of the terminal boundary layer of the Riccati equation.
inline double layer_scale(const LiquidationConfig& cfg, double zeta) {
    const double a_scale = std::max({cfg.alpha, std::sqrt(cfg.phi * cfg.eta * zeta), 1e-12});
    return cfg.eta * zeta / a_scale;
}

// Integrates backward from T, landing exactly on each requested output time
// (descending, first element == T). Substeps keep h <= frac*(T - t + eps0).
template <typename Visit>
void integrate_scalar(const LiquidationConfig& cfg, double beta, double zeta,
                      const std::vector<double>& times_desc, Visit&& visit) {
    if (!(zeta > 0.0)) throw std::domain_error("impact parameter zeta must be positive");
    if (!(cfg.eta > 0.0) || !(cfg.alpha > 0.0)) throw std::domain_error("eta and alpha must be positive");
    const OdeParams p{cfg.phi, cfg.alpha, cfg.eta, beta, 1.0 / (cfg.eta * zeta)};
    const double eps0 = layer_scale(cfg, zeta);
    const double frac = 0.01;

    double a = -cfg.alpha;
    double b = 0.0;
    double t = cfg.T;
    visit(0, t, a, b);
    for (std::size_t i = 1; i < times_desc.size(); ++i) {
        const double target = times_desc[i];
        while (t > target) {
            const double h_max = frac * (cfg.T - t + eps0);
            const double h = std::min(t - target, std::max(h_max, 1e-14));
            rk4_step(p, -h, a, b);
            t -= h;
        }
        t = target;
        visit(i, t, a, b);
    }
}

std::vector<double> graded_times_desc(double T, double eps0, int nodes) {
    std::vector<double> t(nodes + 1);
    const double u_hi = 1.0 / eps0;
    const double u_lo = 1.0 / (T + eps0);
    for (int k = 0; k <= nodes; ++k) {
        const double u = u_hi + (u_lo - u_hi) * static_cast<double>(k) / nodes;
        t[k] = T + eps0 - 1.0 / u;
    }
    t.front() = T;
    t.back() = 0.0;
    return t;
}

}  // namespace

ScalarCoefficients::Value ScalarCoefficients::interpolate(double t_query, double z_query) const {
    Value v;
    double tq = t_query, zq = z_query;
    if (tq < t.front()) { tq = t.front(); v.clamped = true; }
    if (tq > t.back()) { tq = t.back(); v.clamped = true; }
    if (zq < z.front()) { zq = z.front(); v.clamped = true; }
    if (zq > z.back()) { zq = z.back(); v.clamped = true; }

    const auto it = std::upper_bound(t.begin(), t.end(), tq);
    std::size_t ti = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - t.begin() - 1));
    if (ti >= t.size() - 1) ti = t.size() - 2;
    const auto iz = std::upper_bound(z.begin(), z.end(), zq);
    std::size_t zi = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, iz - z.begin() - 1));
    if (zi >= z.size() - 1) zi = z.size() - 2;

    const double wt = (tq - t[ti]) / (t[ti + 1] - t[ti]);
    const double wz = (zq - z[zi]) / (z[zi + 1] - z[zi]);
    v.a = (1 - wt) * ((1 - wz) * a_at(ti, zi) + wz * a_at(ti, zi + 1)) +
          wt * ((1 - wz) * a_at(ti + 1, zi) + wz * a_at(ti + 1, zi + 1));
    v.b = (1 - wt) * ((1 - wz) * b_at(ti, zi) + wz * b_at(ti, zi + 1)) +
          wt * ((1 - wz) * b_at(ti + 1, zi) + wz * b_at(ti + 1, zi + 1));
    return v;
}

static ScalarCoefficients solve_on_times(const LiquidationConfig& config, double beta,
                                         const std::vector<double>& z_grid,
                                         const std::vector<double>& times_desc) {
    for (std::size_t i = 1; i < z_grid.size(); ++i)
        if (!(z_grid[i] > z_grid[i - 1]) || !(z_grid[0] > 0.0))
            throw std::domain_error("z grid must be positive and strictly increasing");
    ScalarCoefficients out;
    out.phi = config.phi;
    out.alpha = config.alpha;
    out.eta = config.eta;
    out.kappa = config.kappa;
    out.beta = beta;
    out.T = config.T;
    out.z = z_grid;
    out.t.assign(times_desc.rbegin(), times_desc.rend());
    const std::size_t nt = out.t.size();
    const std::size_t nz = out.z.size();
    out.a.assign(nt * nz, 0.0);
    out.b.assign(nt * nz, 0.0);
    for (std::size_t zi = 0; zi < nz; ++zi) {
        const double zeta = std::pow(z_grid[zi], 1.5) / config.kappa;
        integrate_scalar(config, beta, zeta, times_desc,
                         [&](std::size_t k, double, double a, double b) {
                             const std::size_t ti = nt - 1 - k;  // times_desc descends
                             out.a[ti * nz + zi] = a;
                             out.b[ti * nz + zi] = b;
                         });
    }
    return out;
}

ScalarCoefficients solve_scalar_coefficients(const LiquidationConfig& config, double beta,
                                             const std::vector<double>& z_grid, int t_steps) {
    if (t_steps < 2) throw std::domain_error("need at least two time steps");
    std::vector<double> times(t_steps + 1);
    for (int k = 0; k <= t_steps; ++k)
        times[k] = config.T * (1.0 - static_cast<double>(k) / t_steps);
    return solve_on_times(config, beta, z_grid, times);
}

ScalarCoefficients solve_scalar_coefficients_dense(const LiquidationConfig& config, double beta,
                                                   const std::vector<double>& z_grid, int nodes) {
    double zeta_min = std::pow(z_grid.front(), 1.5) / config.kappa;
    const double eps0 = layer_scale(config, zeta_min);
    return solve_on_times(config, beta, z_grid, graded_times_desc(config.T, eps0, nodes));
}

AbPair scalar_ab_at(const LiquidationConfig& config, double beta, double zeta, double t) {
    if (t < 0.0 || t > config.T) throw std::domain_error("t outside [0, T]");
    AbPair res{-config.alpha, 0.0};
    const std::vector<double> times = {config.T, t};
    if (t == config.T) return res;
    integrate_scalar(config, beta, zeta, times, [&](std::size_t k, double, double a, double b) {
        if (k == 1) { res.a = a; res.b = b; }
    });
    return res;
}

SpeedResult closed_form_speed(double t, double y, double z, double s,
                              const ScalarCoefficients& coeffs, const LiquidationConfig& config) {
    const auto v = coeffs.interpolate(t, z);
    const double zm32 = std::pow(z, -1.5);
    SpeedResult r;
    r.clamped = v.clamped;
    r.nu = -(config.kappa / config.eta) * zm32 * v.a * y +
           (config.kappa / (2.0 * config.eta)) * zm32 * v.b * (s - z);
    return r;
}

int piecewise_strip(double z, int n_strips, double z_low, double z_high) {
    if (z < z_low + (z_high - z_low) / n_strips) return 0;
    if (z >= z_high) return n_strips;
    const double frac = (z - z_low) / (z_high - z_low) * n_strips;
    int j = static_cast<int>(std::floor(frac));
    return std::clamp(j, 0, n_strips);
}

double piecewise_speed(double t, double y, double z, double s, int n_strips, double z_low,
                       double z_high, const LiquidationConfig& config, double beta) {
    if (!(z_low > 0.0) || !(z_high > z_low)) throw std::domain_error("invalid rate bounds");
    if (n_strips < 1) throw std::domain_error("need at least one strip");
    const int j = piecewise_strip(z, n_strips, z_low, z_high);
    const double z_anchor = z_low + (z_high - z_low) * static_cast<double>(j) / n_strips;
    const double zeta = std::pow(z_anchor, 1.5) / config.kappa;
    const AbPair ab = scalar_ab_at(config, beta, zeta, t);
    return -ab.a / (config.eta * zeta) * y + ab.b / (2.0 * config.eta * zeta) * (s - z);
}

double benchmark_speed(BenchmarkKind kind, double t, double y, double z,
                       const ScalarCoefficients& coeffs, const LiquidationConfig& config,
                       double step_dt) {
    switch (kind) {
        case BenchmarkKind::Twap:
            return config.y0 / config.T;
        case BenchmarkKind::SingleOrder:
            return (y != 0.0 && step_dt > 0.0) ? y / step_dt : 0.0;
        case BenchmarkKind::AlmgrenChriss: {
            const auto v = coeffs.interpolate(t, z);
            return -(config.kappa / config.eta) * std::pow(z, -1.5) * v.a * y;
        }
    }
    return 0.0;
}

double b_quadrature_oracle(const LiquidationConfig& config, double beta, double zeta, double t,
                           int quad_nodes) {
    // B(t) = -int_t^T beta exp(-int_t^s (beta - A(u)/(eta zeta)) du) ds with A
    // from the Riccati path; cumulative trapezoid on a grid graded towards T.
    const double eps0 = layer_scale(config, zeta);
    std::vector<double> s_desc(quad_nodes + 1);
    {
        const double u_hi = 1.0 / eps0;
        const double u_lo = 1.0 / (config.T - t + eps0);
        for (int k = 0; k <= quad_nodes; ++k) {
            const double u = u_hi + (u_lo - u_hi) * static_cast<double>(k) / quad_nodes;
            s_desc[k] = config.T + eps0 - 1.0 / u;
        }
        s_desc.front() = config.T;
        s_desc.back() = t;
    }
    std::vector<double> a_vals(s_desc.size());
    integrate_scalar(config, beta, zeta, s_desc,
                     [&](std::size_t k, double, double a, double) { a_vals[k] = a; });

    // Ascending order in s for the quadrature.
    std::vector<double> s(s_desc.rbegin(), s_desc.rend());
    std::vector<double> a(a_vals.rbegin(), a_vals.rend());
    const std::size_t n = s.size();
    std::vector<double> g(n, 0.0);  // g(s) = int_t^s (beta - A/(eta zeta)) du
    const double inv = 1.0 / (config.eta * zeta);
    for (std::size_t k = 1; k < n; ++k) {
        const double f0 = beta - a[k - 1] * inv;
        const double f1 = beta - a[k] * inv;
        g[k] = g[k - 1] + 0.5 * (f0 + f1) * (s[k] - s[k - 1]);
    }
    double integral = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        const double f0 = beta * std::exp(-g[k - 1]);
        const double f1 = beta * std::exp(-g[k]);
        integral += 0.5 * (f0 + f1) * (s[k] - s[k - 1]);
    }
    return -integral;
}

}  // namespace amm
