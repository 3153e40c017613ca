#include "amm/dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <unsupported/Eigen/MatrixFunctions>

namespace amm {

namespace {
constexpr double kZFloor = 1e-12;
}

Path2 simulate_model1(const ModelIParams& params, double dt, int steps, std::uint64_t seed) {
    if (!(dt > 0.0) || steps < 0) throw std::domain_error("dt must be positive");
    Rng base(seed);
    Rng rw = base.stream(1);  // drives W (oracle)
    Rng rb = base.stream(2);  // drives B (pool)

    Path2 path;
    path.t.resize(steps + 1);
    path.a.resize(steps + 1);
    path.b.resize(steps + 1);
    const double sq_dt = std::sqrt(dt);
    double s = params.S0;
    double z = params.Z0;
    path.t[0] = 0.0;
    path.a[0] = s;
    path.b[0] = z;
    for (int k = 1; k <= steps; ++k) {
        const double dw = sq_dt * rw.gaussian();
        const double db = sq_dt * rb.gaussian();
        s *= std::exp(-0.5 * params.sigma * params.sigma * dt + params.sigma * dw);
        z += params.beta * (s - z) * dt + params.gamma * z * db;
        if (z < kZFloor) z = kZFloor;
        path.t[k] = k * dt;
        path.a[k] = s;
        path.b[k] = z;
    }
    return path;
}

Path1 simulate_cir(const CirParams& params, double dt, int steps, std::uint64_t seed) {
    if (!(dt > 0.0) || steps < 0) throw std::domain_error("dt must be positive");
    Rng rng = Rng(seed).stream(3);
    Path1 path;
    path.t.resize(steps + 1);
    path.a.resize(steps + 1);
    const double sq_dt = std::sqrt(dt);
    double x = params.pi_tilde0;  // unconstrained iterate of the full-truncation scheme
    path.t[0] = 0.0;
    path.a[0] = std::max(0.0, x);
    for (int k = 1; k <= steps; ++k) {
        const double xp = std::max(0.0, x);
        x += params.Gamma * (params.pi_bar - xp) * dt + params.psi * std::sqrt(xp) * sq_dt * rng.gaussian();
        path.t[k] = k * dt;
        path.a[k] = std::max(0.0, x);
    }
    return path;
}

VectorPath simulate_multi_ou(const MultiOuParams& params, double dt, int steps,
                             std::uint64_t seed) {
    const auto n = params.beta.rows();
    if (params.beta.cols() != n || params.mu.size() != n || params.R0.size() != n ||
        params.sigma_chol.rows() != n || params.sigma_chol.cols() != n)
        throw std::invalid_argument("multi-OU parameter dimensions are inconsistent");
    if (!(dt > 0.0)) throw std::domain_error("dt must be positive");

    Rng rng = Rng(seed).stream(4);
    VectorPath path;
    path.t.resize(steps + 1);
    path.r.resize(steps + 1);
    const double sq_dt = std::sqrt(dt);
    Eigen::VectorXd r = params.R0;
    Eigen::VectorXd dw(n);
    path.t[0] = 0.0;
    path.r[0] = r;
    for (int k = 1; k <= steps; ++k) {
        for (Eigen::Index i = 0; i < n; ++i) dw[i] = sq_dt * rng.gaussian();
        r += params.beta * (params.mu - r) * dt + params.sigma_chol * dw;
        path.t[k] = k * dt;
        path.r[k] = r;
    }
    return path;
}

std::vector<OrderEvent> simulate_order_flow(const OrderFlowParams& params, double horizon_min,
                                            std::uint64_t seed) {
    if (!(params.lambda > 0.0)) throw std::domain_error("arrival intensity must be positive");
    if (!(params.p_buy > 0.0 && params.p_buy < 1.0))
        throw std::domain_error("buy probability must be in (0,1)");
    if (!(horizon_min > 0.0)) throw std::domain_error("horizon must be positive");

    Rng base(seed);
    Rng rt = base.stream(5);  // arrival times
    Rng rs = base.stream(6);  // sides
    Rng rz = base.stream(7);  // sizes

    std::vector<OrderEvent> events;
    double t = rt.exponential(params.lambda);
    while (t < horizon_min) {
        OrderEvent e;
        e.time = t;
        e.is_buy = rs.bernoulli(params.p_buy);
        e.size_x = std::max(0.0, rz.gaussian(params.mu_size, params.xi_size));
        events.push_back(e);
        t += rt.exponential(params.lambda);
    }
    return events;
}

Path2 simulate_depth(const ModelIIParams& params, double dt, int steps, std::uint64_t seed) {
    if (!(dt > 0.0) || steps < 0) throw std::domain_error("dt must be positive");
    Rng base(seed);
    Rng rb = base.stream(8);  // drives B (rate)
    Rng rl = base.stream(9);  // drives L (depth)

    Path2 path;
    path.t.resize(steps + 1);
    path.a.resize(steps + 1);
    path.b.resize(steps + 1);
    const double sq_dt = std::sqrt(dt);
    double z = params.Z0;
    double kappa = params.kappa0;
    path.t[0] = 0.0;
    path.a[0] = z;
    path.b[0] = kappa;
    for (int k = 1; k <= steps; ++k) {
        z *= std::exp(-0.5 * params.gamma * params.gamma * dt + params.gamma * sq_dt * rb.gaussian());
        kappa *= std::exp(-0.5 * params.varsigma * params.varsigma * dt +
                          params.varsigma * sq_dt * rl.gaussian());
        path.t[k] = k * dt;
        path.a[k] = z;
        path.b[k] = kappa;
    }
    return path;
}

double model1_mean_z(const ModelIParams& params, double t) {
    // E[S_t] = S0, so E[Z_t] = Z0 e^{-beta t} + S0 (1 - e^{-beta t}).
    const double e = std::exp(-params.beta * t);
    return params.Z0 * e + params.S0 * (1.0 - e);
}

double cir_mean(const CirParams& params, double t) {
    const double e = std::exp(-params.Gamma * t);
    return params.pi_bar + (params.pi_tilde0 - params.pi_bar) * e;
}

Eigen::VectorXd multi_ou_mean(const MultiOuParams& params, double t) {
    const Eigen::MatrixXd e = (-params.beta * t).exp();
    return params.mu + e * (params.R0 - params.mu);
}

}  // namespace amm
