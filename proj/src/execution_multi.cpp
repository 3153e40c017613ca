#include "amm/execution_multi.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unsupported/Eigen/MatrixFunctions>

namespace amm {

namespace {

struct Sys {
    const MultiConfig* cfg;
    Eigen::MatrixXd x_sel;         // n x (2n+m)
    Eigen::MatrixXd beta;          // (2n+m) x (2n+m)
    Eigen::MatrixXd sigma_tilde;   // n x n
    Eigen::VectorXd inv_eta_zeta;  // n
};

void rhs(const Sys& s, const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, Eigen::MatrixXd& da,
         Eigen::MatrixXd& db) {
    const Eigen::MatrixXd adinv = a * s.inv_eta_zeta.asDiagonal();  // A D(zeta)^{-1} / eta
    da = s.cfg->phi * s.sigma_tilde - adinv * a;
    db = (s.x_sel + b) * s.beta - adinv * b;
}

void rk4_step(const Sys& s, double h, Eigen::MatrixXd& a, Eigen::MatrixXd& b) {
    Eigen::MatrixXd k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b;
    rhs(s, a, b, k1a, k1b);
    rhs(s, a + 0.5 * h * k1a, b + 0.5 * h * k1b, k2a, k2b);
    rhs(s, a + 0.5 * h * k2a, b + 0.5 * h * k2b, k3a, k3b);
    rhs(s, a + h * k3a, b + h * k3b, k4a, k4b);
    a += h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
    b += h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b);
}

Sys make_system(const MultiConfig& config, const Eigen::VectorXd& zeta,
                const Eigen::MatrixXd& beta, const Eigen::MatrixXd& sigma_tilde) {
    const auto n = config.alpha.rows();
    const auto dim = beta.rows();
    if (config.alpha.cols() != n || sigma_tilde.rows() != n || sigma_tilde.cols() != n ||
        zeta.size() != n || beta.cols() != dim || dim < n)
        throw std::invalid_argument("inconsistent multi-asset dimensions");
    if ((zeta.array() <= 0.0).any()) throw std::domain_error("zeta must be positive");
    Sys s;
    s.cfg = &config;
    s.beta = beta;
    s.sigma_tilde = sigma_tilde;
    s.x_sel = Eigen::MatrixXd::Zero(n, dim);
    for (Eigen::Index i = 0; i < n; ++i) s.x_sel(i, i) = 1.0;
    s.inv_eta_zeta = (config.eta * zeta.array()).inverse();
    return s;
}

double layer_scale_multi(const MultiConfig& config, const Eigen::VectorXd& zeta) {
    const double a_scale = std::max(config.alpha.diagonal().maxCoeff(), 1e-12);
    return config.eta * zeta.minCoeff() / a_scale;
}

}  // namespace

MatrixCoefficients::Value MatrixCoefficients::interpolate(double t_query) const {
    Value v;
    double tq = t_query;
    if (tq < t.front()) { tq = t.front(); v.clamped = true; }
    if (tq > t.back()) { tq = t.back(); v.clamped = true; }
    const auto it = std::upper_bound(t.begin(), t.end(), tq);
    std::size_t ti = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, it - t.begin() - 1));
    if (ti >= t.size() - 1) ti = t.size() - 2;
    const double w = (tq - t[ti]) / (t[ti + 1] - t[ti]);
    v.a = (1.0 - w) * a[ti] + w * a[ti + 1];
    v.b = (1.0 - w) * b[ti] + w * b[ti + 1];
    return v;
}

MatrixCoefficients solve_matrix_coefficients(const MultiConfig& config,
                                             const Eigen::VectorXd& zeta,
                                             const Eigen::MatrixXd& beta,
                                             const Eigen::MatrixXd& sigma_tilde, int t_steps) {
    const Sys sys = make_system(config, zeta, beta, sigma_tilde);
    const auto n = config.alpha.rows();
    const auto dim = beta.rows();

    MatrixCoefficients out;
    out.zeta = zeta;
    out.eta = config.eta;
    out.t.resize(t_steps + 1);
    out.a.resize(t_steps + 1);
    out.b.resize(t_steps + 1);
    for (int k = 0; k <= t_steps; ++k)
        out.t[k] = config.T * static_cast<double>(k) / t_steps;

    const double eps0 = layer_scale_multi(config, zeta);
    const double frac = 0.01;
    Eigen::MatrixXd a = -config.alpha;
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, dim);
    out.a[t_steps] = a;
    out.b[t_steps] = b;
    double t = config.T;
    for (int k = t_steps - 1; k >= 0; --k) {
        const double target = out.t[k];
        while (t > target) {
            const double h_max = frac * (config.T - t + eps0);
            const double h = std::min(t - target, std::max(h_max, 1e-14));
            rk4_step(sys, -h, a, b);
            t -= h;
        }
        t = target;
        out.a[k] = 0.5 * (a + a.transpose());  // keep A exactly symmetric
        out.b[k] = b;
        a = out.a[k];
    }
    return out;
}

Eigen::VectorXd closed_form_speed_multi(double t, const Eigen::VectorXd& y,
                                        const Eigen::VectorXd& r, const Eigen::VectorXd& mu,
                                        const MatrixCoefficients& coeffs,
                                        const Eigen::VectorXd& kappa, double eta) {
    const auto n = y.size();
    if (kappa.size() != n || r.size() != coeffs.b.front().cols() || mu.size() != r.size())
        throw std::invalid_argument("inconsistent speed evaluation dimensions");
    const auto v = coeffs.interpolate(t);
    Eigen::VectorXd zeta_now(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!(r[i] > 0.0)) throw std::domain_error("pool rates must be positive");
        zeta_now[i] = std::pow(r[i], 1.5) / kappa[i];
    }
    const Eigen::VectorXd rhs = v.b * (mu - r) - 2.0 * v.a * y;
    return (rhs.array() / (2.0 * eta * zeta_now.array())).matrix();
}

Eigen::MatrixXd b_time_ordered_exponential(const MultiConfig& config,
                                           const Eigen::VectorXd& zeta,
                                           const Eigen::MatrixXd& beta,
                                           const Eigen::MatrixXd& sigma_tilde, double t,
                                           int steps) {
    // vec(B)' = M(s) vec(B) + c with M = beta' kron I_n - I_dim kron (A D /eta)
    // and c = vec(X beta); propagate backward from B(T) = 0 with a frozen
    // matrix exponential on each short interval (graded towards T).
    const Sys sys = make_system(config, zeta, beta, sigma_tilde);
    const auto n = config.alpha.rows();
    const auto dim = beta.rows();
    const auto nb = n * dim;

    // A path on a grid blending terminal-layer grading with uniform nodes,
    // solved independently of B.
    const double eps0 = layer_scale_multi(config, zeta);
    std::vector<double> s_desc;
    {
        const int half = steps / 2;
        std::vector<double> nodes;
        const double u_hi = 1.0 / eps0;
        const double u_lo = 1.0 / (config.T - t + eps0);
        for (int k = 0; k <= half; ++k) {
            const double u = u_hi + (u_lo - u_hi) * static_cast<double>(k) / half;
            nodes.push_back(config.T + eps0 - 1.0 / u);
        }
        for (int k = 0; k <= half; ++k)
            nodes.push_back(t + (config.T - t) * static_cast<double>(k) / half);
        std::sort(nodes.begin(), nodes.end(), std::greater<double>());
        nodes.front() = config.T;
        nodes.back() = t;
        s_desc = std::move(nodes);
    }
    const int n_nodes = static_cast<int>(s_desc.size()) - 1;

    std::vector<Eigen::MatrixXd> a_path(n_nodes + 1);
    {
        Eigen::MatrixXd a = -config.alpha;
        Eigen::MatrixXd bdummy = Eigen::MatrixXd::Zero(n, dim);
        double tc = config.T;
        a_path[0] = a;
        const double frac = 0.01;
        for (int k = 1; k <= n_nodes; ++k) {
            const double target = s_desc[k];
            while (tc > target) {
                const double h_max = frac * (config.T - tc + eps0);
                const double h = std::min(tc - target, std::max(h_max, 1e-14));
                rk4_step(sys, -h, a, bdummy);
                tc -= h;
            }
            tc = target;
            a_path[k] = a;
        }
    }

    const Eigen::MatrixXd xbeta = sys.x_sel * beta;
    const Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(xbeta.data(), nb);
    const Eigen::MatrixXd id_n = Eigen::MatrixXd::Identity(n, n);

    Eigen::VectorXd vb = Eigen::VectorXd::Zero(nb);
    for (int k = 1; k <= n_nodes; ++k) {
        const double h = s_desc[k - 1] - s_desc[k];
        if (!(h > 0.0)) continue;
        const Eigen::MatrixXd a_mid = 0.5 * (a_path[k - 1] + a_path[k]);
        const Eigen::MatrixXd adinv = a_mid * sys.inv_eta_zeta.asDiagonal();
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(nb, nb);
        // kron(beta^T, I_n): block (p, q) of size n x n equals beta(q, p) I_n.
        for (Eigen::Index p = 0; p < dim; ++p)
            for (Eigen::Index q = 0; q < dim; ++q) {
                m.block(p * n, q * n, n, n) = beta(q, p) * id_n;
                if (p == q) m.block(p * n, q * n, n, n) -= adinv;
            }
        // Backward step: vb(s - h) = e^{-hM} vb(s) - (int_0^h e^{-uM} du) c,
        // with the integral read off an augmented matrix exponential.
        Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(2 * nb, 2 * nb);
        aug.topLeftCorner(nb, nb) = -m;
        aug.topRightCorner(nb, nb) = Eigen::MatrixXd::Identity(nb, nb);
        const Eigen::MatrixXd eaug = (h * aug).exp();
        const Eigen::MatrixXd em = eaug.topLeftCorner(nb, nb);
        const Eigen::MatrixXd phi1 = eaug.topRightCorner(nb, nb);
        vb = em * vb - phi1 * c;
    }
    return Eigen::Map<Eigen::MatrixXd>(vb.data(), n, dim);
}

}  // namespace amm
