#pragma once

#include <Eigen/Dense>
#include <vector>

namespace amm {

// Multi-asset liquidation over n pools with a (2n+m)-dimensional state
// vector R = (Z, S, I). The running penalty is phi * y' Sigma_tilde y and
// the terminal penalty y' alpha y.
struct MultiConfig {
    double T = 0.0;
    double phi = 0.0;
    double eta = 0.0;
    Eigen::MatrixXd alpha;  // n x n, positive diagonal
};

// A(t) (n x n, symmetric) and B(t) (n x (2n+m)) solving
//   A' = phi Sigma_tilde - (1/eta) A D(zeta)^{-1} A,      A(T) = -alpha,
//   B' = (X + B) beta    - (1/eta) A D(zeta)^{-1} B,      B(T) = 0,
// where X selects the first n coordinates and beta is the mean-reversion
// matrix of dR = beta (mu - R) dt + sigma' dW. Backward RK4 on a grid graded
// towards T.
struct MatrixCoefficients {
    std::vector<double> t;  // ascending
    std::vector<Eigen::MatrixXd> a;
    std::vector<Eigen::MatrixXd> b;
    Eigen::VectorXd zeta;
    double eta = 0.0;

    struct Value {
        Eigen::MatrixXd a;
        Eigen::MatrixXd b;
        bool clamped = false;
    };
    Value interpolate(double t_query) const;
};

MatrixCoefficients solve_matrix_coefficients(const MultiConfig& config,
                                             const Eigen::VectorXd& zeta,
                                             const Eigen::MatrixXd& beta,
                                             const Eigen::MatrixXd& sigma_tilde,
                                             int t_steps = 512);

// nu = (1/(2 eta)) D(zeta_now)^{-1} (B (mu - R) - 2 A y) with zeta_now
// evaluated at the current Z block of R.
Eigen::VectorXd closed_form_speed_multi(double t, const Eigen::VectorXd& y,
                                        const Eigen::VectorXd& r, const Eigen::VectorXd& mu,
                                        const MatrixCoefficients& coeffs,
                                        const Eigen::VectorXd& kappa, double eta);

// Independent oracle for B: the time-ordered exponential realised as a
// product of short-interval matrix exponentials on the vectorised linear ODE.
Eigen::MatrixXd b_time_ordered_exponential(const MultiConfig& config,
                                           const Eigen::VectorXd& zeta,
                                           const Eigen::MatrixXd& beta,
                                           const Eigen::MatrixXd& sigma_tilde, double t,
                                           int steps = 2000);

}  // namespace amm
