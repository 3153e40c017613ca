#pragma once

#include <Eigen/Dense>
#include <vector>

#include "amm/dynamics.hpp"

namespace amm {

struct OlsFit {
    Eigen::VectorXd coefficients;
    Eigen::VectorXd standard_errors;
    double r_squared = 0.0;
    double residual_variance = 0.0;
};

// Least squares of y on the columns of X (no implicit intercept).
OlsFit ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

struct Model1Estimate {
    double sigma = 0.0, sigma_se = 0.0;
    double gamma = 0.0, gamma_se = 0.0;
    double beta = 0.0, beta_se = 0.0;
};

// OLS on the discretised dynamics: sigma from the s.d. of oracle log
// returns; (beta, gamma) from the regression of pool log returns on the
// relative spread (S-Z)/Z with the -gamma^2/2 dt intercept imposed by a
// two-pass iteration.
Model1Estimate estimate_model1(const std::vector<double>& s_path,
                               const std::vector<double>& z_path, double dt);

// pi = fee_tier * volume / (2 kappa sqrt(Z)), per day when the volume covers
// one day.
double pool_fee_rate(double volume_24h, double kappa, double rate, double fee_tier);

struct VarModel {
    Eigen::VectorXd intercept;
    std::vector<Eigen::MatrixXd> phi;  // lag matrices Phi_1..Phi_k
    Eigen::MatrixXd sigma;             // innovation covariance
    int observations = 0;
};

// Equation-by-equation least squares VAR(k) on the rows of the series.
VarModel fit_var(const Eigen::MatrixXd& series, int lags);

// First-order Euler identification of a VAR(1) fitted on levels:
//   beta = (I - Phi_1)/dt, mu = (I - Phi_1)^{-1} a, Sigma_ou = Sigma/dt.
MultiOuParams var1_to_multi_ou(const VarModel& model, double dt);

double companion_spectral_radius(const VarModel& model);

struct SpilloverReport {
    double tsi = 0.0;  // percent
    Eigen::VectorXd dsi_to;    // spillovers transmitted by each variable
    Eigen::VectorXd dsi_from;  // spillovers received by each variable
    Eigen::VectorXd nsi;
    Eigen::MatrixXd fevd;             // generalised FEVD before normalisation
    Eigen::MatrixXd fevd_normalized;  // rows sum to one
    int horizon = 0;
};

// Generalised FEVD with the standard KPPS denominator (sum of unsquared
// quadratic forms); the printed squared-denominator variant fails the
// simulation oracle and is not used.
SpilloverReport spillover(const VarModel& model, int horizon);

struct MacdResult {
    std::vector<double> ema12;
    std::vector<double> ema26;
    std::vector<double> macd;           // ema12 - ema26
    std::vector<double> macd_smoothed;  // EMA of the MACD with span n
};

std::vector<double> ema(const std::vector<double>& series, int span);
MacdResult compute_macd(const std::vector<double>& series, int span_n);

}  // namespace amm
