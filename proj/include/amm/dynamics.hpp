#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "amm/rng.hpp"

namespace amm {

// Time is measured in days throughout, matching the units of the estimated
// parameters (volatilities in day^{-1/2}, mean-reversion speeds in day^{-1}).

struct ModelIParams {
    double sigma = 0.0;  // oracle volatility
    double beta = 0.0;   // mean-reversion speed of Z towards S
    double gamma = 0.0;  // pool-rate dispersion
    double S0 = 0.0;
    double Z0 = 0.0;
};

struct ModelIIParams {
    double gamma = 0.0;    // rate volatility
    double varsigma = 0.0; // depth volatility
    double Z0 = 0.0;
    double kappa0 = 0.0;
};

struct CirParams {
    double Gamma = 0.0;      // mean-reversion speed
    double pi_bar = 0.0;     // long-term mean of pi - eta
    double psi = 0.0;        // volatility
    double pi_tilde0 = 0.0;  // initial pi - eta
};

struct MultiOuParams {
    Eigen::MatrixXd beta;        // mean-reversion matrix
    Eigen::VectorXd mu;          // long-term mean
    Eigen::MatrixXd sigma_chol;  // lower Cholesky factor of the covariance
    Eigen::VectorXd R0;
};

struct OrderFlowParams {
    double lambda = 0.0;   // arrival intensity, per minute
    double p_buy = 0.5;    // buy probability
    double mu_size = 0.0;  // order size mean, units of X
    double xi_size = 0.0;  // order size s.d.
};

struct Path2 {
    std::vector<double> t;
    std::vector<double> a;
    std::vector<double> b;
};

struct Path1 {
    std::vector<double> t;
    std::vector<double> a;
};

struct VectorPath {
    std::vector<double> t;
    std::vector<Eigen::VectorXd> r;
};

struct OrderEvent {
    double time = 0.0;  // minutes from the start
    bool is_buy = false;
    double size_x = 0.0;  // units of X, truncated below at zero
};

// dS = sigma S dW (log-Euler), dZ = beta (S - Z) dt + gamma Z dB (Euler,
// floored at a tiny positive value). W and B come from disjoint streams.
Path2 simulate_model1(const ModelIParams& params, double dt, int steps, std::uint64_t seed);

// Full-truncation Euler scheme for the CIR-type fee rate; the returned path
// is nonnegative.
Path1 simulate_cir(const CirParams& params, double dt, int steps, std::uint64_t seed);

// dR = beta (mu - R) dt + sigma_chol dW, Euler scheme.
VectorPath simulate_multi_ou(const MultiOuParams& params, double dt, int steps,
                             std::uint64_t seed);

// Poisson arrivals, Bernoulli sides, normal sizes clamped at zero.
std::vector<OrderEvent> simulate_order_flow(const OrderFlowParams& params, double horizon_min,
                                            std::uint64_t seed);

// dZ = gamma Z dB, dkappa = varsigma kappa dL (both log-Euler, independent).
Path2 simulate_depth(const ModelIIParams& params, double dt, int steps, std::uint64_t seed);

// Conditional mean oracles used by the tests.
double model1_mean_z(const ModelIParams& params, double t);
double cir_mean(const CirParams& params, double t);
Eigen::VectorXd multi_ou_mean(const MultiOuParams& params, double t);

}  // namespace amm
