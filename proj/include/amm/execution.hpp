#pragma once

#include <vector>

namespace amm {

struct LiquidationConfig {
    double T = 0.0;      // horizon, days
    double phi = 0.0;    // running inventory penalty
    double alpha = 0.0;  // terminal penalty, > 0
    double eta = 0.0;    // trading-frequency scale, days
    double kappa = 0.0;  // pool depth
    double y0 = 0.0;     // initial inventory
};

// A(t,Z), B(t,Z) solving, for each Z with zeta = Z^{3/2}/kappa,
//   A' = phi - A^2/(eta zeta),          A(T) = -alpha,
//   B' = beta + beta B - A B/(eta zeta), B(T) = 0.
// The ODE system is the authoritative definition; the integration is a
// backward RK4 on a grid graded towards T where A has a boundary layer of
// width ~ eta*zeta/alpha.
struct ScalarCoefficients {
    std::vector<double> t;       // ascending, t.front() = 0, t.back() = T
    std::vector<double> z;       // ascending
    std::vector<double> a;       // row-major [t][z]
    std::vector<double> b;
    double phi = 0.0, alpha = 0.0, eta = 0.0, kappa = 0.0, beta = 0.0, T = 0.0;

    double a_at(std::size_t ti, std::size_t zi) const { return a[ti * z.size() + zi]; }
    double b_at(std::size_t ti, std::size_t zi) const { return b[ti * z.size() + zi]; }

    struct Value {
        double a = 0.0;
        double b = 0.0;
        bool clamped = false;
    };
    // Bilinear interpolation, clamped outside the grid.
    Value interpolate(double t_query, double z_query) const;
};

ScalarCoefficients solve_scalar_coefficients(const LiquidationConfig& config, double beta,
                                             const std::vector<double>& z_grid,
                                             int t_steps = 256);

// Same solve but storing every node of the graded integration grid, so that
// a second-order finite-difference residual check passes at tight tolerance.
ScalarCoefficients solve_scalar_coefficients_dense(const LiquidationConfig& config, double beta,
                                                   const std::vector<double>& z_grid,
                                                   int nodes = 200000);

// A and B for a single fixed impact parameter zeta, evaluated at time t.
struct AbPair {
    double a = 0.0;
    double b = 0.0;
};
AbPair scalar_ab_at(const LiquidationConfig& config, double beta, double zeta, double t);

struct SpeedResult {
    double nu = 0.0;
    bool clamped = false;
};

// nu = -(kappa/eta) Z^{-3/2} A(t,Z) y + (kappa/2 eta) Z^{-3/2} B(t,Z) (S - Z).
// Positive nu sells asset Y, negative nu buys it.
SpeedResult closed_form_speed(double t, double y, double z, double s,
                              const ScalarCoefficients& coeffs, const LiquidationConfig& config);

// Piecewise strategy: constant-impact speed of the strip containing Z on an
// N-part uniform partition of [z_low, z_high].
double piecewise_speed(double t, double y, double z, double s, int n_strips, double z_low,
                       double z_high, const LiquidationConfig& config, double beta);
// Strip index used by piecewise_speed (exposed for the convergence tests).
int piecewise_strip(double z, int n_strips, double z_low, double z_high);

enum class BenchmarkKind { Twap, SingleOrder, AlmgrenChriss };

// TWAP trades y0/T; single-order liquidates all remaining inventory within
// one step of length step_dt; Almgren-Chriss is the closed form with B = 0.
double benchmark_speed(BenchmarkKind kind, double t, double y, double z,
                       const ScalarCoefficients& coeffs, const LiquidationConfig& config,
                       double step_dt);

// Corrected integral representation of B (quadrature over the A path),
// used as an independent oracle for the ODE route:
//   B(t) = -int_t^T beta exp(-int_t^s (beta - A(u)/(eta zeta)) du) ds.
double b_quadrature_oracle(const LiquidationConfig& config, double beta, double zeta, double t,
                           int quad_nodes = 20000);

}  // namespace amm
