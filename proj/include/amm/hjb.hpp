#pragma once

#include <cstddef>
#include <vector>

#include "amm/dynamics.hpp"
#include "amm/execution.hpp"

namespace amm {

struct Grid3D {
    std::vector<double> t;  // uniform on [0, T]
    std::vector<double> u;  // first space axis (Z)
    std::vector<double> v;  // second space axis (S for Model I, kappa for Model II)

    static Grid3D make(double T, int nt, double u_lo, double u_hi, int nu, double v_lo,
                       double v_hi, int nv);
};

// Value-function components theta(t, y, u, v) = theta0 + theta1 y + theta2 y^2
// on the grid; arrays are indexed [ti][ui][vi].
struct PdeSolution {
    Grid3D grid;
    std::vector<double> theta0, theta1, theta2;
    std::vector<int> picard_iterations;  // per backward time level
    double final_picard_residual = 0.0;

    std::size_t idx(std::size_t ti, std::size_t ui, std::size_t vi) const {
        return (ti * grid.u.size() + ui) * grid.v.size() + vi;
    }
};

struct HjbOptions {
    double picard_tol = 1e-8;
    int picard_max_iters = 50;
    // The terminal condition theta2 = -alpha relaxes on a fast scale
    // eta*zeta/alpha; the first stored step is internally substepped to
    // resolve it.
    int terminal_substeps = 64;
};

// Model I on (Z, S): theta2 solves the semilinear PDE
//   -d_t th2 = -phi + beta (S-Z) d_Z th2 + (gamma^2 Z^2 /2) d_ZZ th2
//              + (sigma^2 S^2 /2) d_SS th2 + (kappa/eta) Z^{-3/2} th2^2
// with Picard linearisation of the quadratic term; theta1, theta0 follow as
// linear PDEs. Neumann boundaries on both space axes.
PdeSolution solve_model1_pde(const ModelIParams& params, const LiquidationConfig& config,
                             const Grid3D& grid, const HjbOptions& options = {});

// Model II on (Z, kappa): same structure without drift; theta1 and theta0
// come out identically zero.
PdeSolution solve_model2_pde(const ModelIIParams& params, const LiquidationConfig& config,
                             const Grid3D& grid, const HjbOptions& options = {});

enum class HjbModel { ModelI, ModelII };

// nu = -(kappa/(2 eta)) Z^{-3/2} (2 theta2 y + theta1); for Model II the
// depth is the second grid coordinate, for Model I it is config.kappa.
SpeedResult feedback_speed_from_solution(const PdeSolution& sol, HjbModel which,
                                         const LiquidationConfig& config, double t, double y,
                                         double u, double v);

struct BoundsReport {
    double lower_violation = 0.0;   // max over nodes of (lower - theta2)+
    double upper_violation = 0.0;   // max over nodes of (theta2 - upper)+
    double theta1_lower_violation = 0.0;
    double theta1_upper_violation = 0.0;
    double theta0_lower_violation = 0.0;
    double theta0_upper_violation = 0.0;
};

// Model II: -alpha - phi (T - t) <= theta2 <= 0. Model I: quadratic Merton
// envelopes computed from their own linear ODE system.
BoundsReport verify_bounds(const PdeSolution& sol, HjbModel which, const ModelIParams& params,
                           const LiquidationConfig& config);

// Merton envelope coefficients A, B, C for the Model I bounds, solved by RK4:
//   A' = -sigma^2 A - beta^2/(4 phi) - beta B / 2,  A(T) = 0
//   B' =  beta B + beta^2/phi - 4 beta C,           B(T) = 0
//   C' = -(gamma^2 - 2 beta) C - beta^2/(4 phi),    C(T) = 0.
struct MertonCoefficients {
    double a = 0.0, b = 0.0, c = 0.0;
};
MertonCoefficients merton_envelope(const ModelIParams& params, const LiquidationConfig& config,
                                   double t);
// Closed form for C, used to cross-check the ODE route.
double merton_c_closed_form(const ModelIParams& params, const LiquidationConfig& config, double t);

}  // namespace amm
