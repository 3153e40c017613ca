#pragma once

#include <utility>
#include <vector>

#include "amm/pool.hpp"

namespace amm {

struct LpParams {
    double gamma_c = 0.0;      // concentration cost, day^-1
    double sigma = 0.0;        // rate volatility, day^-1/2
    double zeta_rebal = 0.0;   // proportional rebalancing cost (enters as mu - zeta)
    double epsilon = 1e-4;     // profitability margin, day^-1
    double mu = 0.0;           // rate drift, day^-1
};

struct SpreadQuote {
    double delta_l = 0.0;
    double delta_u = 0.0;
    double z_l = 0.0;
    double z_u = 0.0;   // +inf for the maximal range
    bool viable = false;
    bool full_range = false;  // clamped to delta_l = delta_u = 2
    bool refused = false;     // |mu| > 1, provision refused
    double spread() const { return delta_l + delta_u; }
};

// delta* = (2 gamma + mu^2 sigma^2) / (4 pi - sigma^2/2 + mu (mu - sigma^2/2)),
// split as delta_u = delta/2 + mu, delta_l = delta/2 - mu; range bounds from
// sqrt(Z_u) = sqrt(Z)/(1 - delta_u/2), sqrt(Z_l) = sqrt(Z) (1 - delta_l/2).
SpreadQuote optimal_spread(double pi, const LpParams& params, double rate = 1.0);

struct Asymmetry {
    double rho = 0.5;
    bool admissible = true;  // rho in (0,1)
};
Asymmetry position_asymmetry(double delta, double mu);

struct ViabilityReport {
    bool profitability_ok = false;  // 4 pi - sigma^2/2 + mu(mu - sigma^2/2) >= epsilon
    double profitability_margin = 0.0;
    bool range_ok = false;          // pi - gamma/8 >= drift-adjusted depreciation
    double range_margin = 0.0;
    bool spread_ok = false;         // 2|mu| <= delta* <= 4 - 2|mu|
    bool mu_ok = false;             // |mu| <= 1
    double rule_of_thumb = 0.0;     // sigma^2 / 8
    bool all_ok = false;
};
ViabilityReport viability_check(double pi, const LpParams& params);

struct LpWealthState {
    double V = 0.0;
    double alpha_pos = 0.0;  // position value leg
    double fees = 0.0;       // cumulative fee income leg
    double costs = 0.0;      // cumulative rebalancing cost leg
    bool ruined = false;
};
LpWealthState make_lp_wealth(double v0);

// Euler update of V = alpha + p + c with the realised rate return replacing
// the sigma dW shock; rate_return = dZ/Z over the step.
LpWealthState lp_wealth_step(const LpWealthState& state, const SpreadQuote& quote,
                             double rate_return, double pi, const LpParams& params, double dt);

// Grid argmax of the Hamiltonian term
//   g(d) = (4 pi_tilde + 4 eta - sigma^2/2)/d + mu^2/d
//          - (sigma^2/2)(mu^2/d^2 + mu/d) - gamma/d^2,
// the independent oracle for optimal_spread.
double hamiltonian_argmax(double pi_tilde, const LpParams& params,
                          const std::vector<double>& delta_grid);

struct ConcentrationFit {
    double gamma_c = 0.0;
    double pi = 0.0;
};
// Least squares on delta^2 p_hat = 4 pi m delta - gamma m.
ConcentrationFit fit_concentration_cost(const std::vector<std::pair<double, double>>& samples,
                                        double m);

struct TickRange {
    Tick lower;
    Tick upper;
    bool full_range = false;
};
// Z_l rounds down to the nearest tick and Z_u rounds up, so the tick range
// strictly contains the quoted rate.
TickRange spread_to_ticks(const SpreadQuote& quote, double rate);

}  // namespace amm
