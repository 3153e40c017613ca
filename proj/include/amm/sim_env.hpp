#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "amm/dynamics.hpp"
#include "amm/pool.hpp"

namespace amm {

struct EnvPoolConfig {
    OrderFlowParams flow;
    double kappa_rest = 0.0;  // aggregated depth of the other LPs, constant
    double tau = 0.0;         // fee tier
    double Z0 = 0.0;
};

struct EnvConfig {
    std::vector<EnvPoolConfig> pools;
    double dt_min = 30.0;     // repositioning interval, minutes
    double T_min = 1440.0;    // horizon, minutes
    double V0 = 0.0;          // initial wealth, units of X
    int max_spread = 500;     // maximal lower/upper spread in ticks
    double gas_per_adjust = 0.0;  // units of X per adjusted pool
};

struct EnvAction {
    std::vector<double> weights;  // simplex over pools
    std::vector<int> lower;       // ticks below the active tick
    std::vector<int> upper;       // ticks above the active tick

    bool operator==(const EnvAction&) const = default;
};

struct EnvPoolState {
    double rate = 0.0;
    int active_tick = 0;
    double x_hold = 0.0;          // agent holdings in the pool
    double y_hold = 0.0;
    double fees_accrued = 0.0;    // agent fees over the last interval
    double kappa_tilde = 0.0;
    int pos_lower_tick = 0;
    int pos_upper_tick = 0;
    bool has_position = false;
    double weight = 0.0;          // action components backing the position
    int lower_spread = 0;
    int upper_spread = 0;
    double fees_rest_cum = 0.0;   // other LPs' fees, for conservation checks
    double fees_charged_cum = 0.0;
};

struct EnvState {
    std::vector<EnvPoolState> pools;
    double cash = 0.0;  // frictionless rebalancing account
    double t_min = 0.0;
    bool terminated = false;
    std::uint64_t seed = 0;
    int step_count = 0;

    // Mark-to-market wealth: cash + sum of holdings and accrued fees.
    double wealth() const;
};

struct EnvStepInfo {
    double gas_paid = 0.0;
    double fees_earned = 0.0;         // agent, this step
    double fees_rest = 0.0;           // other LPs, this step
    double fees_charged = 0.0;        // total charged to takers, this step
    int pools_adjusted = 0;
    bool terminated = false;
};

EnvState env_reset(const EnvConfig& config, std::uint64_t seed);

// One repositioning interval: withdraw/deposit per the action (skipping
// pools whose action is unchanged), replay the Poisson order flow against
// rest + agent depth, update holdings and accrue fees.
EnvStepInfo env_step(const EnvConfig& config, EnvState& state, const EnvAction& action);

struct EnvTrajectoryRow {
    double t_min = 0.0;
    std::vector<double> rate;
    std::vector<int> lower, upper;
    std::vector<double> weight;
    std::vector<double> fees;
    double wealth = 0.0;
};

struct EpisodeResult {
    std::vector<EnvTrajectoryRow> trajectory;
    double terminal_wealth = 0.0;
    bool terminated_early = false;
};

using EnvStrategy = std::function<EnvAction(const EnvState&, const EnvConfig&)>;

EpisodeResult run_episode(const EnvConfig& config, const EnvStrategy& strategy,
                          std::uint64_t seed);

enum class CriterionKind { Sharpe, MeanVariance };

// Sharpe: (E[V_T] - V0)/sd(V_T); mean-variance: E[V_T] - gamma Var(V_T).
double criterion(const std::vector<double>& terminal_wealths, CriterionKind kind, double gamma_mv,
                 double v0);

}  // namespace amm
