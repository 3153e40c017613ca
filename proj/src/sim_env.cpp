#include "amm/sim_env.hpp"

#include <cmath>
#include <stdexcept>

namespace amm {

namespace {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::uint64_t x = seed + 0x9e3779b97f4a7c15ULL * (a + 1) + 0xbf58476d1ce4e5b9ULL * (b + 1);
    x ^= x >> 30;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 27;
    return x;
}

void validate_action(const EnvConfig& config, const EnvAction& action) {
    const std::size_t n = config.pools.size();
    if (action.weights.size() != n || action.lower.size() != n || action.upper.size() != n)
        throw std::invalid_argument("action dimensions do not match the pool count");
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (action.weights[i] < 0.0) throw std::domain_error("weights must be nonnegative");
        if (action.lower[i] < 0 || action.lower[i] > config.max_spread ||
            action.upper[i] < 0 || action.upper[i] > config.max_spread)
            throw std::domain_error("spreads must lie in {0..max_spread}");
        sum += action.weights[i];
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::domain_error("weights must sum to one");
}

}  // namespace

double EnvState::wealth() const {
    double v = cash;
    for (const auto& p : pools) v += p.x_hold + p.y_hold * p.rate + p.fees_accrued;
    return v;
}

EnvState env_reset(const EnvConfig& config, std::uint64_t seed) {
    if (config.pools.empty()) throw std::invalid_argument("need at least one pool");
    if (!(config.V0 > 0.0)) throw std::domain_error("initial wealth must be positive");
    if (!(config.dt_min > 0.0) || !(config.T_min > 0.0))
        throw std::domain_error("time parameters must be positive");
    EnvState s;
    s.pools.resize(config.pools.size());
    for (std::size_t n = 0; n < config.pools.size(); ++n) {
        s.pools[n].rate = config.pools[n].Z0;
        s.pools[n].active_tick = tick_of_rate(config.pools[n].Z0);
    }
    s.cash = config.V0;
    s.seed = seed;
    return s;
}

EnvStepInfo env_step(const EnvConfig& config, EnvState& state, const EnvAction& action) {
    validate_action(config, action);
    EnvStepInfo info;
    if (state.terminated) {
        info.terminated = true;
        return info;
    }

    // Withdraw changed positions, collect fees, charge gas, redeposit.
    std::vector<bool> adjust(config.pools.size());
    for (std::size_t n = 0; n < config.pools.size(); ++n) {
        auto& p = state.pools[n];
        adjust[n] = !p.has_position || p.weight != action.weights[n] ||
                    p.lower_spread != action.lower[n] || p.upper_spread != action.upper[n];
        if (adjust[n]) ++info.pools_adjusted;
    }

    for (std::size_t n = 0; n < config.pools.size(); ++n) {
        if (!adjust[n]) continue;
        auto& p = state.pools[n];
        if (p.has_position) {
            state.cash += p.x_hold + p.y_hold * p.rate + p.fees_accrued;
            p.x_hold = p.y_hold = p.fees_accrued = 0.0;
            p.kappa_tilde = 0.0;
            p.has_position = false;
        }
    }

    info.gas_paid = config.gas_per_adjust * info.pools_adjusted;
    state.cash -= info.gas_paid;
    const double wealth_after_gas = state.wealth();
    if (wealth_after_gas <= 0.0) {
        state.terminated = true;
        info.terminated = true;
        return info;
    }

    for (std::size_t n = 0; n < config.pools.size(); ++n) {
        if (!adjust[n]) continue;
        auto& p = state.pools[n];
        p.weight = action.weights[n];
        p.lower_spread = action.lower[n];
        p.upper_spread = action.upper[n];
        p.active_tick = tick_of_rate(p.rate);
        p.pos_lower_tick = p.active_tick - p.lower_spread;
        p.pos_upper_tick = p.active_tick + p.upper_spread + 1;
        const Tick lo = make_tick(p.pos_lower_tick);
        const Tick hi = make_tick(p.pos_upper_tick);
        p.kappa_tilde = (p.weight > 0.0)
                            ? wealth_to_position_depth(wealth_after_gas, p.weight, p.rate, lo, hi)
                            : 0.0;
        const LiquidityPosition pos{lo, hi, p.kappa_tilde};
        const Holdings h = cl_holdings(pos, p.rate);
        p.x_hold = h.x;
        p.y_hold = h.y;
        state.cash -= h.x + h.y * p.rate;
        p.has_position = true;
    }

    // Replay the order flow interval per pool.
    for (std::size_t n = 0; n < config.pools.size(); ++n) {
        auto& p = state.pools[n];
        const auto& pc = config.pools[n];
        ClPool pool(p.rate, pc.tau);
        pool.set_rest_depth(pc.kappa_rest);
        const LiquidityPosition pos{make_tick(p.pos_lower_tick), make_tick(p.pos_upper_tick),
                                    p.kappa_tilde};
        if (p.has_position && p.kappa_tilde > 0.0) pool.add_position(pos);

        const auto events = simulate_order_flow(
            pc.flow, config.dt_min, mix_seed(state.seed, n, state.step_count));
        for (const auto& e : events) {
            const auto r = pool.swap_for_x(e.is_buy ? Side::BuyY : Side::SellY, e.size_x);
            info.fees_charged += r.fee_total;
            info.fees_rest += r.fee_rest;
            p.fees_rest_cum += r.fee_rest;
            p.fees_charged_cum += r.fee_total;
            if (!r.fee_by_position.empty()) {
                p.fees_accrued += r.fee_by_position[0];
                info.fees_earned += r.fee_by_position[0];
            }
        }
        p.rate = pool.rate();
        p.active_tick = tick_of_rate(p.rate);
        if (p.has_position && p.kappa_tilde > 0.0) {
            const Holdings h = cl_holdings(pos, p.rate);
            p.x_hold = h.x;
            p.y_hold = h.y;
        }
    }

    state.t_min += config.dt_min;
    ++state.step_count;
    return info;
}

EpisodeResult run_episode(const EnvConfig& config, const EnvStrategy& strategy,
                          std::uint64_t seed) {
    EnvState state = env_reset(config, seed);
    EpisodeResult res;
    const int steps = static_cast<int>(std::llround(config.T_min / config.dt_min));
    for (int k = 0; k < steps; ++k) {
        const EnvAction action = strategy(state, config);
        const EnvStepInfo info = env_step(config, state, action);
        EnvTrajectoryRow row;
        row.t_min = state.t_min;
        row.wealth = state.wealth();
        for (const auto& p : state.pools) {
            row.rate.push_back(p.rate);
            row.lower.push_back(p.lower_spread);
            row.upper.push_back(p.upper_spread);
            row.weight.push_back(p.weight);
            row.fees.push_back(p.fees_accrued);
        }
        res.trajectory.push_back(std::move(row));
        if (info.terminated) {
            res.terminated_early = true;
            break;
        }
    }
    res.terminal_wealth = state.wealth();
    return res;
}

double criterion(const std::vector<double>& terminal_wealths, CriterionKind kind, double gamma_mv,
                 double v0) {
    const std::size_t n = terminal_wealths.size();
    if (n < 2) throw std::invalid_argument("need at least two samples");
    double mean = 0.0;
    for (double v : terminal_wealths) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : terminal_wealths) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n - 1);
    if (kind == CriterionKind::Sharpe) {
        if (!(var > 0.0)) throw std::runtime_error("zero variance: Sharpe ratio undefined");
        return (mean - v0) / std::sqrt(var);
    }
    return mean - gamma_mv * var;
}

}  // namespace amm
