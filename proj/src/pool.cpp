#include "amm/pool.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace amm {

namespace {
constexpr double kTickBase = 1.0001;
const double kLogTickBase = std::log(kTickBase);
}  // namespace

PoolState PoolState::from_reserves(double x, double y, double tau) {
    if (!(x > 0.0) || !(y > 0.0)) throw std::domain_error("pool reserves must be positive");
    if (!(tau >= 0.0 && tau < 1.0)) throw std::domain_error("fee tier must be in [0,1)");
    return PoolState{x, y, std::sqrt(x * y), tau};
}

PoolState PoolState::from_rate_depth(double rate, double kappa, double tau) {
    if (!(rate > 0.0) || !(kappa > 0.0)) throw std::domain_error("rate and depth must be positive");
    const double sqrt_rate = std::sqrt(rate);
    return PoolState{kappa * sqrt_rate, kappa / sqrt_rate, kappa, tau};
}

double rate_of_tick(int index) { return std::pow(kTickBase, index); }

int tick_of_rate(double rate) {
    if (!(rate > 0.0)) throw std::domain_error("rate must be positive");
    // Unique i with Z(i) < rate <= Z(i+1); exact boundaries resolve to the
    // interval that has the boundary as its right end.
    int i = static_cast<int>(std::floor(std::log(rate) / kLogTickBase));
    while (rate_of_tick(i) >= rate) --i;
    while (rate_of_tick(i + 1) < rate) ++i;
    return i;
}

Tick make_tick(int index) { return Tick{index, rate_of_tick(index)}; }

double marginal_rate(const PoolState& pool) {
    if (!(pool.x > 0.0) || !(pool.y > 0.0)) throw std::domain_error("invalid pool state");
    return pool.x / pool.y;
}

SwapResult execute_swap(PoolState& pool, Side side, double delta_y) {
    if (delta_y < 0.0) throw std::domain_error("swap size must be nonnegative");
    const double kappa2 = pool.kappa * pool.kappa;
    SwapResult res;
    res.rate_before = pool.x / pool.y;
    res.delta_y = delta_y;
    if (delta_y == 0.0) {
        res.rate_after = res.rate_before;
        return res;
    }
    if (side == Side::SellY) {
        // x y = (x - dx)(y + (1 - tau) dy) = kappa^2
        const double y_new = pool.y + (1.0 - pool.tau) * delta_y;
        const double x_new = kappa2 / y_new;
        res.delta_x = pool.x - x_new;
        res.fee_paid = pool.tau * delta_y * res.rate_before;
        pool.x = x_new;
        pool.y = y_new;
    } else {
        if (delta_y >= pool.y) throw std::runtime_error("swap would deplete pool reserves of Y");
        // x y = (x + (1 - tau) dx)(y - dy) = kappa^2
        const double y_new = pool.y - delta_y;
        const double x_new = kappa2 / y_new;
        res.delta_x = (x_new - pool.x) / (1.0 - pool.tau);
        res.fee_paid = pool.tau * res.delta_x;
        pool.x = x_new;
        pool.y = y_new;
    }
    res.rate_after = pool.x / pool.y;
    res.unitary_cost = std::abs(res.rate_before - res.delta_x / res.delta_y);
    return res;
}

double approx_execution_rate(double rate, double kappa, double nu, double eta) {
    if (!(rate > 0.0) || !(kappa > 0.0) || !(eta > 0.0))
        throw std::domain_error("rate, depth and eta must be positive");
    return rate - (eta / kappa) * std::pow(rate, 1.5) * nu;
}

double approx_unitary_cost(double rate, double kappa, double delta_y) {
    return std::pow(rate, 1.5) * std::abs(delta_y) / kappa;
}

Holdings cl_holdings(const LiquidityPosition& position, double rate) {
    if (!(rate > 0.0)) throw std::domain_error("rate must be positive");
    const double k = position.position_depth;
    const double sl = std::sqrt(position.lower.rate);
    const double su = std::sqrt(position.upper.rate);
    if (rate < position.lower.rate) {
        return Holdings{0.0, k * (1.0 / sl - 1.0 / su)};
    }
    if (rate >= position.upper.rate) {
        return Holdings{k * (su - sl), 0.0};
    }
    const double s = std::sqrt(rate);
    return Holdings{k * (s - sl), k * (1.0 / s - 1.0 / su)};
}

double wealth_to_position_depth(double wealth, double weight, double rate,
                                const Tick& lower, const Tick& upper) {
    if (!(wealth > 0.0) || weight < 0.0) throw std::domain_error("wealth must be positive");
    if (!(lower.rate < rate && rate < upper.rate))
        throw std::domain_error("deposit rate must lie strictly inside the range");
    const double s = std::sqrt(rate);
    const double denom = 2.0 * s - std::sqrt(lower.rate) - rate / std::sqrt(upper.rate);
    return weight * wealth / denom;
}

std::vector<double> distribute_fee(double total_fee,
                                   const std::vector<LiquidityPosition>& positions,
                                   double rate) {
    if (total_fee < 0.0) throw std::domain_error("fee must be nonnegative");
    std::vector<double> out(positions.size(), 0.0);
    if (total_fee == 0.0) return out;
    double active_depth = 0.0;
    for (const auto& p : positions) {
        if (p.lower.rate < rate && rate <= p.upper.rate) active_depth += p.position_depth;
    }
    if (!(active_depth > 0.0))
        throw std::runtime_error("no liquidity at the active rate to earn fees");
    for (std::size_t i = 0; i < positions.size(); ++i) {
        const auto& p = positions[i];
        if (p.lower.rate < rate && rate <= p.upper.rate)
            out[i] = total_fee * p.position_depth / active_depth;
    }
    return out;
}

ClPool::ClPool(double initial_rate, double tau) : tau_(tau) {
    if (!(initial_rate > 0.0)) throw std::domain_error("rate must be positive");
    if (!(tau >= 0.0 && tau < 1.0)) throw std::domain_error("fee tier must be in [0,1)");
    sqrt_rate_ = std::sqrt(initial_rate);
}

void ClPool::add_position(const LiquidityPosition& position) {
    if (position.lower.index >= position.upper.index)
        throw std::domain_error("position range must be nonempty");
    if (position.position_depth < 0.0) throw std::domain_error("position depth must be >= 0");
    positions_.push_back(position);
}

int ClPool::active_tick() const { return tick_of_rate(rate()); }

double ClPool::depth_at(int tick_index) const {
    double d = rest_depth_;
    for (const auto& p : positions_) {
        if (p.lower.index <= tick_index && tick_index < p.upper.index) d += p.position_depth;
    }
    return d;
}

ClPool::ClSwapResult ClPool::swap_for_x(Side side, double size_x) {
    if (size_x < 0.0) throw std::domain_error("swap size must be nonnegative");
    ClSwapResult res;
    res.fee_by_position.assign(positions_.size(), 0.0);
    res.rate_after = rate();
    if (size_x == 0.0) return res;

    int lowest = std::numeric_limits<int>::max();
    int highest = std::numeric_limits<int>::min();
    for (const auto& p : positions_) {
        lowest = std::min(lowest, p.lower.index);
        highest = std::max(highest, p.upper.index);
    }

    // Movement range: Z(j) <= rate <= Z(j+1).
    int j = tick_of_rate(sqrt_rate_ * sqrt_rate_);
    double s = sqrt_rate_;
    double remaining = size_x;  // X still to pay (buy) or to receive (sell)

    while (remaining > 0.0) {
        if (side == Side::BuyY && s >= std::sqrt(rate_of_tick(j + 1))) ++j;
        if (side == Side::SellY && s <= std::sqrt(rate_of_tick(j))) --j;

        const double depth = depth_at(j);
        const double s_lo = std::sqrt(rate_of_tick(j));
        const double s_hi = std::sqrt(rate_of_tick(j + 1));

        if (!(depth > 0.0)) {
            // Gap range: the rate crosses it without any exchange. Stop once
            // no liquidity remains in the direction of travel.
            if (side == Side::BuyY) {
                if (rest_depth_ <= 0.0 && j >= highest) { res.fully_filled = false; break; }
                s = s_hi;
            } else {
                if (rest_depth_ <= 0.0 && j < lowest) { res.fully_filled = false; break; }
                s = s_lo;
            }
            continue;
        }

        if (side == Side::BuyY) {
            // LT pays dx; (1 - tau) dx moves sqrt rate up by (1-tau)dx/depth.
            const double cap = depth * (s_hi - s) / (1.0 - tau_);
            const double dx = std::min(remaining, cap);
            const double s_new = s + (1.0 - tau_) * dx / depth;
            const double dy = depth * (1.0 / s - 1.0 / s_new);
            const double fee = tau_ * dx;
            res.delta_x += dx;
            res.delta_y += dy;
            res.fee_total += fee;
            credit_fees(res, fee, j, depth);
            remaining -= dx;
            s = (dx == cap) ? s_hi : s_new;
        } else {
            // LT receives dx; sqrt rate moves down by dx/depth.
            const double cap = depth * (s - s_lo);
            const double dx = std::min(remaining, cap);
            const double s_new = s - dx / depth;
            const double dy = depth * (1.0 / s_new - 1.0 / s) / (1.0 - tau_);
            const double fee = tau_ / (1.0 - tau_) * dx;
            res.delta_x += dx;
            res.delta_y += dy;
            res.fee_total += fee;
            credit_fees(res, fee, j, depth);
            remaining -= dx;
            s = (dx == cap) ? s_lo : s_new;
        }
    }

    sqrt_rate_ = s;
    res.rate_after = rate();
    return res;
}

void ClPool::credit_fees(ClSwapResult& res, double fee, int tick_index, double depth) const {
    if (!(fee > 0.0)) return;
    for (std::size_t k = 0; k < positions_.size(); ++k) {
        const auto& p = positions_[k];
        if (p.lower.index <= tick_index && tick_index < p.upper.index)
            res.fee_by_position[k] += fee * p.position_depth / depth;
    }
    res.fee_rest += fee * rest_depth_ / depth;
}

}  // namespace amm
