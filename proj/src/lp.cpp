#include "amm/lp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace amm {

namespace {
inline double effective_mu(const LpParams& p) { return p.mu - p.zeta_rebal; }
}

SpreadQuote optimal_spread(double pi, const LpParams& params, double rate) {
    if (!(pi > 0.0)) throw std::domain_error("pool fee rate must be positive");
    if (!(rate > 0.0)) throw std::domain_error("rate must be positive");
    const double mu = effective_mu(params);
    const double s2 = params.sigma * params.sigma;

    SpreadQuote q;
    if (std::abs(mu) > 1.0) {
        q.refused = true;
        return q;
    }
    const double denom = 4.0 * pi - 0.5 * s2 + mu * (mu - 0.5 * s2);
    const double sq = std::sqrt(rate);
    if (denom < params.epsilon) {
        // Fees do not compensate the depreciation: maximal range, not viable.
        q.full_range = true;
        q.delta_l = 2.0;
        q.delta_u = 2.0;
        q.z_l = 0.0;
        q.z_u = std::numeric_limits<double>::infinity();
        return q;
    }
    const double delta = (2.0 * params.gamma_c + mu * mu * s2) / denom;
    double du = 0.5 * delta + mu;
    double dl = 0.5 * delta - mu;
    const bool admissible = dl > 0.0 && dl <= 2.0 && du >= 0.0 && du < 2.0;
    if (!admissible) {
        q.full_range = true;
        q.delta_l = 2.0;
        q.delta_u = 2.0;
        q.z_l = 0.0;
        q.z_u = std::numeric_limits<double>::infinity();
        return q;
    }
    q.delta_l = dl;
    q.delta_u = du;
    q.z_l = rate * (1.0 - 0.5 * dl) * (1.0 - 0.5 * dl);
    const double f = 1.0 - 0.5 * du;
    q.z_u = rate / (f * f);
    q.viable = true;
    return q;
}

Asymmetry position_asymmetry(double delta, double mu) {
    if (!(delta > 0.0)) throw std::domain_error("spread must be positive");
    Asymmetry a;
    a.rho = 0.5 + mu / delta;
    a.admissible = a.rho > 0.0 && a.rho < 1.0;
    return a;
}

ViabilityReport viability_check(double pi, const LpParams& params) {
    const double mu = effective_mu(params);
    const double s2 = params.sigma * params.sigma;
    ViabilityReport r;
    r.rule_of_thumb = s2 / 8.0;

    const double denom = 4.0 * pi - 0.5 * s2 + mu * (mu - 0.5 * s2);
    r.profitability_margin = denom - params.epsilon;
    r.profitability_ok = denom >= params.epsilon;

    // pi - gamma/8 >= (sigma^2/8)(mu^2/2 + 1) - (mu/4)(mu - sigma^2/2)
    const double depreciation = (s2 / 8.0) * (0.5 * mu * mu + 1.0) - 0.25 * mu * (mu - 0.5 * s2);
    r.range_margin = pi - params.gamma_c / 8.0 - depreciation;
    r.range_ok = r.range_margin >= 0.0;

    r.mu_ok = std::abs(mu) <= 1.0;

    if (r.profitability_ok && denom > 0.0) {
        const double delta = (2.0 * params.gamma_c + mu * mu * s2) / denom;
        r.spread_ok = 2.0 * std::abs(mu) <= delta && delta <= 4.0 - 2.0 * std::abs(mu);
    }
    r.all_ok = r.profitability_ok && r.range_ok && r.spread_ok && r.mu_ok;
    return r;
}

LpWealthState make_lp_wealth(double v0) {
    if (!(v0 > 0.0)) throw std::domain_error("initial wealth must be positive");
    LpWealthState s;
    s.V = v0;
    s.alpha_pos = v0;
    return s;
}

LpWealthState lp_wealth_step(const LpWealthState& state, const SpreadQuote& quote,
                             double rate_return, double pi, const LpParams& params, double dt) {
    if (!(dt > 0.0)) throw std::domain_error("dt must be positive");
    if (!quote.viable) throw std::domain_error("cannot step wealth on a non-viable quote");
    if (state.ruined) return state;

    const double delta = quote.spread();
    const double rho = quote.delta_u / delta;
    const double s2 = params.sigma * params.sigma;
    const double v = state.V;

    // Position value: V (1/delta)(-sigma^2/2 dt) + rho V (mu dt + sigma dW)
    // with the realised return standing in for mu dt + sigma dW.
    const double d_alpha = v * (-0.5 * s2 * dt / delta + rho * rate_return);
    // Fees net of the concentration cost.
    const double d_fees = v * (4.0 * pi / delta - params.gamma_c / (delta * delta)) * dt;
    // Rebalancing cost leg, charged per rebalance.
    const double d_costs = -params.zeta_rebal * rho * v;

    LpWealthState out = state;
    out.alpha_pos += d_alpha;
    out.fees += d_fees;
    out.costs += d_costs;
    out.V = v + d_alpha + d_fees + d_costs;
    if (out.V <= 0.0) out.ruined = true;
    return out;
}

double hamiltonian_argmax(double pi_tilde, const LpParams& params,
                          const std::vector<double>& delta_grid) {
    if (delta_grid.empty()) throw std::domain_error("empty delta grid");
    const double mu = effective_mu(params);
    const double s2 = params.sigma * params.sigma;
    const double eta = s2 / 8.0 - 0.25 * mu * (mu - 0.5 * s2) + 0.25 * params.epsilon;
    double best_g = -std::numeric_limits<double>::infinity();
    double best_d = delta_grid.front();
    for (double d : delta_grid) {
        if (!(d > 0.0)) throw std::domain_error("delta grid must be positive");
        const double g = (4.0 * pi_tilde + 4.0 * eta - 0.5 * s2) / d + mu * mu / d -
                         0.5 * s2 * (mu * mu / (d * d) + mu / d) -
                         params.gamma_c / (d * d);
        if (g > best_g) {
            best_g = g;
            best_d = d;
        }
    }
    return best_d;
}

ConcentrationFit fit_concentration_cost(const std::vector<std::pair<double, double>>& samples,
                                        double m) {
    if (!(m > 0.0)) throw std::domain_error("rebalancing interval must be positive");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(samples.size());
    double first = samples.empty() ? 0.0 : samples.front().first;
    bool distinct = false;
    for (const auto& [delta, p_hat] : samples) {
        if (delta != first) distinct = true;
        const double y = delta * delta * p_hat;
        sx += delta;
        sy += y;
        sxx += delta * delta;
        sxy += delta * y;
    }
    if (samples.size() < 2 || !distinct)
        throw std::runtime_error("need at least two distinct spreads for the regression");
    const double det = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / det;
    const double intercept = (sy - slope * sx) / n;
    return ConcentrationFit{-intercept / m, slope / (4.0 * m)};
}

TickRange spread_to_ticks(const SpreadQuote& quote, double rate) {
    TickRange out;
    if (quote.refused) throw std::domain_error("no ticks for a refused quote");
    if (quote.full_range) {
        out.full_range = true;
        out.lower = make_tick(-800000);
        out.upper = make_tick(800000);
        return out;
    }
    // Round Z_l down and Z_u up to the nearest ticks.
    int lo = tick_of_rate(quote.z_l);
    if (rate_of_tick(lo + 1) == quote.z_l) ++lo;
    int hi = tick_of_rate(quote.z_u) + 1;
    if (rate_of_tick(hi) <= rate) ++hi;  // widen when delta_u rounds onto the rate
    out.lower = make_tick(lo);
    out.upper = make_tick(hi);
    if (!(out.lower.rate < rate && rate < out.upper.rate))
        throw std::runtime_error("tick rounding failed to contain the rate");
    return out;
}

}  // namespace amm
