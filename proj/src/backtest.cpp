#include "amm/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "amm/lp.hpp"
#include "amm/pool.hpp"
#include "amm/rng.hpp"

namespace amm {

namespace {

constexpr double kSecPerDay = 86400.0;

const char* kind_name(EventKind k) {
    switch (k) {
        case EventKind::Swap: return "swap";
        case EventKind::Mint: return "mint";
        case EventKind::Burn: return "burn";
    }
    return "swap";
}

EventKind kind_from(const std::string& s) {
    if (s == "swap") return EventKind::Swap;
    if (s == "mint") return EventKind::Mint;
    if (s == "burn") return EventKind::Burn;
    throw std::runtime_error("unknown event kind: " + s);
}

struct Series {
    std::vector<double> t;  // seconds
    std::vector<double> v;
    double last_before(double ts, double fallback) const {
        auto it = std::upper_bound(t.begin(), t.end(), ts);
        if (it == t.begin()) return fallback;
        return v[static_cast<std::size_t>(it - t.begin() - 1)];
    }
};

}  // namespace

std::vector<EventRecord> read_events_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open events file: " + path);
    std::vector<EventRecord> events;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (header) {
            header = false;
            if (line.rfind("timestamp", 0) == 0) continue;
        }
        std::stringstream ss(line);
        std::string field;
        EventRecord e;
        std::getline(ss, field, ',');
        e.timestamp = std::stod(field);
        std::getline(ss, e.pool_id, ',');
        std::getline(ss, field, ',');
        e.kind = kind_from(field);
        std::getline(ss, field, ',');
        e.delta_x = std::stod(field);
        std::getline(ss, field, ',');
        e.delta_y = std::stod(field);
        std::getline(ss, field, ',');
        e.rate = std::stod(field);
        std::getline(ss, field, ',');
        e.depth = std::stod(field);
        std::getline(ss, field, ',');
        e.tick_lower = std::stoi(field);
        std::getline(ss, field, ',');
        e.tick_upper = std::stoi(field);
        if (!(e.rate > 0.0)) throw std::runtime_error("event with non-positive rate");
        events.push_back(std::move(e));
    }
    return events;
}

void write_events_csv(const std::string& path, const std::vector<EventRecord>& events) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write events file: " + path);
    out << "timestamp,pool_id,kind,delta_x,delta_y,rate,depth,tick_lower,tick_upper\n";
    char buf[512];
    for (const auto& e : events) {
        std::snprintf(buf, sizeof(buf), "%.17g,%s,%s,%.17g,%.17g,%.17g,%.17g,%d,%d\n",
                      e.timestamp, e.pool_id.c_str(), kind_name(e.kind), e.delta_x, e.delta_y,
                      e.rate, e.depth, e.tick_lower, e.tick_upper);
        out << buf;
    }
}

static std::vector<RunResult> run_exec_backtest(const std::vector<EventRecord>& events,
                                                const BacktestConfig& config, bool liquidation,
                                                std::vector<TradeLogEntry>* trade_log) {
    // Split into the pool and oracle series.
    std::vector<const EventRecord*> pool_events;
    Series oracle;
    for (const auto& e : events) {
        if (e.kind != EventKind::Swap) continue;
        if (e.pool_id == config.pool_id) pool_events.push_back(&e);
        if (e.pool_id == config.oracle_id) {
            oracle.t.push_back(e.timestamp);
            oracle.v.push_back(e.rate);
        }
    }
    if (pool_events.size() < 64 || oracle.t.empty())
        throw std::runtime_error("insufficient events for the backtest");

    std::vector<RunResult> results;
    const double t_begin = pool_events.front()->timestamp;
    const double t_last = pool_events.back()->timestamp;
    double ws = t_begin + config.in_sample_sec;

    std::size_t cursor = 0;  // first pool event at or after ws - in_sample
    while (ws + config.out_sample_sec <= t_last) {
        const double is_lo = ws - config.in_sample_sec;
        // In-sample slice.
        while (cursor < pool_events.size() && pool_events[cursor]->timestamp < is_lo) ++cursor;
        std::size_t k = cursor;
        std::vector<double> s_in, z_in, vol_abs;
        double depth = 0.0;
        double t_prev = -1.0, gap_sum = 0.0;
        int gaps = 0;
        for (; k < pool_events.size() && pool_events[k]->timestamp < ws; ++k) {
            const auto* e = pool_events[k];
            z_in.push_back(e->rate);
            s_in.push_back(oracle.last_before(e->timestamp, e->rate));
            vol_abs.push_back(std::abs(e->delta_y));
            depth = e->depth;
            if (t_prev >= 0.0) {
                gap_sum += e->timestamp - t_prev;
                ++gaps;
            }
            t_prev = e->timestamp;
        }
        const std::size_t exec_begin = k;
        if (z_in.size() < 64 || gaps < 1 || !(depth > 0.0)) {
            ws += config.out_sample_sec;
            continue;  // skip window with too little in-sample data
        }

        const double dt_days = (gap_sum / gaps) / kSecPerDay;
        Model1Estimate est;
        try {
            est = estimate_model1(s_in, z_in, dt_days);
        } catch (const std::exception&) {
            ws += config.out_sample_sec;
            continue;
        }

        const double T_days = config.out_sample_sec / kSecPerDay;
        double volume = 0.0;
        for (double v : vol_abs) volume += v;
        const double y0 =
            liquidation
                ? config.participation_rate * volume * (config.out_sample_sec / config.in_sample_sec)
                : 0.0;

        LiquidationConfig lc;
        lc.T = T_days;
        lc.phi = config.phi;
        lc.alpha = config.alpha;
        lc.eta = dt_days;  // execution-cost scale at the observed trading interval
        lc.kappa = depth;
        lc.y0 = y0;

        const double z0 = pool_events[exec_begin]->rate;
        ScalarCoefficients coeffs;
        if (config.strategy == ExecStrategyKind::Optimal ||
            config.strategy == ExecStrategyKind::Twap) {
            const double width = 5.0 * std::max(est.gamma, 1e-4) * std::sqrt(T_days);
            std::vector<double> zg(64);
            for (int i = 0; i < 64; ++i)
                zg[i] = z0 * std::exp(-width + 2.0 * width * i / 63.0);
            coeffs = solve_scalar_coefficients(lc, est.beta, zg, 128);
        }

        RunResult run;
        run.window_start = ws;
        run.window_end = ws + config.out_sample_sec;
        run.estimate = est;
        run.y0 = y0;
        run.z_start = z0;

        double x_cash = 0.0, y_inv = y0, z_last = z0;
        bool single_done = false;
        for (std::size_t j = exec_begin;
             j < pool_events.size() && pool_events[j]->timestamp < ws + config.out_sample_sec;
             ++j) {
            const auto* e = pool_events[j];
            const double z = e->rate;
            z_last = z;
            const double s = oracle.last_before(e->timestamp, z);
            const double next_ts =
                (j + 1 < pool_events.size()) ? pool_events[j + 1]->timestamp : run.window_end;
            const double step_days =
                (std::min(next_ts, run.window_end) - e->timestamp) / kSecPerDay;
            if (step_days <= 0.0) continue;
            // Strategy time at the start of a full step: the discrete trade
            // covers [t, t + step], so the terminal liquidation coefficient
            // is never sampled inside its boundary layer at T.
            const double t_in = std::min((e->timestamp - ws) / kSecPerDay, lc.T - step_days);

            double dy = 0.0;
            if (config.strategy == ExecStrategyKind::SingleOrder) {
                if (!single_done && y0 != 0.0) {
                    // One exact swap against the virtual reserves implied by
                    // (rate, depth).
                    PoolState ps = PoolState::from_rate_depth(z, e->depth, 0.0);
                    SwapResult sw = execute_swap(ps, Side::SellY, y0);
                    x_cash += sw.delta_x;
                    y_inv = 0.0;
                    run.fees += config.amm_fee * y0 * z + config.gas_per_tx;
                    ++run.num_trades;
                    if (trade_log)
                        trade_log->push_back({e->timestamp, y0, sw.delta_x / y0, config.amm_fee * y0 * z});
                    single_done = true;
                }
                continue;
            }
            if (config.strategy == ExecStrategyKind::Twap) {
                dy = (lc.y0 / lc.T) * step_days;
                if (y_inv <= 0.0) dy = 0.0;
                dy = std::min(dy, y_inv);
            } else {
                const SpeedResult sp = closed_form_speed(t_in, y_inv, z, s, coeffs, lc);
                dy = sp.nu * step_days;
            }
            if (dy == 0.0) continue;
            const double nu = dy / step_days;
            const double exec_rate = z - (lc.eta / lc.kappa) * std::pow(z, 1.5) * nu;
            x_cash += exec_rate * dy;
            y_inv -= dy;
            run.fees += config.amm_fee * std::abs(dy) * z + config.gas_per_tx;
            ++run.num_trades;
            if (trade_log) trade_log->push_back({e->timestamp, dy, exec_rate, config.amm_fee * std::abs(dy) * z});
        }
        run.z_end = z_last;
        run.gross_pnl = x_cash + y_inv * z_last - y0 * z0;
        results.push_back(run);
        ws += config.out_sample_sec;
    }
    return results;
}

std::vector<RunResult> run_liquidation_backtest(const std::vector<EventRecord>& events,
                                                const BacktestConfig& config,
                                                std::vector<TradeLogEntry>* trade_log) {
    return run_exec_backtest(events, config, true, trade_log);
}

std::vector<RunResult> run_speculation_backtest(const std::vector<EventRecord>& events,
                                                const BacktestConfig& config) {
    return run_exec_backtest(events, config, false, nullptr);
}

LpBacktestReport run_lp_backtest(const std::vector<EventRecord>& events,
                                 const LpBacktestConfig& config) {
    std::vector<const EventRecord*> swaps;
    for (const auto& e : events)
        if (e.kind == EventKind::Swap && e.pool_id == config.pool_id) swaps.push_back(&e);
    if (swaps.size() < 64) throw std::runtime_error("insufficient swap events for the LP backtest");
    for (const auto* e : swaps)
        if (!(e->depth > 0.0)) throw std::runtime_error("LP backtest requires the depth column");

    const double t0 = swaps.front()->timestamp + config.estimation_sec;
    const double t_end = swaps.back()->timestamp;
    LpBacktestReport rep;
    std::vector<double> perf_pos, perf_fee, perf_total;

    std::size_t lo = 0, hi = 0;  // trailing estimation window [t - est, t)
    double prev_y = 0.0;
    bool have_pos = false;
    for (double t = t0; t + config.step_sec <= t_end; t += config.step_sec) {
        while (hi < swaps.size() && swaps[hi]->timestamp < t) ++hi;
        while (lo < hi && swaps[lo]->timestamp < t - config.estimation_sec) ++lo;
        if (hi - lo < 64 || hi == 0) continue;

        // One-minute sigma estimate over the trailing window, scaled to days.
        double fee_income = 0.0;
        std::vector<double> rets;
        {
            double last_rate = swaps[lo]->rate;
            double last_min = std::floor(swaps[lo]->timestamp / 60.0);
            for (std::size_t k = lo; k < hi; ++k) {
                fee_income += config.fee_tier * std::abs(swaps[k]->delta_x);
                const double m = std::floor(swaps[k]->timestamp / 60.0);
                if (m > last_min) {
                    rets.push_back(std::log(swaps[k]->rate / last_rate) / std::sqrt(m - last_min));
                    last_rate = swaps[k]->rate;
                    last_min = m;
                }
            }
        }
        if (rets.size() < 30) continue;
        double mean = 0.0;
        for (double r : rets) mean += r;
        mean /= rets.size();
        double var = 0.0;
        for (double r : rets) var += (r - mean) * (r - mean);
        var /= (rets.size() - 1);
        const double sigma_day = std::sqrt(var * 1440.0);

        const auto* at = swaps[hi - 1];
        const double z = at->rate;
        const double kappa = at->depth;
        const double days_covered = (at->timestamp - swaps[lo]->timestamp) / kSecPerDay;
        if (days_covered <= 0.0) continue;
        const double pi = pool_fee_rate(fee_income / config.fee_tier / days_covered, kappa, z,
                                        config.fee_tier);

        if (!(pi > 0.0)) {  // no taker activity: stay out of the pool
            have_pos = false;
            prev_y = 0.0;
            continue;
        }
        LpParams params;
        params.gamma_c = config.gamma_c;
        params.sigma = sigma_day;
        params.epsilon = config.epsilon;
        params.mu = 0.0;
        const SpreadQuote quote = optimal_spread(pi, params, z);
        if (!quote.viable) {
            have_pos = false;
            prev_y = 0.0;
            continue;
        }
        const TickRange ticks = spread_to_ticks(quote, z);
        const double kt = wealth_to_position_depth(config.wealth, 1.0, z, ticks.lower, ticks.upper);
        const LiquidityPosition pos{ticks.lower, ticks.upper, kt};
        const Holdings h0 = cl_holdings(pos, z);

        // Rebalancing execution cost on the Y leg.
        const double rebal_cost =
            have_pos ? std::abs(h0.y - prev_y) * std::pow(z, 1.5) / kappa : 0.0;

        // Out-of-sample step: fee accrual from replayed trades in range.
        double fees = 0.0;
        std::size_t k = hi;
        double z_end = z;
        while (k < swaps.size() && swaps[k]->timestamp < t + config.step_sec) {
            const auto* e = swaps[k];
            if (e->rate > ticks.lower.rate && e->rate <= ticks.upper.rate)
                fees += (kt / (e->depth + kt)) * config.fee_tier * std::abs(e->delta_x);
            z_end = e->rate;
            ++k;
        }
        const double ret = (z_end - z) / z;
        const double dt_days = config.step_sec / kSecPerDay;
        const double delta = quote.spread();
        const double d_alpha =
            config.wealth * (-0.5 * sigma_day * sigma_day * dt_days / delta + 0.5 * ret);

        perf_pos.push_back(d_alpha / config.wealth);
        perf_fee.push_back(fees / config.wealth);
        perf_total.push_back((d_alpha + fees - rebal_cost) / config.wealth);
        prev_y = cl_holdings(pos, z_end).y;
        have_pos = true;
    }

    auto summarize = [](const std::vector<double>& v, double& mean, double& sd) {
        mean = 0.0;
        for (double x : v) mean += x;
        mean /= std::max<std::size_t>(1, v.size());
        sd = 0.0;
        for (double x : v) sd += (x - mean) * (x - mean);
        sd = v.size() > 1 ? std::sqrt(sd / (v.size() - 1)) : 0.0;
    };
    rep.operations = static_cast<int>(perf_total.size());
    summarize(perf_pos, rep.mean_position_value, rep.sd_position_value);
    summarize(perf_fee, rep.mean_fee_income, rep.sd_fee_income);
    summarize(perf_total, rep.mean_total, rep.sd_total);
    if (rep.mean_total > 0.0)
        rep.breakeven_wealth = config.gas_per_reposition / rep.mean_total;
    return rep;
}

std::vector<EventRecord> generate_model1_events(const ModelIParams& params, double duration_sec,
                                                double trade_interval_sec, double kappa,
                                                double volume_scale, std::uint64_t seed,
                                                const std::string& pool_id,
                                                const std::string& oracle_id) {
    const int steps = static_cast<int>(duration_sec / trade_interval_sec);
    const double dt_days = trade_interval_sec / kSecPerDay;
    const Path2 path = simulate_model1(params, dt_days, steps, seed);
    Rng sizes = Rng(seed).stream(11);
    std::vector<EventRecord> events;
    events.reserve(2 * (steps + 1));
    for (int k = 0; k <= steps; ++k) {
        const double ts = k * trade_interval_sec;
        EventRecord oracle;
        oracle.timestamp = ts;
        oracle.pool_id = oracle_id;
        oracle.rate = path.a[k];
        oracle.depth = 0.0;
        events.push_back(oracle);
        EventRecord swap;
        swap.timestamp = ts;
        swap.pool_id = pool_id;
        swap.rate = path.b[k];
        swap.depth = kappa;
        swap.delta_y = volume_scale * std::abs(sizes.gaussian());
        swap.delta_x = swap.delta_y * swap.rate;
        events.push_back(swap);
    }
    return events;
}

}  // namespace amm
