#pragma once

#include <string>
#include <vector>

#include "amm/dynamics.hpp"
#include "amm/econometrics.hpp"
#include "amm/execution.hpp"

namespace amm {

enum class EventKind { Swap, Mint, Burn };

struct EventRecord {
    double timestamp = 0.0;  // Unix seconds
    std::string pool_id;
    EventKind kind = EventKind::Swap;
    double delta_x = 0.0;
    double delta_y = 0.0;
    double rate = 0.0;
    double depth = 0.0;
    int tick_lower = 0;
    int tick_upper = 0;
};

std::vector<EventRecord> read_events_csv(const std::string& path);
void write_events_csv(const std::string& path, const std::vector<EventRecord>& events);

enum class ExecStrategyKind { Optimal, Twap, SingleOrder };

struct BacktestConfig {
    double in_sample_sec = 86400.0;
    double out_sample_sec = 7200.0;
    double participation_rate = 0.5;
    double gas_per_tx = 5.0;
    double amm_fee = 1e-4;  // proportional fee on the traded value
    double phi = 0.005;
    double alpha = 10.0;
    std::string pool_id = "pool";
    std::string oracle_id = "oracle";
    ExecStrategyKind strategy = ExecStrategyKind::Optimal;
};

struct RunResult {
    double window_start = 0.0;
    double window_end = 0.0;
    double gross_pnl = 0.0;  // x_T + y_T Z_T - y_0 Z_0, units of X
    double fees = 0.0;       // AMM fees plus gas
    int num_trades = 0;
    double y0 = 0.0;
    double z_start = 0.0;
    double z_end = 0.0;
    Model1Estimate estimate;
};

struct TradeLogEntry {
    double timestamp = 0.0;
    double delta_y = 0.0;  // positive sells Y
    double exec_rate = 0.0;
    double fee = 0.0;
};

// Rolling in-sample estimation / out-of-sample execution of the closed-form
// strategy (or a benchmark) against replayed pool and oracle rates.
std::vector<RunResult> run_liquidation_backtest(const std::vector<EventRecord>& events,
                                                const BacktestConfig& config,
                                                std::vector<TradeLogEntry>* trade_log = nullptr);

// Same protocol with zero initial inventory (statistical arbitrage).
std::vector<RunResult> run_speculation_backtest(const std::vector<EventRecord>& events,
                                                const BacktestConfig& config);

struct LpBacktestConfig {
    double gamma_c = 5e-7;
    double epsilon = 1e-4;
    double fee_tier = 5e-4;
    double gas_per_reposition = 0.0;
    double wealth = 1e6;        // units of X
    double step_sec = 60.0;
    double estimation_sec = 86400.0;
    std::string pool_id = "pool";
};

struct LpBacktestReport {
    int operations = 0;
    double mean_position_value = 0.0;  // per-operation relative performance
    double sd_position_value = 0.0;
    double mean_fee_income = 0.0;
    double sd_fee_income = 0.0;
    double mean_total = 0.0;
    double sd_total = 0.0;
    double breakeven_wealth = 0.0;  // gas / mean per-op net return (ex gas)
};

LpBacktestReport run_lp_backtest(const std::vector<EventRecord>& events,
                                 const LpBacktestConfig& config);

// Synthetic Model I world: pool swap events at a fixed trading interval plus
// an oracle rate series, for tests and for the backtest acceptance runs.
std::vector<EventRecord> generate_model1_events(const ModelIParams& params, double duration_sec,
                                                double trade_interval_sec, double kappa,
                                                double volume_scale, std::uint64_t seed,
                                                const std::string& pool_id = "pool",
                                                const std::string& oracle_id = "oracle");

}  // namespace amm
