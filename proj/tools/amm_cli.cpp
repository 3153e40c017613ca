// Command-line surface over the library: simulators, estimators, solvers,
// the LP environment, and the replay backtests. All outputs are plain CSV or
// JSON and are byte-identical across runs with the same seed.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "amm/backtest.hpp"
#include "amm/dynamics.hpp"
#include "amm/econometrics.hpp"
#include "amm/execution.hpp"
#include "amm/hjb.hpp"
#include "amm/lp.hpp"
#include "amm/sim_env.hpp"

using json = nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    for (const auto& l : lines) out << l << '\n';
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

CsvTable read_numeric_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open input file: " + path);
    CsvTable t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string field;
        if (first) {
            first = false;
            bool numeric = true;
            std::vector<std::string> fields;
            while (std::getline(ss, field, ',')) {
                fields.push_back(field);
                try {
                    (void)std::stod(field);
                } catch (...) {
                    numeric = false;
                }
            }
            if (!numeric) {
                t.header = fields;
                continue;
            }
            std::vector<double> row;
            for (const auto& f : fields) row.push_back(std::stod(f));
            t.rows.push_back(std::move(row));
            continue;
        }
        std::vector<double> row;
        while (std::getline(ss, field, ',')) row.push_back(std::stod(field));
        t.rows.push_back(std::move(row));
    }
    return t;
}

int cmd_simulate(const std::string& model, double dt, int steps, std::uint64_t seed,
                 const std::string& out,
                 const amm::ModelIParams& m1, const amm::ModelIIParams& m2,
                 const amm::CirParams& cir, const amm::OrderFlowParams& flow,
                 double horizon_min) {
    std::vector<std::string> lines;
    if (model == "model1") {
        const auto p = amm::simulate_model1(m1, dt, steps, seed);
        lines.push_back("t,s,z");
        for (std::size_t k = 0; k < p.t.size(); ++k)
            lines.push_back(fmt(p.t[k]) + "," + fmt(p.a[k]) + "," + fmt(p.b[k]));
    } else if (model == "model2") {
        const auto p = amm::simulate_depth(m2, dt, steps, seed);
        lines.push_back("t,z,kappa");
        for (std::size_t k = 0; k < p.t.size(); ++k)
            lines.push_back(fmt(p.t[k]) + "," + fmt(p.a[k]) + "," + fmt(p.b[k]));
    } else if (model == "cir") {
        const auto p = amm::simulate_cir(cir, dt, steps, seed);
        lines.push_back("t,pi_tilde");
        for (std::size_t k = 0; k < p.t.size(); ++k)
            lines.push_back(fmt(p.t[k]) + "," + fmt(p.a[k]));
    } else if (model == "order-flow") {
        const auto ev = amm::simulate_order_flow(flow, horizon_min, seed);
        lines.push_back("t_min,side,size_x");
        for (const auto& e : ev)
            lines.push_back(fmt(e.time) + "," + (e.is_buy ? "buy" : "sell") + "," + fmt(e.size_x));
    } else {
        std::cerr << "unknown model: " << model << "\n";
        return 2;
    }
    write_lines(out, lines);
    return 0;
}

int cmd_estimate(const std::string& input, const std::string& out) {
    const CsvTable t = read_numeric_csv(input);
    if (t.rows.size() < 31 || t.rows.front().size() < 3)
        throw std::runtime_error("estimate expects a CSV with columns t,s,z");
    std::vector<double> s, z;
    for (const auto& r : t.rows) {
        s.push_back(r[1]);
        z.push_back(r[2]);
    }
    const double dt = (t.rows.back()[0] - t.rows.front()[0]) / (t.rows.size() - 1);
    const auto est = amm::estimate_model1(s, z, dt);
    json j;
    j["sigma_per_sqrt_day"] = est.sigma;
    j["sigma_se"] = est.sigma_se;
    j["gamma_per_sqrt_day"] = est.gamma;
    j["gamma_se"] = est.gamma_se;
    j["beta_per_day"] = est.beta;
    j["beta_se"] = est.beta_se;
    j["observations"] = t.rows.size();
    std::ofstream o(out);
    if (!o) throw std::runtime_error("cannot open output file: " + out);
    o << j.dump(2) << "\n";
    return 0;
}

int cmd_execute(const amm::ModelIParams& m1, amm::LiquidationConfig lc, double beta_unused,
                double dt, std::uint64_t seed, const std::string& out) {
    (void)beta_unused;
    const int steps = static_cast<int>(lc.T / dt);
    const auto path = amm::simulate_model1(m1, dt, steps, seed);
    const double width = 5.0 * std::max(m1.gamma, 1e-4) * std::sqrt(lc.T);
    std::vector<double> zg(128);
    for (int i = 0; i < 128; ++i)
        zg[i] = m1.Z0 * std::exp(-width + 2.0 * width * i / 127.0);
    const auto coeffs = amm::solve_scalar_coefficients(lc, m1.beta, zg, 256);

    std::vector<std::string> lines;
    lines.push_back("t,s,z,inventory,speed,x_cash");
    double y = lc.y0, x = 0.0;
    for (int k = 0; k < static_cast<int>(path.t.size()); ++k) {
        const double s = path.a[k], z = path.b[k];
        const double t = std::min(path.t[k], lc.T - dt);  // start-of-step time
        const auto sp = amm::closed_form_speed(t, y, z, s, coeffs, lc);
        lines.push_back(fmt(t) + "," + fmt(s) + "," + fmt(z) + "," + fmt(y) + "," + fmt(sp.nu) +
                        "," + fmt(x));
        const double dy = sp.nu * dt;
        const double exec = amm::approx_execution_rate(z, lc.kappa, sp.nu, lc.eta);
        x += exec * dy;
        y -= dy;
    }
    write_lines(out, lines);
    return 0;
}

int cmd_solve_hjb(int model, const std::string& grid_spec, const amm::ModelIParams& m1,
                  const amm::ModelIIParams& m2, const amm::LiquidationConfig& lc, double tol,
                  int max_iters, const std::string& out) {
    int nt = 0, nu = 0, nv = 0;
    if (std::sscanf(grid_spec.c_str(), "%dx%dx%d", &nt, &nu, &nv) != 3)
        throw std::runtime_error("grid must look like 64x64x64");
    amm::HjbOptions opt;
    opt.picard_tol = tol;
    opt.picard_max_iters = max_iters;

    amm::PdeSolution sol;
    amm::BoundsReport rep;
    if (model == 1) {
        const double wz = 5.0 * m1.gamma * std::sqrt(lc.T);
        const double ws = 5.0 * m1.sigma * std::sqrt(lc.T);
        const auto grid = amm::Grid3D::make(lc.T, nt, m1.Z0 * std::exp(-wz), m1.Z0 * std::exp(wz),
                                            nu, m1.S0 * std::exp(-ws), m1.S0 * std::exp(ws), nv);
        sol = amm::solve_model1_pde(m1, lc, grid, opt);
        rep = amm::verify_bounds(sol, amm::HjbModel::ModelI, m1, lc);
    } else if (model == 2) {
        const double wz = 5.0 * m2.gamma * std::sqrt(lc.T);
        const double wk = 5.0 * m2.varsigma * std::sqrt(lc.T);
        const auto grid =
            amm::Grid3D::make(lc.T, nt, m2.Z0 * std::exp(-wz), m2.Z0 * std::exp(wz), nu,
                              m2.kappa0 * std::exp(-wk), m2.kappa0 * std::exp(wk), nv);
        sol = amm::solve_model2_pde(m2, lc, grid, opt);
        rep = amm::verify_bounds(sol, amm::HjbModel::ModelII, m1, lc);
    } else {
        std::cerr << "model must be 1 or 2\n";
        return 2;
    }

    std::vector<std::string> lines;
    lines.push_back("t,u,v,theta0,theta1,theta2");
    for (std::size_t ti = 0; ti < sol.grid.t.size(); ++ti)
        for (std::size_t ui = 0; ui < sol.grid.u.size(); ++ui)
            for (std::size_t vi = 0; vi < sol.grid.v.size(); ++vi) {
                const std::size_t k = sol.idx(ti, ui, vi);
                lines.push_back(fmt(sol.grid.t[ti]) + "," + fmt(sol.grid.u[ui]) + "," +
                                fmt(sol.grid.v[vi]) + "," + fmt(sol.theta0[k]) + "," +
                                fmt(sol.theta1[k]) + "," + fmt(sol.theta2[k]));
            }
    write_lines(out, lines);
    std::cout << "bound check: lower_violation=" << fmt(rep.lower_violation)
              << " upper_violation=" << fmt(rep.upper_violation)
              << " theta1=" << fmt(rep.theta1_upper_violation)
              << " theta0=" << fmt(rep.theta0_upper_violation) << "\n";
    return 0;
}

int cmd_lp_quote(double pi, const amm::LpParams& params, double rate, const std::string& out) {
    const auto quote = amm::optimal_spread(pi, params, rate);
    const auto report = amm::viability_check(pi, params);
    json j;
    j["delta"] = quote.spread();
    j["delta_l"] = quote.delta_l;
    j["delta_u"] = quote.delta_u;
    j["z_l"] = quote.z_l;
    j["z_u"] = quote.z_u;
    j["viable"] = quote.viable;
    j["full_range"] = quote.full_range;
    j["refused"] = quote.refused;
    j["profitability_ok"] = report.profitability_ok;
    j["range_ok"] = report.range_ok;
    j["rule_of_thumb_sigma2_over_8"] = report.rule_of_thumb;
    if (out.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::ofstream o(out);
        if (!o) throw std::runtime_error("cannot open output file: " + out);
        o << j.dump(2) << "\n";
    }
    return 0;
}

int cmd_spillover(const std::string& input, int lags, int horizon, const std::string& out) {
    const CsvTable t = read_numeric_csv(input);
    if (t.rows.empty()) throw std::runtime_error("empty input");
    const std::size_t d = t.rows.front().size();
    Eigen::MatrixXd series(t.rows.size(), d);
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        for (std::size_t c = 0; c < d; ++c) series(r, c) = t.rows[r][c];
    const auto model = amm::fit_var(series, lags);
    const auto rep = amm::spillover(model, horizon);
    json j;
    j["tsi_percent"] = rep.tsi;
    j["horizon"] = rep.horizon;
    j["dsi_to_percent"] = std::vector<double>(rep.dsi_to.data(), rep.dsi_to.data() + rep.dsi_to.size());
    j["dsi_from_percent"] =
        std::vector<double>(rep.dsi_from.data(), rep.dsi_from.data() + rep.dsi_from.size());
    j["nsi_percent"] = std::vector<double>(rep.nsi.data(), rep.nsi.data() + rep.nsi.size());
    std::ofstream o(out);
    if (!o) throw std::runtime_error("cannot open output file: " + out);
    o << j.dump(2) << "\n";
    return 0;
}

int cmd_env_run(const amm::EnvConfig& config, int lower, int upper, std::uint64_t seed,
                const std::string& out) {
    amm::EnvAction action;
    const std::size_t n = config.pools.size();
    action.weights.assign(n, 1.0 / static_cast<double>(n));
    action.lower.assign(n, lower);
    action.upper.assign(n, upper);
    const auto res =
        amm::run_episode(config, [&](const amm::EnvState&, const amm::EnvConfig&) { return action; },
                         seed);
    std::vector<std::string> lines;
    std::string header = "t_min";
    for (std::size_t p = 0; p < n; ++p) {
        const std::string tag = std::to_string(p);
        header += ",z" + tag + ",lower" + tag + ",upper" + tag + ",weight" + tag + ",fees" + tag;
    }
    header += ",wealth";
    lines.push_back(header);
    for (const auto& row : res.trajectory) {
        std::string l = fmt(row.t_min);
        for (std::size_t p = 0; p < n; ++p)
            l += "," + fmt(row.rate[p]) + "," + std::to_string(row.lower[p]) + "," +
                 std::to_string(row.upper[p]) + "," + fmt(row.weight[p]) + "," + fmt(row.fees[p]);
        l += "," + fmt(row.wealth);
        lines.push_back(l);
    }
    write_lines(out, lines);
    return 0;
}

int cmd_backtest(const std::string& events_path, const std::string& strategy,
                 amm::BacktestConfig config, const std::string& out) {
    const auto events = amm::read_events_csv(events_path);
    if (strategy == "optimal")
        config.strategy = amm::ExecStrategyKind::Optimal;
    else if (strategy == "twap")
        config.strategy = amm::ExecStrategyKind::Twap;
    else if (strategy == "single-order")
        config.strategy = amm::ExecStrategyKind::SingleOrder;
    else
        throw std::runtime_error("unknown strategy: " + strategy);
    const auto runs = amm::run_liquidation_backtest(events, config);
    std::vector<std::string> lines;
    lines.push_back(
        "window_start,window_end,gross_pnl_x_units,fees_x_units,num_trades,y0,sigma_hat,gamma_hat,"
        "beta_hat");
    for (const auto& r : runs)
        lines.push_back(fmt(r.window_start) + "," + fmt(r.window_end) + "," + fmt(r.gross_pnl) +
                        "," + fmt(r.fees) + "," + std::to_string(r.num_trades) + "," + fmt(r.y0) +
                        "," + fmt(r.estimate.sigma) + "," + fmt(r.estimate.gamma) + "," +
                        fmt(r.estimate.beta));
    write_lines(out, lines);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CPMM toolkit: simulators, optimal execution and liquidity provision"};
    app.set_config("--config", "", "flat key=value configuration file; flags win");
    app.require_subcommand(1);

    std::uint64_t seed = 1;
    app.add_option("--seed", seed, "RNG seed")->capture_default_str();

    // simulate ------------------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "simulate model dynamics to CSV");
    std::string sim_model = "model1", sim_out = "paths.csv";
    double sim_dt = 1e-4;
    int sim_steps = 1000;
    double sim_horizon = 1440.0;
    amm::ModelIParams m1{0.045, 657.9, 0.034, 2000.0, 2000.0};
    amm::ModelIIParams m2{0.02, 0.01, 2000.0, 1e7};
    amm::CirParams cir{2.0, 0.02, 0.05, 0.02};
    amm::OrderFlowParams flow{1.0 / 3.0, 0.5, 132030.0, 20000.0};
    sim->add_option("--model", sim_model, "model1|model2|cir|order-flow")->capture_default_str();
    sim->add_option("--dt", sim_dt, "step in days")->capture_default_str();
    sim->add_option("--steps", sim_steps, "number of steps")->capture_default_str();
    sim->add_option("--out", sim_out, "output CSV")->capture_default_str();
    sim->add_option("--sigma", m1.sigma)->capture_default_str();
    sim->add_option("--beta", m1.beta)->capture_default_str();
    sim->add_option("--gamma", m1.gamma)->capture_default_str();
    sim->add_option("--s0", m1.S0)->capture_default_str();
    sim->add_option("--z0", m1.Z0)->capture_default_str();
    sim->add_option("--varsigma", m2.varsigma)->capture_default_str();
    sim->add_option("--kappa0", m2.kappa0)->capture_default_str();
    sim->add_option("--cir-gamma", cir.Gamma)->capture_default_str();
    sim->add_option("--cir-mean", cir.pi_bar)->capture_default_str();
    sim->add_option("--cir-psi", cir.psi)->capture_default_str();
    sim->add_option("--cir-x0", cir.pi_tilde0)->capture_default_str();
    sim->add_option("--lambda", flow.lambda, "arrivals per minute")->capture_default_str();
    sim->add_option("--p-buy", flow.p_buy)->capture_default_str();
    sim->add_option("--mu-size", flow.mu_size)->capture_default_str();
    sim->add_option("--xi-size", flow.xi_size)->capture_default_str();
    sim->add_option("--horizon-min", sim_horizon, "order-flow horizon in minutes")
        ->capture_default_str();

    // estimate ------------------------------------------------------------
    auto* est = app.add_subcommand("estimate", "estimate Model I parameters from a t,s,z CSV");
    std::string est_in = "paths.csv", est_out = "estimate.json";
    est->add_option("--input", est_in)->capture_default_str();
    est->add_option("--out", est_out)->capture_default_str();

    // execute ---------------------------------------------------------------
    auto* exe = app.add_subcommand("execute", "run the closed-form strategy on a simulated world");
    amm::LiquidationConfig lc{0.0833333333333333, 0.005, 10.0, 1.73e-4, 2.2561783e7, 14877.0};
    double exe_dt = 1.5046e-4;
    std::string exe_out = "execution.csv";
    exe->add_option("--T", lc.T, "horizon in days")->capture_default_str();
    exe->add_option("--phi", lc.phi)->capture_default_str();
    exe->add_option("--alpha", lc.alpha)->capture_default_str();
    exe->add_option("--eta", lc.eta)->capture_default_str();
    exe->add_option("--kappa", lc.kappa)->capture_default_str();
    exe->add_option("--y0", lc.y0)->capture_default_str();
    exe->add_option("--sigma", m1.sigma)->capture_default_str();
    exe->add_option("--beta", m1.beta)->capture_default_str();
    exe->add_option("--gamma", m1.gamma)->capture_default_str();
    exe->add_option("--s0", m1.S0)->capture_default_str();
    exe->add_option("--z0", m1.Z0)->capture_default_str();
    exe->add_option("--dt", exe_dt, "trading interval in days")->capture_default_str();
    exe->add_option("--out", exe_out)->capture_default_str();

    // solve-hjb -------------------------------------------------------------
    auto* hjb = app.add_subcommand("solve-hjb", "finite-difference HJB solve to CSV");
    int hjb_model = 1;
    std::string hjb_grid = "64x64x64", hjb_out = "hjb.csv";
    double hjb_tol = 1e-8;
    int hjb_iters = 50;
    hjb->add_option("--model", hjb_model, "1 or 2")->capture_default_str();
    hjb->add_option("--grid", hjb_grid, "nt x nu x nv, e.g. 64x64x64")->capture_default_str();
    hjb->add_option("--tol", hjb_tol, "Picard tolerance")->capture_default_str();
    hjb->add_option("--max-iters", hjb_iters)->capture_default_str();
    hjb->add_option("--T", lc.T)->capture_default_str();
    hjb->add_option("--phi", lc.phi)->capture_default_str();
    hjb->add_option("--alpha", lc.alpha)->capture_default_str();
    hjb->add_option("--eta", lc.eta)->capture_default_str();
    hjb->add_option("--kappa", lc.kappa)->capture_default_str();
    hjb->add_option("--sigma", m1.sigma)->capture_default_str();
    hjb->add_option("--beta", m1.beta)->capture_default_str();
    hjb->add_option("--gamma", m1.gamma)->capture_default_str();
    hjb->add_option("--s0", m1.S0)->capture_default_str();
    hjb->add_option("--z0", m1.Z0)->capture_default_str();
    hjb->add_option("--varsigma", m2.varsigma)->capture_default_str();
    hjb->add_option("--kappa0", m2.kappa0)->capture_default_str();
    hjb->add_option("--out", hjb_out)->capture_default_str();

    // lp-quote ----------------------------------------------------------------
    auto* lpq = app.add_subcommand("lp-quote", "optimal liquidity provision spread");
    amm::LpParams lp_params;
    lp_params.gamma_c = 5e-7;
    lp_params.sigma = 0.02;
    double lp_pi = 0.02, lp_rate = 1.0;
    std::string lp_out;
    lpq->add_option("--pi", lp_pi, "pool fee rate per day")->capture_default_str();
    lpq->add_option("--sigma", lp_params.sigma)->capture_default_str();
    lpq->add_option("--gamma-c", lp_params.gamma_c)->capture_default_str();
    lpq->add_option("--mu", lp_params.mu)->capture_default_str();
    lpq->add_option("--epsilon", lp_params.epsilon)->capture_default_str();
    lpq->add_option("--zeta-rebal", lp_params.zeta_rebal)->capture_default_str();
    lpq->add_option("--rate", lp_rate)->capture_default_str();
    lpq->add_option("--out", lp_out, "output JSON (stdout when empty)")->capture_default_str();

    // spillover ---------------------------------------------------------------
    auto* spl = app.add_subcommand("spillover", "VAR spillover indices from a returns CSV");
    std::string spl_in = "returns.csv", spl_out = "spillover.json";
    int spl_lags = 1, spl_horizon = 10;
    spl->add_option("--input", spl_in)->capture_default_str();
    spl->add_option("--lags", spl_lags)->capture_default_str();
    spl->add_option("--horizon", spl_horizon)->capture_default_str();
    spl->add_option("--out", spl_out)->capture_default_str();

    // env-run -------------------------------------------------------------------
    auto* env = app.add_subcommand("env-run", "run the multi-pool LP environment");
    amm::EnvConfig env_config;
    amm::EnvPoolConfig pool;
    pool.flow = flow;
    pool.kappa_rest = 394450.0;
    pool.tau = 0.003;
    pool.Z0 = 2200.0;
    int env_lower = 50, env_upper = 50;
    std::string env_out = "trajectory.csv";
    env_config.V0 = 500000.0;
    env_config.gas_per_adjust = 73.3;
    env->add_option("--lambda", pool.flow.lambda)->capture_default_str();
    env->add_option("--p-buy", pool.flow.p_buy)->capture_default_str();
    env->add_option("--mu-size", pool.flow.mu_size)->capture_default_str();
    env->add_option("--xi-size", pool.flow.xi_size)->capture_default_str();
    env->add_option("--kappa-rest", pool.kappa_rest)->capture_default_str();
    env->add_option("--tau", pool.tau)->capture_default_str();
    env->add_option("--z0", pool.Z0)->capture_default_str();
    env->add_option("--dt-min", env_config.dt_min)->capture_default_str();
    env->add_option("--horizon-min", env_config.T_min)->capture_default_str();
    env->add_option("--wealth", env_config.V0)->capture_default_str();
    env->add_option("--max-spread", env_config.max_spread)->capture_default_str();
    env->add_option("--gas", env_config.gas_per_adjust)->capture_default_str();
    env->add_option("--lower", env_lower, "lower spread in ticks")->capture_default_str();
    env->add_option("--upper", env_upper, "upper spread in ticks")->capture_default_str();
    env->add_option("--out", env_out)->capture_default_str();

    // backtest ----------------------------------------------------------------
    auto* bt = app.add_subcommand("backtest", "replay backtest over an event file");
    amm::BacktestConfig bt_config;
    std::string bt_events = "events.csv", bt_strategy = "optimal", bt_out = "backtest.csv";
    bt->add_option("--events", bt_events)->capture_default_str();
    bt->add_option("--strategy", bt_strategy, "optimal|twap|single-order")->capture_default_str();
    bt->add_option("--in-sample-sec", bt_config.in_sample_sec)->capture_default_str();
    bt->add_option("--out-sample-sec", bt_config.out_sample_sec)->capture_default_str();
    bt->add_option("--participation", bt_config.participation_rate)->capture_default_str();
    bt->add_option("--gas", bt_config.gas_per_tx)->capture_default_str();
    bt->add_option("--amm-fee", bt_config.amm_fee)->capture_default_str();
    bt->add_option("--phi", bt_config.phi)->capture_default_str();
    bt->add_option("--alpha", bt_config.alpha)->capture_default_str();
    bt->add_option("--pool-id", bt_config.pool_id)->capture_default_str();
    bt->add_option("--oracle-id", bt_config.oracle_id)->capture_default_str();
    bt->add_option("--out", bt_out)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(sim_model, sim_dt, sim_steps, seed, sim_out, m1, m2, cir, flow,
                                sim_horizon);
        if (est->parsed()) return cmd_estimate(est_in, est_out);
        if (exe->parsed()) return cmd_execute(m1, lc, 0.0, exe_dt, seed, exe_out);
        if (hjb->parsed())
            return cmd_solve_hjb(hjb_model, hjb_grid, m1, m2, lc, hjb_tol, hjb_iters, hjb_out);
        if (lpq->parsed()) return cmd_lp_quote(lp_pi, lp_params, lp_rate, lp_out);
        if (spl->parsed()) return cmd_spillover(spl_in, spl_lags, spl_horizon, spl_out);
        if (env->parsed()) {
            env_config.pools = {pool};
            return cmd_env_run(env_config, env_lower, env_upper, seed, env_out);
        }
        if (bt->parsed()) return cmd_backtest(bt_events, bt_strategy, bt_config, bt_out);
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
