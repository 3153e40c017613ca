#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "amm/sim_env.hpp"

using namespace amm;

namespace {

EnvConfig single_pool_config() {
    EnvConfig c;
    EnvPoolConfig p;
    p.flow = OrderFlowParams{1.0 / 3.0, 0.5, 132030.0, 20000.0};
    p.kappa_rest = 394450.0;
    p.tau = 0.003;
    p.Z0 = 2200.0;
    c.pools = {p};
    c.dt_min = 30.0;
    c.T_min = 1440.0;
    c.V0 = 500000.0;
    c.max_spread = 500;
    c.gas_per_adjust = 73.3;
    return c;
}

EnvAction flat_action(int lower, int upper) {
    EnvAction a;
    a.weights = {1.0};
    a.lower = {lower};
    a.upper = {upper};
    return a;
}

}  // namespace

TEST_CASE("environment reset") {
    const auto cfg = single_pool_config();
    const auto s = env_reset(cfg, 1);
    CHECK(s.wealth() == doctest::Approx(500000.0).epsilon(1e-14));
    CHECK(s.pools[0].rate == 2200.0);
    CHECK(s.pools[0].fees_accrued == 0.0);
    CHECK_FALSE(s.terminated);
}

TEST_CASE("gas-only step when no orders arrive") {
    auto cfg = single_pool_config();
    cfg.pools[0].flow.lambda = 1e-12;  // essentially no arrivals
    auto s = env_reset(cfg, 5);
    const auto info = env_step(cfg, s, flat_action(cfg.max_spread, cfg.max_spread));
    CHECK(info.fees_charged == 0.0);
    CHECK(info.pools_adjusted == 1);
    CHECK(s.wealth() == doctest::Approx(500000.0 - 73.3).epsilon(1e-12));
}

TEST_CASE("identical actions skip the adjustment and its gas") {
    auto cfg = single_pool_config();
    auto s = env_reset(cfg, 6);
    const auto a = flat_action(100, 100);
    const auto first = env_step(cfg, s, a);
    CHECK(first.pools_adjusted == 1);
    const double w1 = s.wealth();
    const auto second = env_step(cfg, s, a);
    CHECK(second.pools_adjusted == 0);
    CHECK(second.gas_paid == 0.0);
    (void)w1;
}

TEST_CASE("fee conservation per step") {
    auto cfg = single_pool_config();
    auto s = env_reset(cfg, 7);
    for (int k = 0; k < 8; ++k) {
        const auto info = env_step(cfg, s, flat_action(50, 50));
        CHECK(info.fees_charged ==
              doctest::Approx(info.fees_earned + info.fees_rest).epsilon(1e-12));
    }
}

TEST_CASE("sole provider collects all fees") {
    auto cfg = single_pool_config();
    cfg.pools[0].kappa_rest = 0.0;
    cfg.gas_per_adjust = 0.0;
    cfg.pools[0].flow.mu_size = 5000.0;
    cfg.pools[0].flow.xi_size = 500.0;
    auto s = env_reset(cfg, 8);
    const auto info = env_step(cfg, s, flat_action(cfg.max_spread, cfg.max_spread));
    CHECK(info.fees_charged > 0.0);
    CHECK(info.fees_earned == doctest::Approx(info.fees_charged).epsilon(1e-12));
    CHECK(info.fees_rest == 0.0);
}

TEST_CASE("driftless fee-free rate is a martingale") {
    auto cfg = single_pool_config();
    cfg.pools[0].tau = 0.0;
    cfg.gas_per_adjust = 0.0;
    cfg.V0 = 1.0;  // spectator
    double sum = 0.0, sumsq = 0.0;
    int count = 0;
    for (int ep = 0; ep < 40; ++ep) {
        auto s = env_reset(cfg, 100 + ep);
        double z_prev = s.pools[0].rate;
        for (int k = 0; k < 48; ++k) {
            env_step(cfg, s, flat_action(cfg.max_spread, cfg.max_spread));
            const double r = std::log(s.pools[0].rate / z_prev);
            sum += r;
            sumsq += r * r;
            ++count;
            z_prev = s.pools[0].rate;
        }
    }
    const double mean = sum / count;
    const double sd = std::sqrt(sumsq / count - mean * mean);
    CHECK(std::abs(mean) < 3.0 * sd / std::sqrt(static_cast<double>(count)));
}

TEST_CASE("wealth identity after the order flow") {
    auto cfg = single_pool_config();
    auto s = env_reset(cfg, 9);
    for (int k = 0; k < 4; ++k) {
        env_step(cfg, s, flat_action(120, 80));
        double recomputed = s.cash;
        for (const auto& p : s.pools)
            recomputed += p.x_hold + p.y_hold * p.rate + p.fees_accrued;
        CHECK(s.wealth() == doctest::Approx(recomputed).epsilon(1e-12));
        CHECK(s.wealth() > 0.0);
    }
}

TEST_CASE("trend rewards aligned skew") {
    auto cfg = single_pool_config();
    cfg.pools[0].flow.p_buy = 0.9;  // strong upward trend
    cfg.gas_per_adjust = 0.0;
    cfg.T_min = 480.0;
    const int episodes = 120;
    double right = 0.0, left = 0.0;
    for (int ep = 0; ep < episodes; ++ep) {
        const auto up = run_episode(
            cfg, [](const EnvState&, const EnvConfig&) {
                EnvAction a;
                a.weights = {1.0};
                a.lower = {50};
                a.upper = {400};
                return a;
            },
            2000 + ep);
        const auto dn = run_episode(
            cfg, [](const EnvState&, const EnvConfig&) {
                EnvAction a;
                a.weights = {1.0};
                a.lower = {400};
                a.upper = {50};
                return a;
            },
            2000 + ep);
        right += up.terminal_wealth;
        left += dn.terminal_wealth;
    }
    CHECK(right / episodes > left / episodes);
}

TEST_CASE("episode determinism") {
    const auto cfg = single_pool_config();
    const auto strat = [](const EnvState&, const EnvConfig&) {
        EnvAction a;
        a.weights = {1.0};
        a.lower = {60};
        a.upper = {60};
        return a;
    };
    const auto a = run_episode(cfg, strat, 31);
    const auto b = run_episode(cfg, strat, 31);
    CHECK(a.terminal_wealth == b.terminal_wealth);
    CHECK(a.trajectory.size() == b.trajectory.size());
}

TEST_CASE("performance criteria") {
    SUBCASE("constant sample") {
        const std::vector<double> v(10, 500000.0);
        CHECK(criterion(v, CriterionKind::MeanVariance, 1e-6, 500000.0) ==
              doctest::Approx(500000.0).epsilon(1e-14));
        CHECK_THROWS_AS(criterion(v, CriterionKind::Sharpe, 0.0, 500000.0), std::runtime_error);
    }
    SUBCASE("shifted constant") {
        const std::vector<double> v(10, 500100.0);
        CHECK(criterion(v, CriterionKind::MeanVariance, 1e-6, 500000.0) ==
              doctest::Approx(500100.0).epsilon(1e-14));
    }
    SUBCASE("matches two-pass sample statistics") {
        std::vector<double> v{1.0, 2.0, 4.0, 8.0};
        const double mean = (1.0 + 2.0 + 4.0 + 8.0) / 4.0;
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        var /= 3.0;
        CHECK(criterion(v, CriterionKind::Sharpe, 0.0, 0.0) ==
              doctest::Approx(mean / std::sqrt(var)).epsilon(1e-12));
        CHECK(criterion(v, CriterionKind::MeanVariance, 0.25, 0.0) ==
              doctest::Approx(mean - 0.25 * var).epsilon(1e-12));
    }
}
