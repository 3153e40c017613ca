#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "amm/pool.hpp"
#include "amm/rng.hpp"

using namespace amm;

TEST_CASE("tick arithmetic") {
    CHECK(rate_of_tick(0) == 1.0);
    CHECK(rate_of_tick(1) == doctest::Approx(1.0001).epsilon(1e-15));

    // Bracketing condition Z(i) < rate <= Z(i+1), with the closed form as a
    // cross-check away from boundaries.
    const int i = tick_of_rate(2000.0);
    CHECK(rate_of_tick(i) < 2000.0);
    CHECK(rate_of_tick(i + 1) >= 2000.0);
    CHECK(i == static_cast<int>(std::floor(std::log(2000.0) / std::log(1.0001))));

    // Exact boundaries resolve to the left interval.
    CHECK(tick_of_rate(rate_of_tick(100)) == 99);
    CHECK(tick_of_rate(rate_of_tick(-7)) == -8);
    CHECK_THROWS_AS(tick_of_rate(0.0), std::domain_error);
    CHECK_THROWS_AS(tick_of_rate(-3.0), std::domain_error);

    // Monotonicity over a range of indices.
    for (int k = -50; k < 50; ++k) CHECK(rate_of_tick(k) < rate_of_tick(k + 1));
}

TEST_CASE("marginal rate") {
    const auto pool = PoolState::from_reserves(1000.0, 100.0);
    CHECK(marginal_rate(pool) == doctest::Approx(10.0).epsilon(1e-14));
    // Z = kappa^2 / y^2 agrees with the ratio.
    CHECK(pool.kappa * pool.kappa / (pool.y * pool.y) ==
          doctest::Approx(marginal_rate(pool)).epsilon(1e-12));

    const auto sym = PoolState::from_reserves(42.0, 42.0);
    CHECK(marginal_rate(sym) == doctest::Approx(1.0).epsilon(1e-14));

    const auto liquid = PoolState::from_reserves(2690.77 * 5000.0, 5000.0);
    CHECK(marginal_rate(liquid) == doctest::Approx(2690.77).epsilon(1e-12));
}

TEST_CASE("execute_swap exact constant product") {
    SUBCASE("fee-free sell") {
        auto pool = PoolState::from_reserves(1000.0, 100.0);
        const auto res = execute_swap(pool, Side::SellY, 10.0);
        CHECK(res.delta_x == doctest::Approx(1000.0 - 100000.0 / 110.0).epsilon(1e-14));
        CHECK(res.rate_after == doctest::Approx(100000.0 / (110.0 * 110.0)).epsilon(1e-14));
        CHECK(pool.x * pool.y == doctest::Approx(pool.kappa * pool.kappa).epsilon(1e-13));
    }
    SUBCASE("zero trade") {
        auto pool = PoolState::from_reserves(1000.0, 100.0);
        const auto res = execute_swap(pool, Side::SellY, 0.0);
        CHECK(res.delta_x == 0.0);
        CHECK(pool.x == 1000.0);
        CHECK(pool.y == 100.0);
    }
    SUBCASE("fee-discounted sell leg") {
        auto pool = PoolState::from_reserves(1000.0, 100.0, 0.003);
        const auto res = execute_swap(pool, Side::SellY, 10.0);
        CHECK(res.delta_x ==
              doctest::Approx(1000.0 - 100000.0 / (100.0 + 0.997 * 10.0)).epsilon(1e-14));
        CHECK(pool.x * pool.y == doctest::Approx(pool.kappa * pool.kappa).epsilon(1e-13));
    }
    SUBCASE("depletion and domain errors") {
        auto pool = PoolState::from_reserves(1000.0, 100.0);
        CHECK_THROWS_AS(execute_swap(pool, Side::BuyY, 100.0), std::runtime_error);
        CHECK_THROWS_AS(execute_swap(pool, Side::SellY, -1.0), std::domain_error);
    }
    SUBCASE("randomized swaps preserve the product") {
        Rng rng(7);
        for (int trial = 0; trial < 2000; ++trial) {
            const double x = rng.uniform(1.0, 1e9);
            const double y = rng.uniform(1.0, 1e6);
            const double tau = rng.bernoulli(0.5) ? 0.0 : rng.uniform(0.0, 0.01);
            auto pool = PoolState::from_reserves(x, y, tau);
            const double k2 = pool.kappa * pool.kappa;
            const bool buy = rng.bernoulli(0.5);
            const double dy = buy ? rng.uniform(0.0, 0.5 * y) : rng.uniform(0.0, 2.0 * y);
            execute_swap(pool, buy ? Side::BuyY : Side::SellY, dy);
            CHECK(std::abs(pool.x * pool.y - k2) / k2 < 1e-12);
        }
    }
    SUBCASE("delta_x strictly increasing and convex in delta_y") {
        const auto base = PoolState::from_reserves(1000.0, 100.0);
        double prev = 0.0, prev_inc = 0.0;
        for (int k = 1; k <= 20; ++k) {
            auto pool = base;
            const auto res = execute_swap(pool, Side::SellY, 5.0 * k);
            CHECK(res.delta_x > prev);
            // Received X grows strictly slower: convex level function.
            if (k > 1) CHECK(res.delta_x - prev < prev_inc);
            prev_inc = res.delta_x - prev;
            prev = res.delta_x;
        }
    }
}

TEST_CASE("unitary cost approximation") {
    SUBCASE("no trade, no impact") {
        CHECK(approx_execution_rate(10.0, 100.0, 0.0, 1.0) == 10.0);
    }
    SUBCASE("spec example at ten percent of reserves") {
        auto pool = PoolState::from_reserves(1000.0, 100.0);
        const auto res = execute_swap(pool, Side::SellY, 10.0);
        const double approx = approx_unitary_cost(10.0, std::sqrt(100000.0), 10.0);
        CHECK(approx == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(res.unitary_cost == doctest::Approx(10.0 / 11.0).epsilon(1e-12));
        CHECK(std::abs(approx - res.unitary_cost) / res.unitary_cost ==
              doctest::Approx(0.1).epsilon(1e-10));
    }
    SUBCASE("infinite depth removes impact") {
        CHECK(approx_execution_rate(10.0, 1e18, 1000.0, 1.0) == doctest::Approx(10.0).epsilon(1e-12));
    }
    SUBCASE("error vanishes faster than the trade size") {
        Rng rng(21);
        for (int trial = 0; trial < 50; ++trial) {
            const double x = rng.uniform(10.0, 1e8);
            const double y = rng.uniform(10.0, 1e5);
            const auto base = PoolState::from_reserves(x, y);
            const double z = marginal_rate(base);
            const double dy = 0.01 * y;
            auto p1 = base;
            auto p2 = base;
            const double e1 = std::abs(approx_unitary_cost(z, base.kappa, dy) -
                                       execute_swap(p1, Side::SellY, dy).unitary_cost);
            const double e2 = std::abs(approx_unitary_cost(z, base.kappa, 0.5 * dy) -
                                       execute_swap(p2, Side::SellY, 0.5 * dy).unitary_cost);
            CHECK(e2 < 0.5 * e1);
        }
    }
}

TEST_CASE("concentrated holdings") {
    const LiquidityPosition pos{Tick{0, 1.0}, Tick{1, 9.0}, 100.0};
    SUBCASE("in range") {
        const auto h = cl_holdings(pos, 4.0);
        CHECK(h.x == doctest::Approx(100.0).epsilon(1e-14));
        CHECK(h.y == doctest::Approx(100.0 * (0.5 - 1.0 / 3.0)).epsilon(1e-14));
    }
    SUBCASE("below range holds only Y") {
        const auto h = cl_holdings(pos, 0.5);
        CHECK(h.x == 0.0);
        CHECK(h.y == doctest::Approx(100.0 * (1.0 - 1.0 / 3.0)).epsilon(1e-14));
    }
    SUBCASE("above range holds only X") {
        const auto h = cl_holdings(pos, 16.0);
        CHECK(h.x == doctest::Approx(200.0).epsilon(1e-14));
        CHECK(h.y == 0.0);
    }
    SUBCASE("continuity at the boundaries") {
        const double eps = 1e-9;
        const auto lo_out = cl_holdings(pos, 1.0 - eps);
        const auto lo_in = cl_holdings(pos, 1.0 + eps);
        CHECK(lo_out.x == doctest::Approx(lo_in.x).epsilon(1e-6));
        CHECK(lo_out.y == doctest::Approx(lo_in.y).epsilon(1e-6));
        const auto hi_in = cl_holdings(pos, 9.0 - eps);
        const auto hi_out = cl_holdings(pos, 9.0 + eps);
        CHECK(hi_in.x == doctest::Approx(hi_out.x).epsilon(1e-6));
        CHECK(hi_in.y == doctest::Approx(hi_out.y).epsilon(1e-6));
    }
}

TEST_CASE("wealth to position depth") {
    SUBCASE("worked example") {
        const Tick lo{0, 1.0}, hi{1, 9.0};
        const double kt = wealth_to_position_depth(100.0, 1.0, 4.0, lo, hi);
        CHECK(kt == doctest::Approx(60.0).epsilon(1e-14));
        const auto h = cl_holdings(LiquidityPosition{lo, hi, kt}, 4.0);
        CHECK(h.x == doctest::Approx(60.0).epsilon(1e-13));
        CHECK(h.y == doctest::Approx(10.0).epsilon(1e-13));
        CHECK(h.x + h.y * 4.0 == doctest::Approx(100.0).epsilon(1e-13));
    }
    SUBCASE("zero weight") {
        CHECK(wealth_to_position_depth(100.0, 0.0, 4.0, Tick{0, 1.0}, Tick{1, 9.0}) == 0.0);
    }
    SUBCASE("five-hundred-tick range round trip") {
        const double z = 2200.0;
        const int i = tick_of_rate(z);
        const Tick lo = make_tick(i - 500), hi = make_tick(i + 501);
        const double kt = wealth_to_position_depth(500000.0, 1.0, z, lo, hi);
        const auto h = cl_holdings(LiquidityPosition{lo, hi, kt}, z);
        CHECK(std::abs(h.x + h.y * z - 500000.0) / 500000.0 < 1e-10);
    }
    SUBCASE("rate outside the range") {
        CHECK_THROWS_AS(wealth_to_position_depth(100.0, 1.0, 0.5, Tick{0, 1.0}, Tick{1, 9.0}),
                        std::domain_error);
    }
}

TEST_CASE("fee distribution") {
    const Tick lo{0, 1.0}, hi{1, 9.0};
    SUBCASE("sole provider collects everything") {
        const std::vector<LiquidityPosition> ps{{lo, hi, 300.0}};
        const auto out = distribute_fee(10.0, ps, 4.0);
        CHECK(out[0] == doctest::Approx(10.0).epsilon(1e-14));
    }
    SUBCASE("pro rata share") {
        const std::vector<LiquidityPosition> ps{{lo, hi, 60.0}, {lo, hi, 240.0}};
        const auto out = distribute_fee(10.0, ps, 4.0);
        CHECK(out[0] == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(out[1] == doctest::Approx(8.0).epsilon(1e-14));
        CHECK(out[0] + out[1] == doctest::Approx(10.0).epsilon(1e-14));
    }
    SUBCASE("out-of-range provider earns nothing") {
        const std::vector<LiquidityPosition> ps{{lo, hi, 60.0}, {Tick{2, 16.0}, Tick{3, 25.0}, 40.0}};
        const auto out = distribute_fee(10.0, ps, 4.0);
        CHECK(out[0] == doctest::Approx(10.0).epsilon(1e-14));
        CHECK(out[1] == 0.0);
    }
    SUBCASE("no active liquidity") {
        const std::vector<LiquidityPosition> ps{{lo, hi, 60.0}};
        CHECK_THROWS_AS(distribute_fee(10.0, ps, 100.0), std::runtime_error);
    }
}

TEST_CASE("tick-aware pool") {
    SUBCASE("single-range swap matches the uniform pool") {
        const double z0 = 1.00005;  // mid of tick range 0
        ClPool pool(z0, 0.0);
        pool.set_rest_depth(1e6);
        const auto res = pool.swap_for_x(Side::BuyY, 5.0);
        auto uni = PoolState::from_rate_depth(z0, 1e6, 0.0);
        const auto sw = execute_swap(uni, Side::BuyY, res.delta_y);
        CHECK(res.delta_x == doctest::Approx(sw.delta_x).epsilon(1e-10));
        CHECK(pool.rate() == doctest::Approx(sw.rate_after).epsilon(1e-12));
    }
    SUBCASE("cross-tick swap conserves fees and direction") {
        ClPool pool(2000.0, 0.003);
        pool.set_rest_depth(1e5);
        const int i = tick_of_rate(2000.0);
        pool.add_position({make_tick(i - 10), make_tick(i + 11), 5e5});
        const auto buy = pool.swap_for_x(Side::BuyY, 3e6);  // crosses several ticks
        CHECK(pool.rate() > 2000.0);
        CHECK(buy.fee_total ==
              doctest::Approx(buy.fee_rest + buy.fee_by_position[0]).epsilon(1e-12));
        CHECK(buy.fee_total == doctest::Approx(0.003 * 3e6).epsilon(1e-12));
        const auto sell = pool.swap_for_x(Side::SellY, 3e6);
        CHECK(sell.fully_filled);
        CHECK(sell.fee_total > 0.0);
    }
    SUBCASE("liquidity exhaustion is reported") {
        ClPool pool(1.0001, 0.0);
        const int i = pool.active_tick();
        pool.add_position({make_tick(i), make_tick(i + 1), 1000.0});
        const auto res = pool.swap_for_x(Side::BuyY, 1e9);
        CHECK_FALSE(res.fully_filled);
    }
    SUBCASE("agent fees accrue only in range") {
        ClPool pool(2000.0, 0.01);
        pool.set_rest_depth(1e6);
        const int i = tick_of_rate(2000.0);
        pool.add_position({make_tick(i + 100), make_tick(i + 120), 1e6});  // far above
        const auto res = pool.swap_for_x(Side::SellY, 1000.0);
        CHECK(res.fee_by_position[0] == 0.0);
        CHECK(res.fee_rest == doctest::Approx(res.fee_total).epsilon(1e-12));
    }
}
