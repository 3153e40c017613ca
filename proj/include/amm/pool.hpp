#pragma once

#include <cstdint>
#include <vector>

namespace amm {

// Constant-product pool with a proportional fee tier. Quantities follow the
// convention that asset Y is priced in units of asset X, so the marginal
// rate Z = x / y has units X/Y.
struct PoolState {
    double x = 0.0;      // reserves of X
    double y = 0.0;      // reserves of Y
    double kappa = 0.0;  // depth, sqrt(x*y)
    double tau = 0.0;    // fee tier in [0,1)

    static PoolState from_reserves(double x, double y, double tau = 0.0);
    static PoolState from_rate_depth(double rate, double kappa, double tau = 0.0);
};

struct Tick {
    int index = 0;
    double rate = 1.0;  // 1.0001^index
};

struct LiquidityPosition {
    Tick lower;            // Z(L)
    Tick upper;            // Z(U)
    double position_depth = 0.0;  // kappa~ >= 0
};

enum class Side { BuyY, SellY };

struct SwapResult {
    double delta_x = 0.0;      // X exchanged (paid or received by the LT)
    double delta_y = 0.0;      // Y exchanged
    double fee_paid = 0.0;     // X-equivalent fee
    double rate_before = 0.0;
    double rate_after = 0.0;
    double unitary_cost = 0.0; // |Z - delta_x/delta_y|
};

double rate_of_tick(int index);
int tick_of_rate(double rate);
Tick make_tick(int index);

double marginal_rate(const PoolState& pool);

// Applies the LT trading condition with the fee-discounted leg. The post
// state satisfies x*y = kappa^2 exactly; the fee leg is reported in units of
// X (sell-side fees, paid in Y, are marked at the pre-trade rate).
SwapResult execute_swap(PoolState& pool, Side side, double delta_y);

// Convexity approximation of the execution rate, Z - (eta/kappa) Z^{3/2} nu.
double approx_execution_rate(double rate, double kappa, double nu, double eta);
// Companion unitary-cost form (1/kappa) Z^{3/2} |dy|.
double approx_unitary_cost(double rate, double kappa, double delta_y);

// Holdings of a concentrated position marked at rate Z (three-branch formula).
struct Holdings {
    double x = 0.0;
    double y = 0.0;
};
Holdings cl_holdings(const LiquidityPosition& position, double rate);

// Position depth that invests the fraction w of wealth V at rate Z in the
// range (lower, upper); requires lower.rate < Z < upper.rate.
double wealth_to_position_depth(double wealth, double weight, double rate,
                                const Tick& lower, const Tick& upper);

// Pro-rata fee split among in-range providers; positions outside the active
// rate receive nothing and the in-range payouts sum to total_fee.
std::vector<double> distribute_fee(double total_fee,
                                   const std::vector<LiquidityPosition>& positions,
                                   double rate);

// Tick-aware pool: per-tick-range depth is the sum of the covering position
// depths, and large swaps decompose into sub-swaps per tick range.
class ClPool {
public:
    ClPool(double initial_rate, double tau);

    // rest_depth is liquidity spread uniformly over all ticks.
    void set_rest_depth(double depth) { rest_depth_ = depth; }
    void add_position(const LiquidityPosition& position);
    void clear_positions() { positions_.clear(); }

    double rate() const { return sqrt_rate_ * sqrt_rate_; }
    int active_tick() const;
    double depth_at(int tick_index) const;
    double tau() const { return tau_; }

    struct ClSwapResult {
        double delta_x = 0.0;          // total X exchanged by the LT
        double delta_y = 0.0;          // total Y exchanged by the LT
        double fee_total = 0.0;        // X-equivalent fee charged
        std::vector<double> fee_by_position;  // per stored position
        double fee_rest = 0.0;         // fee accruing to the rest depth
        double rate_after = 0.0;
        bool fully_filled = true;
    };

    // side BuyY raises the rate, SellY lowers it. Orders are sized in units
    // of X: for buys, size_x is what the LT pays; for sells, what the LT
    // receives. Returns per-position fee credits (fees accrue in X).
    ClSwapResult swap_for_x(Side side, double size_x);

private:
    void credit_fees(ClSwapResult& res, double fee, int tick_index, double depth) const;

    double sqrt_rate_;
    double tau_;
    double rest_depth_ = 0.0;
    std::vector<LiquidityPosition> positions_;
};

}  // namespace amm
