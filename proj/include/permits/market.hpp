#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "permits/config.hpp"
#include "permits/rng.hpp"
#include "permits/types.hpp"

namespace permits {

struct SellerEntry {
  std::size_t firm = 0;
  double capacity = 0.0;  // unused permits available, -x > 0
  Tech tech = Tech::Old;
};

struct BuyerEntry {
  std::size_t firm = 0;
  double need = 0.0;  // uncovered emissions, x >= 0
};

// Partition of the firms by the sign of their net position; x == 0 counts as
// a (inert) buyer.
struct MarketSides {
  std::vector<SellerEntry> sellers;
  std::vector<BuyerEntry> buyers;

  double supply_capacity() const;
  double demand() const;

  static MarketSides from_positions(std::span<const double> positions,
                                    const TechnologyVector& tech);
};

// Bump-tail reaction function: exp(x^2 / (x^2 - a^2)) on [0, a), 0 beyond.
// Smooth, equal to 1 at x = 0 and flat 0 at saturation.
double reaction(double x, double a);

// Exchange value of a permit given total submitted supply: penalty *
// reaction(submitted / demand, 1). Requires demand > 0.
double price(double submitted, double demand, double penalty);

// Marginal exchange revenue (as a fraction of the penalty) of a seller
// submitting x when rivals submit `rivals`, both normalized by demand.
// d/dx [ x * reaction(rivals + x, 1) ].
double marginal_revenue(double x, double rivals);

// Optimal submission (normalized by demand) against rival submissions
// `rivals`, capped at `cap`. Old-technology sellers (or price_support == 0)
// solve the stationarity quartic; new-technology sellers under price support
// equate marginal exchange revenue with price_support/penalty and may prefer
// to cash everything (return 0).
double best_response(double rivals, double cap, double penalty, double price_support, Tech tech);

struct Equilibrium {
  std::vector<double> submission;  // per seller, aligned with sides.sellers
  double total = 0.0;              // aggregate submitted supply
  double clearing_price = 0.0;
  int rounds = 0;
};

// Solves the sellers' non-cooperative submission game by damped synchronous
// best-response iteration from the zero profile; the result is post-verified
// against per-seller best responses and KKT complementarity. Requires
// demand > 0 and at least one seller; throws SolverError on non-convergence
// or failed verification.
Equilibrium solve_game(const MarketSides& sides, double penalty, double price_support);

// Deterministic proportional rationing: executed_i = need_i / demand * submitted.
std::vector<double> match_proportional(std::span<const BuyerEntry> buyers, double submitted,
                                       double demand);

// Random-rotation rationing: buyers occupy contiguous segments of [0, demand),
// a uniformly rotated arc of length `submitted` is executed. Per-buyer
// expectation equals the proportional split exactly; executed <= need.
std::vector<double> match_stochastic(std::span<const BuyerEntry> buyers, double submitted,
                                     double demand, SplitMix64& rng);

enum class Matching { Proportional, Stochastic };

// Everything one period of trading produces, indexed by firm.
struct MarketOutcome {
  double demand = 0.0;
  double supply_capacity = 0.0;
  double submitted = 0.0;
  double clearing_price = 0.0;  // 0 when demand == 0 (no market)
  int rounds = 0;

  std::vector<double> capacity;    // -x for sellers, else 0
  std::vector<double> need;        // x for buyers, else 0
  std::vector<double> submission;  // equilibrium supply, sellers only
  std::vector<double> executed;    // filled orders, buyers only
  std::vector<double> uncovered;   // need - executed, penalized at P
  std::vector<double> cashed;      // capacity - submission for new-tech sellers
};

// Full per-period clearing: split sides, solve the game (when a market
// exists), match orders, and account for cashed permits. With demand == 0
// there is no market: no trades, no price, new-tech sellers cash their whole
// excess. With demand > 0 and no sellers the price sits at the penalty
// ceiling and every buyer stays uncovered.
MarketOutcome clear_market(std::span<const double> positions, const TechnologyVector& tech,
                           double penalty, double price_support,
                           Matching matching = Matching::Proportional,
                           SplitMix64* rng = nullptr);

// Per-firm payoff for the period: sellers earn price * submission plus
// price_support * cashed (new technology only); buyers pay the penalty on
// uncovered emissions and the price on executed orders. `profits` are the
// per-firm production profits added to every firm.
std::vector<double> period_payoffs(const MarketOutcome& outcome, const TechnologyVector& tech,
                                   std::span<const double> profits, double penalty,
                                   double price_support);

}  // namespace permits
