#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "permits/config.hpp"
#include "permits/types.hpp"

namespace permits {

// Number of joint adoption-timing scenarios for the firms still undecided at
// the start of a decision step, split into (firm adopts now, firm waits).
// `residual_horizon` is the number of periods left, T - t0.
struct ScenarioCounts {
  std::uint64_t adopt_now = 0;
  std::uint64_t wait = 0;
  std::uint64_t total() const { return adopt_now + wait; }
};

// (R)^(undecided-1) and R^undecided - R^(undecided-1) with R = residual
// horizon. Throws std::overflow_error if the count does not fit in 64 bits.
ScenarioCounts count_scenarios(int undecided, int residual_horizon);

// CARA utility: (1 - exp(-gamma w)) / gamma for gamma > 0, w for gamma == 0.
double cara_utility(double wealth, double gamma);

struct AdoptionOptions {
  bool compound_payoffs = false;  // compound each per-period payoff to T at rate r
  std::uint64_t budget = 10'000'000;  // max scenario evaluations per decision step
  bool memoize = true;
};

// Cache of expected per-period market results. Two scenarios price a period
// identically iff their adoption times agree once clamped to that period
// (times beyond t collapse to "not yet"), so that is the key.
class PeriodMarketCache {
 public:
  struct Entry {
    std::vector<double> payoff;  // per firm, production profit included
    double price = 0.0;
  };

  PeriodMarketCache(const ModelParams& model, std::vector<double> anchor_levels,
                    int anchor_period);

  // Returned references stay valid for the cache's lifetime.
  const Entry& get(int t, const std::vector<int>& adoption_time);
  Entry compute(int t, const std::vector<int>& adoption_time) const;

  std::size_t size() const { return cache_.size(); }

 private:
  struct KeyHash {
    std::size_t operator()(const std::vector<int>& key) const;
  };

  const ModelParams& model_;
  std::vector<double> anchor_levels_;
  int anchor_period_;
  std::unordered_map<std::vector<int>, Entry, KeyHash> cache_;
};

// Payoff of one adoption-timing scenario for one firm: the per-period expected
// payoffs from t0 to T-1 plus the adoption cost compounded to T (omitted when
// the firm never adopts). `adoption_time` holds every firm's scenario timing.
double scenario_payoff(const ModelParams& model, std::size_t firm,
                       const std::vector<int>& adoption_time, int t0,
                       const AdoptionOptions& options, PeriodMarketCache& cache);

// Expected-utility ratings of "adopt now" vs "wait" for one undecided firm,
// averaging CARA utility over the equiprobable scenario classes.
struct Rating {
  double adopt_now = 0.0;
  double wait = 0.0;
};

Rating rate_choices(const ModelParams& model, std::size_t firm, int t0,
                    const std::vector<int>& adoption_time, const AdoptionOptions& options,
                    PeriodMarketCache& cache);

// One decision step: every undecided firm whose adopt-now rating weakly beats
// its wait rating adopts at t0, simultaneously. Updates `adoption_time` and
// returns the adopters. No adoption is possible at the final period t0 = T-1
// (the scenario machinery offers no adoption column there).
std::vector<std::size_t> adoption_step(const ModelParams& model, int t0,
                                       std::vector<int>& adoption_time,
                                       const AdoptionOptions& options, PeriodMarketCache& cache);

// Period-by-period technology evolution plus the expected price stream along
// the resulting path.
struct AdoptionTrajectory {
  std::vector<int> adoption_time;            // per firm, kNever if no adoption
  std::vector<TechnologyVector> status;      // per period
  std::vector<double> expected_price;        // per period, 0 where no market
};

// Runs the adoption loop on deterministic expected trajectories (anchor q0 at
// period 0), stopping early once every firm has adopted.
AdoptionTrajectory run_adoption(const ModelParams& model, const AdoptionOptions& options = {});

}  // namespace permits
