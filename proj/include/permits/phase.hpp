#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "permits/adoption.hpp"
#include "permits/config.hpp"
#include "permits/market.hpp"
#include "permits/rng.hpp"
#include "permits/types.hpp"

namespace permits {

// Probability of one shock path under the per-period up probabilities.
double path_probability(const EconomyPath& path, std::span<const double> q);

EconomyPath draw_path(std::span<const double> q, SplitMix64& rng);

// Per-period realized record, enough to rebuild the regulator's ledger.
struct PeriodOutcome {
  double price = 0.0;
  double demand = 0.0;
  double submitted = 0.0;
  double uncovered_units = 0.0;
  double cashed_units = 0.0;
};

// One realized economy path run through a whole phase.
struct PhaseSample {
  EconomyPath path;
  std::vector<PeriodOutcome> periods;
  std::vector<double> firm_payoff;  // totals over the phase
  double uncovered_units = 0.0;     // Sum over periods and buyers
  double cashed_units = 0.0;        // Sum over periods and new-tech sellers
  double x_in = 0.0;                // penalty receipts, P * uncovered_units
  double x_out = 0.0;               // price-support outlay, P_g * cashed_units
  double net() const { return x_in - x_out; }
};

enum class ExpectationMode { Deterministic, Conditional };

struct PhaseOptions {
  Matching matching = Matching::Proportional;
  ExpectationMode mode = ExpectationMode::Deterministic;
  AdoptionOptions adoption;
};

// Runs one phase on a fixed technology trajectory. `rng` feeds the stochastic
// matcher only; pass the path's stream when matching == Stochastic.
PhaseSample simulate_phase(const ModelParams& model, const AdoptionTrajectory& trajectory,
                           const EconomyPath& path, const PhaseOptions& options = {},
                           SplitMix64* rng = nullptr);

// Conditional-expectations mode: adoption decisions are re-made each period
// with expected trajectories anchored at the realized emissions, then the
// period is realized. Exponentially costlier than the deterministic mode.
PhaseSample simulate_phase_conditional(const ModelParams& model, const EconomyPath& path,
                                       const PhaseOptions& options = {},
                                       SplitMix64* rng = nullptr);

struct SampleStats {
  double x_in = 0.0;
  double x_out = 0.0;
  double uncovered_units = 0.0;
  double cashed_units = 0.0;
  double net() const { return x_in - x_out; }
};

struct EnsembleResult {
  std::vector<SampleStats> samples;  // by path index
  std::uint64_t seed = 0;

  std::vector<double> nets() const;
};

// Monte Carlo over economy paths. Each path index gets its own generator
// stream derived from (seed, index), so results do not depend on execution
// order. In deterministic mode the trajectory is computed once and reused;
// in conditional mode adoption is recomputed along every path.
EnsembleResult monte_carlo(const ModelParams& model, int n, std::uint64_t seed,
                           const PhaseOptions& options = {});

}  // namespace permits
