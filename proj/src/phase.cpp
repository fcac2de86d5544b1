#include "permits/phase.hpp"

#include <numeric>
#include <stdexcept>

#include "permits/emissions.hpp"

namespace permits {

double path_probability(const EconomyPath& path, std::span<const double> q) {
  if (path.length() != q.size())
    throw std::invalid_argument("path_probability: path and probability lengths differ");
  double p = 1.0;
  for (std::size_t t = 0; t < q.size(); ++t)
    p *= path.shocks[t] == Shock::Up ? q[t] : 1.0 - q[t];
  return p;
}

EconomyPath draw_path(std::span<const double> q, SplitMix64& rng) {
  EconomyPath path;
  path.shocks.reserve(q.size());
  for (double qt : q) path.shocks.push_back(rng.uniform01() < qt ? Shock::Up : Shock::Down);
  return path;
}

namespace {

void realize_period(const ModelParams& model, int t, const TechnologyVector& tech, Shock shock,
                    std::vector<double>& levels, const PhaseOptions& options, SplitMix64* rng,
                    PhaseSample& sample) {
  const std::size_t m = model.firm_count();
  std::vector<double> increment(m), position(m), profits(m);
  for (std::size_t i = 0; i < m; ++i) {
    increment[i] = realized_increment(model.firms[i], tech[i], shock, levels[i]);
    position[i] = increment[i] - model.policy.allocation_for(i, t);
    profits[i] = period_profit(model.firms[i], model.economy, t, shock);
  }

  const MarketOutcome outcome = clear_market(position, tech, model.policy.penalty,
                                             model.policy.price_support, options.matching, rng);
  const std::vector<double> payoff = period_payoffs(outcome, tech, profits, model.policy.penalty,
                                                    model.policy.price_support);

  PeriodOutcome record;
  record.price = outcome.clearing_price;
  record.demand = outcome.demand;
  record.submitted = outcome.submitted;
  record.uncovered_units = std::accumulate(outcome.uncovered.begin(), outcome.uncovered.end(), 0.0);
  record.cashed_units = std::accumulate(outcome.cashed.begin(), outcome.cashed.end(), 0.0);
  sample.periods.push_back(record);

  sample.uncovered_units += record.uncovered_units;
  sample.cashed_units += record.cashed_units;
  for (std::size_t i = 0; i < m; ++i) {
    sample.firm_payoff[i] += payoff[i];
    levels[i] += increment[i];
  }
}

}  // namespace

PhaseSample simulate_phase(const ModelParams& model, const AdoptionTrajectory& trajectory,
                           const EconomyPath& path, const PhaseOptions& options, SplitMix64* rng) {
  const int horizon = model.policy.horizon;
  if (path.length() != static_cast<std::size_t>(horizon))
    throw std::invalid_argument("simulate_phase: path length must equal the horizon");

  PhaseSample sample;
  sample.path = path;
  sample.firm_payoff.assign(model.firm_count(), 0.0);
  std::vector<double> levels(model.firm_count());
  for (std::size_t i = 0; i < levels.size(); ++i) levels[i] = model.firms[i].q0;

  for (int t = 0; t < horizon; ++t)
    realize_period(model, t, trajectory.status[static_cast<std::size_t>(t)],
                   path.shocks[static_cast<std::size_t>(t)], levels, options, rng, sample);

  sample.x_in = model.policy.penalty * sample.uncovered_units;
  sample.x_out = model.policy.price_support * sample.cashed_units;
  return sample;
}

PhaseSample simulate_phase_conditional(const ModelParams& model, const EconomyPath& path,
                                       const PhaseOptions& options, SplitMix64* rng) {
  const int horizon = model.policy.horizon;
  if (path.length() != static_cast<std::size_t>(horizon))
    throw std::invalid_argument("simulate_phase: path length must equal the horizon");

  PhaseSample sample;
  sample.path = path;
  sample.firm_payoff.assign(model.firm_count(), 0.0);
  std::vector<double> levels(model.firm_count());
  for (std::size_t i = 0; i < levels.size(); ++i) levels[i] = model.firms[i].q0;

  std::vector<int> adoption_time(model.firm_count(), kNever);
  for (int t = 0; t < horizon; ++t) {
    // Decide with expectations re-anchored at the realized levels, then
    // realize the period.
    PeriodMarketCache cache(model, levels, t);
    adoption_step(model, t, adoption_time, options.adoption, cache);
    realize_period(model, t, TechnologyVector::at_period(adoption_time, t),
                   path.shocks[static_cast<std::size_t>(t)], levels, options, rng, sample);
  }

  sample.x_in = model.policy.penalty * sample.uncovered_units;
  sample.x_out = model.policy.price_support * sample.cashed_units;
  return sample;
}

std::vector<double> EnsembleResult::nets() const {
  std::vector<double> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) out[i] = samples[i].net();
  return out;
}

EnsembleResult monte_carlo(const ModelParams& model, int n, std::uint64_t seed,
                           const PhaseOptions& options) {
  if (n < 1) throw std::invalid_argument("monte_carlo: at least one path required");

  EnsembleResult result;
  result.seed = seed;
  result.samples.reserve(static_cast<std::size_t>(n));

  AdoptionTrajectory trajectory;
  if (options.mode == ExpectationMode::Deterministic)
    trajectory = run_adoption(model, options.adoption);

  for (int k = 0; k < n; ++k) {
    SplitMix64 stream = SplitMix64::stream(seed, static_cast<std::uint64_t>(k));
    const EconomyPath path = draw_path(model.economy.q, stream);
    const PhaseSample sample =
        options.mode == ExpectationMode::Deterministic
            ? simulate_phase(model, trajectory, path, options, &stream)
            : simulate_phase_conditional(model, path, options, &stream);
    result.samples.push_back(
        {sample.x_in, sample.x_out, sample.uncovered_units, sample.cashed_units});
  }
  return result;
}

}  // namespace permits
