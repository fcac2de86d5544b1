#include "permits/adoption.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "permits/emissions.hpp"
#include "permits/market.hpp"

namespace permits {

namespace {

std::uint64_t checked_pow(std::uint64_t base, int exponent) {
  std::uint64_t result = 1;
  for (int k = 0; k < exponent; ++k) {
    if (base != 0 && result > static_cast<std::uint64_t>(-1) / base)
      throw std::overflow_error("scenario count overflows 64 bits");
    result *= base;
  }
  return result;
}

}  // namespace

ScenarioCounts count_scenarios(int undecided, int residual_horizon) {
  if (undecided < 1) throw std::invalid_argument("count_scenarios: undecided must be at least 1");
  if (residual_horizon < 1)
    throw std::invalid_argument("count_scenarios: residual horizon must be at least 1");
  const std::uint64_t r = static_cast<std::uint64_t>(residual_horizon);
  const std::uint64_t adopt_now = checked_pow(r, undecided - 1);
  const std::uint64_t total = checked_pow(r, undecided);
  return {adopt_now, total - adopt_now};
}

double cara_utility(double wealth, double gamma) {
  if (gamma > 0.0) return (1.0 - std::exp(-gamma * wealth)) / gamma;
  return wealth;
}

PeriodMarketCache::PeriodMarketCache(const ModelParams& model, std::vector<double> anchor_levels,
                                     int anchor_period)
    : model_(model), anchor_levels_(std::move(anchor_levels)), anchor_period_(anchor_period) {}

namespace {

// Adoption times clamped to the period: anything after t collapses to the
// single "not yet" value t+1. Two scenarios with equal clamps price the
// period identically. The period index rides along as the last element.
std::vector<int> cache_key(const std::vector<int>& adoption_time, int t) {
  std::vector<int> key(adoption_time.size() + 1);
  for (std::size_t i = 0; i < adoption_time.size(); ++i)
    key[i] = adoption_time[i] <= t ? adoption_time[i] : t + 1;
  key.back() = t;
  return key;
}

}  // namespace

std::size_t PeriodMarketCache::KeyHash::operator()(const std::vector<int>& key) const {
  std::uint64_t h = 1469598103934665603ULL;
  for (int v : key) {
    h ^= static_cast<std::uint64_t>(v) + 0x9E3779B9ULL;
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h);
}

PeriodMarketCache::Entry PeriodMarketCache::compute(int t,
                                                    const std::vector<int>& adoption_time) const {
  const PositionTable positions =
      expected_positions_from(anchor_levels_, anchor_period_, model_, adoption_time, t);
  const MarketOutcome outcome =
      clear_market(positions.net_position, positions.tech, model_.policy.penalty,
                   model_.policy.price_support);
  std::vector<double> profits(model_.firm_count());
  for (std::size_t i = 0; i < profits.size(); ++i)
    profits[i] = expected_period_profit(model_.firms[i], model_.economy, t);
  Entry entry;
  entry.payoff = period_payoffs(outcome, positions.tech, profits, model_.policy.penalty,
                                model_.policy.price_support);
  entry.price = outcome.clearing_price;
  return entry;
}

const PeriodMarketCache::Entry& PeriodMarketCache::get(int t,
                                                       const std::vector<int>& adoption_time) {
  std::vector<int> key = cache_key(adoption_time, t);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  return cache_.emplace(std::move(key), compute(t, adoption_time)).first->second;
}

namespace {

struct StepRatings {
  std::vector<std::size_t> undecided;
  std::vector<Rating> rating;  // aligned with undecided
};

// Scenario columns for one undecided firm over a residual horizon R:
// column c < R-1 means adoption at t0 + c, the last column means never.
int column_to_time(int column, int t0, int residual) {
  return column < residual - 1 ? t0 + column : kNever;
}

// Rates every undecided firm in one mixed-radix pass over the joint scenario
// set (no matrices are materialized).
StepRatings rate_step(const ModelParams& model, int t0, const std::vector<int>& adoption_time,
                      const AdoptionOptions& options, PeriodMarketCache& cache) {
  const int horizon = model.policy.horizon;
  const int residual = horizon - t0;

  StepRatings out;
  for (std::size_t i = 0; i < adoption_time.size(); ++i)
    if (adoption_time[i] == kNever) out.undecided.push_back(i);
  const std::size_t undecided_count = out.undecided.size();
  if (undecided_count == 0) return out;
  if (residual < 2)
    throw std::logic_error("rate_step: no adoption column at the final decision period");

  ScenarioCounts counts;
  try {
    counts = count_scenarios(static_cast<int>(undecided_count), residual);
  } catch (const std::overflow_error&) {
    throw BudgetError(static_cast<std::uint64_t>(-1), options.budget);
  }
  if (counts.total() > options.budget)
    throw BudgetError(counts.total(), options.budget);

  const double rate = 1.0 + model.economy.r;
  std::vector<double> sum_adopt(undecided_count, 0.0), sum_wait(undecided_count, 0.0);
  std::vector<int> columns(undecided_count, 0);
  std::vector<int> scenario(adoption_time);
  const int periods = horizon - t0;
  std::vector<const PeriodMarketCache::Entry*> entries(static_cast<std::size_t>(periods));
  std::vector<PeriodMarketCache::Entry> scratch(options.memoize ? 0 : periods);

  for (;;) {
    for (std::size_t j = 0; j < undecided_count; ++j)
      scenario[out.undecided[j]] = column_to_time(columns[j], t0, residual);

    for (int t = t0; t < horizon; ++t) {
      const std::size_t k = static_cast<std::size_t>(t - t0);
      if (options.memoize) {
        entries[k] = &cache.get(t, scenario);
      } else {
        scratch[k] = cache.compute(t, scenario);
        entries[k] = &scratch[k];
      }
    }

    for (std::size_t j = 0; j < undecided_count; ++j) {
      const std::size_t firm = out.undecided[j];
      double total = 0.0;
      for (int t = t0; t < horizon; ++t) {
        double phi = entries[static_cast<std::size_t>(t - t0)]->payoff[firm];
        if (options.compound_payoffs) phi *= std::pow(rate, horizon - (t + 1));
        total += phi;
      }
      const int tau = scenario[firm];
      if (tau != kNever) total -= std::pow(rate, horizon - tau) * model.firms[firm].cost_new;
      const double utility = cara_utility(total, model.firms[firm].risk_aversion);
      (columns[j] == 0 ? sum_adopt[j] : sum_wait[j]) += utility;
    }

    // next mixed-radix counter value
    std::size_t j = 0;
    while (j < undecided_count && ++columns[j] == residual) columns[j++] = 0;
    if (j == undecided_count) break;
  }

  out.rating.resize(undecided_count);
  for (std::size_t j = 0; j < undecided_count; ++j) {
    out.rating[j].adopt_now = sum_adopt[j] / static_cast<double>(counts.adopt_now);
    out.rating[j].wait = sum_wait[j] / static_cast<double>(counts.wait);
  }
  return out;
}

}  // namespace

double scenario_payoff(const ModelParams& model, std::size_t firm,
                       const std::vector<int>& adoption_time, int t0,
                       const AdoptionOptions& options, PeriodMarketCache& cache) {
  const int horizon = model.policy.horizon;
  const double rate = 1.0 + model.economy.r;
  double total = 0.0;
  for (int t = t0; t < horizon; ++t) {
    const PeriodMarketCache::Entry entry =
        options.memoize ? cache.get(t, adoption_time) : cache.compute(t, adoption_time);
    double phi = entry.payoff[firm];
    if (options.compound_payoffs) phi *= std::pow(rate, horizon - (t + 1));
    total += phi;
  }
  const int tau = adoption_time[firm];
  if (tau != kNever && tau >= t0)
    total -= std::pow(rate, horizon - tau) * model.firms[firm].cost_new;
  return total;
}

Rating rate_choices(const ModelParams& model, std::size_t firm, int t0,
                    const std::vector<int>& adoption_time, const AdoptionOptions& options,
                    PeriodMarketCache& cache) {
  const StepRatings ratings = rate_step(model, t0, adoption_time, options, cache);
  for (std::size_t j = 0; j < ratings.undecided.size(); ++j)
    if (ratings.undecided[j] == firm) return ratings.rating[j];
  throw std::invalid_argument("rate_choices: firm is not undecided at t0");
}

std::vector<std::size_t> adoption_step(const ModelParams& model, int t0,
                                       std::vector<int>& adoption_time,
                                       const AdoptionOptions& options, PeriodMarketCache& cache) {
  std::vector<std::size_t> adopters;
  if (t0 >= model.policy.horizon - 1) return adopters;  // no adoption column left

  const StepRatings ratings = rate_step(model, t0, adoption_time, options, cache);
  for (std::size_t j = 0; j < ratings.undecided.size(); ++j)
    if (ratings.rating[j].adopt_now >= ratings.rating[j].wait)
      adopters.push_back(ratings.undecided[j]);
  for (std::size_t firm : adopters) adoption_time[firm] = t0;  // simultaneous
  return adopters;
}

AdoptionTrajectory run_adoption(const ModelParams& model, const AdoptionOptions& options) {
  const int horizon = model.policy.horizon;
  const std::size_t m = model.firm_count();

  std::vector<double> anchor(m);
  for (std::size_t i = 0; i < m; ++i) anchor[i] = model.firms[i].q0;
  PeriodMarketCache cache(model, anchor, 0);

  AdoptionTrajectory trajectory;
  trajectory.adoption_time.assign(m, kNever);
  for (int t0 = 0; t0 < horizon - 1; ++t0) {
    const bool all_adopted =
        std::none_of(trajectory.adoption_time.begin(), trajectory.adoption_time.end(),
                     [](int tau) { return tau == kNever; });
    if (all_adopted) break;
    adoption_step(model, t0, trajectory.adoption_time, options, cache);
  }

  trajectory.status.reserve(static_cast<std::size_t>(horizon));
  trajectory.expected_price.reserve(static_cast<std::size_t>(horizon));
  for (int t = 0; t < horizon; ++t) {
    trajectory.status.push_back(TechnologyVector::at_period(trajectory.adoption_time, t));
    const PeriodMarketCache::Entry entry = options.memoize
                                               ? cache.get(t, trajectory.adoption_time)
                                               : cache.compute(t, trajectory.adoption_time);
    trajectory.expected_price.push_back(entry.price);
  }
  return trajectory;
}

}  // namespace permits
