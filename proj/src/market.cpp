#include "permits/market.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace permits {

double MarketSides::supply_capacity() const {
  double s = 0.0;
  for (const SellerEntry& e : sellers) s += e.capacity;
  return s;
}

double MarketSides::demand() const {
  double d = 0.0;
  for (const BuyerEntry& e : buyers) d += e.need;
  return d;
}

MarketSides MarketSides::from_positions(std::span<const double> positions,
                                        const TechnologyVector& tech) {
  MarketSides sides;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const double x = positions[i];
    if (x < 0.0)
      sides.sellers.push_back({i, -x, tech[i]});
    else
      sides.buyers.push_back({i, x});
  }
  return sides;
}

double reaction(double x, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("reaction: scale a must be positive");
  if (x < 0.0) throw std::invalid_argument("reaction: argument must be non-negative");
  if (x >= a) return 0.0;
  const double d = x * x - a * a;
  if (d >= 0.0) return 0.0;  // x*x rounded onto a*a
  return std::exp(x * x / d);
}

double price(double submitted, double demand, double penalty) {
  if (!(demand > 0.0)) throw std::invalid_argument("price: no market, demand is zero");
  if (submitted < 0.0) throw std::invalid_argument("price: negative supply");
  return penalty * reaction(submitted / demand, 1.0);
}

double marginal_revenue(double x, double rivals) {
  const double y = rivals + x;
  // Beyond saturation the mollifier tail is flat zero; cut slightly early so
  // the (y^2-1)^-2 factor cannot overflow against the vanishing exponential.
  if (y >= 1.0 - 1e-12) return 0.0;
  const double d = y * y - 1.0;
  const double bump = std::exp(y * y / d);
  return bump * (1.0 - 2.0 * x * y / (d * d));
}

namespace {

// Stationarity quartic of the no-support seller problem in y = rivals + x:
// (y^2-1)^2 = 2xy  <=>  y^4 - 4y^2 + 2*rivals*y + 1 = 0.
// Positive value means marginal exchange revenue is still positive.
double stationarity_quartic(double x, double rivals) {
  const double y = rivals + x;
  return ((y * y - 4.0) * y + 2.0 * rivals) * y + 1.0;
}

template <class F>
double bisect_root(F&& f, double lo, double hi) {
  // f(lo) > 0 > f(hi); 120 halvings take the bracket to full double precision.
  for (int it = 0; it < 120 && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double best_response(double rivals, double cap, double penalty, double price_support, Tech tech) {
  if (!(cap > 0.0)) throw std::invalid_argument("best_response: capacity must be positive");
  if (rivals < 0.0) throw std::invalid_argument("best_response: rival supply must be non-negative");
  if (!(penalty > 0.0)) throw std::invalid_argument("best_response: penalty must be positive");

  // Rivals already saturate the market: every extra permit trades at zero.
  if (rivals >= 1.0) return 0.0;

  const double hi = std::min(cap, 1.0 - rivals);

  if (tech == Tech::New && price_support > 0.0) {
    const double target = price_support / penalty;
    // Marginal exchange revenue at zero is the bare reaction value; below the
    // support rate the seller cashes everything.
    if (marginal_revenue(0.0, rivals) <= target) return 0.0;
    const auto foc = [&](double x) { return marginal_revenue(x, rivals) - target; };
    if (foc(hi) > 0.0) return cap;  // revenue still rising at the cap
    return bisect_root(foc, 0.0, hi);
  }

  // No support (or no entitlement): the quartic has exactly one root below the
  // saturation point; a capacity short of it binds.
  if (stationarity_quartic(hi, rivals) > 0.0) return cap;
  return bisect_root([&](double x) { return stationarity_quartic(x, rivals); }, 0.0, hi);
}

namespace {

struct NormalizedGame {
  std::vector<double> cap;
  std::vector<double> target;  // support rate / penalty for entitled sellers, else 0
  double penalty = 0.0;
  double price_support = 0.0;
};

// The submission at which seller i's first-order condition holds when the
// aggregate supply is pinned at s (demand normalized to 1):
//   eta(s) * (1 - 2 x s / (s^2-1)^2) = target,
// solved for x and clamped to [0, cap]. Marginal revenue falls in x at fixed
// s, so the clamps are exactly the KKT corner cases.
double fit_in(double s, double cap, double target) {
  const double eta = reaction(s, 1.0);
  if (eta <= target) return 0.0;
  const double d = s * s - 1.0;
  const double x = (1.0 - target / eta) * d * d / (2.0 * s);
  return std::clamp(x, 0.0, cap);
}

// Every seller's equilibrium submission shares one aggregate s, so the
// equilibrium is the root of the excess-supply map sum_i fit_in(s) - s.
// fit_in is non-increasing in s, which makes the map strictly decreasing:
// the root is unique and bracketed on (0, 1].
double aggregate_excess(const NormalizedGame& game, double s) {
  double total = 0.0;
  for (std::size_t i = 0; i < game.cap.size(); ++i)
    total += fit_in(s, game.cap[i], game.target[i]);
  return total - s;
}

void verify_kkt(const NormalizedGame& game, const std::vector<double>& profile, double demand,
                int rounds) {
  constexpr double kFocTol = 1e-8;
  constexpr double kEdgeTol = 1e-8;  // boundary band, matches the best-response tolerance
  const double total = std::accumulate(profile.begin(), profile.end(), 0.0);
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const double rivals = std::max(total - profile[i], 0.0);
    const double e = profile[i];

    auto fail = [&](const char* what) {
      std::vector<double> absolute(profile);
      for (double& v : absolute) v *= demand;
      throw SolverError(std::string("equilibrium verification failed: ") + what, absolute, rounds);
    };

    // independent route: the per-seller bisected best response
    const double br = best_response(rivals, game.cap[i], game.penalty, game.price_support,
                                    game.target[i] > 0.0 ? Tech::New : Tech::Old);
    if (std::abs(e - br) > kFocTol) fail("submission is not a best response");

    const double residual = marginal_revenue(e, rivals) - game.target[i];
    if (e <= kEdgeTol) {
      if (residual > kFocTol) fail("zero submission with positive marginal profit");
    } else if (e >= game.cap[i] - kEdgeTol) {
      if (residual < -kFocTol) fail("binding capacity with negative marginal profit");
    } else {
      if (std::abs(residual) > kFocTol) fail("interior submission violates the first-order condition");
    }
  }
}

}  // namespace

Equilibrium solve_game(const MarketSides& sides, double penalty, double price_support) {
  const double demand = sides.demand();
  if (!(demand > 0.0)) throw std::invalid_argument("solve_game: demand must be positive");
  if (sides.sellers.empty()) throw std::invalid_argument("solve_game: at least one seller required");

  const std::size_t n = sides.sellers.size();
  NormalizedGame game;
  game.cap.resize(n);
  game.target.resize(n);
  game.penalty = penalty;
  game.price_support = price_support;
  for (std::size_t i = 0; i < n; ++i) {
    game.cap[i] = sides.sellers[i].capacity / demand;
    game.target[i] =
        (sides.sellers[i].tech == Tech::New && price_support > 0.0) ? price_support / penalty
                                                                    : 0.0;
  }

  // Excess supply is positive near 0 (everyone fits in up to the cap) and
  // -1 at saturation; 200 halvings pin the aggregate to full precision.
  double lo = 1e-15, hi = 1.0;
  int rounds = 0;
  for (; rounds < 200 && hi - lo > 0.0; ++rounds) {
    const double mid = 0.5 * (lo + hi);
    if (aggregate_excess(game, mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  const double s = 0.5 * (lo + hi);

  std::vector<double> profile(n);
  for (std::size_t i = 0; i < n; ++i) profile[i] = fit_in(s, game.cap[i], game.target[i]);

  verify_kkt(game, profile, demand, rounds);

  Equilibrium eq;
  eq.rounds = rounds;
  eq.submission.resize(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    eq.submission[i] = profile[i] * demand;
    total += profile[i];
  }
  eq.total = total * demand;
  eq.clearing_price = penalty * reaction(std::min(total, 1.0), 1.0);
  return eq;
}

std::vector<double> match_proportional(std::span<const BuyerEntry> buyers, double submitted,
                                       double demand) {
  std::vector<double> executed(buyers.size(), 0.0);
  if (!(demand > 0.0)) return executed;
  for (std::size_t i = 0; i < buyers.size(); ++i)
    executed[i] = buyers[i].need / demand * submitted;
  return executed;
}

std::vector<double> match_stochastic(std::span<const BuyerEntry> buyers, double submitted,
                                     double demand, SplitMix64& rng) {
  std::vector<double> executed(buyers.size(), 0.0);
  if (!(demand > 0.0)) return executed;
  const double arc = std::min(submitted, demand);
  const double start = rng.uniform01() * demand;
  const double end = start + arc;

  auto overlap = [](double a, double b, double c, double d) {
    return std::max(0.0, std::min(b, d) - std::max(a, c));
  };

  double pos = 0.0;
  for (std::size_t i = 0; i < buyers.size(); ++i) {
    const double lo = pos, hi = pos + buyers[i].need;
    executed[i] = overlap(lo, hi, start, std::min(end, demand));
    if (end > demand) executed[i] += overlap(lo, hi, 0.0, end - demand);
    pos = hi;
  }
  return executed;
}

MarketOutcome clear_market(std::span<const double> positions, const TechnologyVector& tech,
                           double penalty, double price_support, Matching matching,
                           SplitMix64* rng) {
  const std::size_t m = positions.size();
  MarketOutcome out;
  out.capacity.assign(m, 0.0);
  out.need.assign(m, 0.0);
  out.submission.assign(m, 0.0);
  out.executed.assign(m, 0.0);
  out.uncovered.assign(m, 0.0);
  out.cashed.assign(m, 0.0);

  const MarketSides sides = MarketSides::from_positions(positions, tech);
  out.demand = sides.demand();
  out.supply_capacity = sides.supply_capacity();
  for (const SellerEntry& s : sides.sellers) out.capacity[s.firm] = s.capacity;
  for (const BuyerEntry& b : sides.buyers) out.need[b.firm] = b.need;

  if (out.demand > 0.0) {
    if (!sides.sellers.empty()) {
      const Equilibrium eq = solve_game(sides, penalty, price_support);
      out.submitted = eq.total;
      out.clearing_price = eq.clearing_price;
      out.rounds = eq.rounds;
      for (std::size_t k = 0; k < sides.sellers.size(); ++k)
        out.submission[sides.sellers[k].firm] = eq.submission[k];
    } else {
      // Nothing offered: the formula sits at the penalty ceiling and nothing
      // trades.
      out.submitted = 0.0;
      out.clearing_price = price(0.0, out.demand, penalty);
    }
    const std::vector<double> executed =
        (matching == Matching::Stochastic && rng != nullptr)
            ? match_stochastic(sides.buyers, out.submitted, out.demand, *rng)
            : match_proportional(sides.buyers, out.submitted, out.demand);
    for (std::size_t k = 0; k < sides.buyers.size(); ++k)
      out.executed[sides.buyers[k].firm] = executed[k];
  }
  // demand == 0: no market, no price; excess permits of new-technology firms
  // are all cashed below.

  for (std::size_t i = 0; i < m; ++i) {
    if (out.need[i] > 0.0) out.uncovered[i] = out.need[i] - out.executed[i];
    if (out.capacity[i] > 0.0 && tech[i] == Tech::New)
      out.cashed[i] = out.capacity[i] - out.submission[i];
  }
  return out;
}

std::vector<double> period_payoffs(const MarketOutcome& outcome, const TechnologyVector& tech,
                                   std::span<const double> profits, double penalty,
                                   double price_support) {
  const std::size_t m = outcome.capacity.size();
  std::vector<double> payoff(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (outcome.capacity[i] > 0.0) {
      payoff[i] = outcome.clearing_price * outcome.submission[i] + profits[i];
      if (tech[i] == Tech::New) payoff[i] += price_support * outcome.cashed[i];
    } else {
      payoff[i] = profits[i] - penalty * outcome.uncovered[i] -
                  outcome.clearing_price * outcome.executed[i];
    }
  }
  return payoff;
}

}  // namespace permits
