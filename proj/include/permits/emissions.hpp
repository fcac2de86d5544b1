#pragma once

#include <span>
#include <vector>

#include "permits/config.hpp"
#include "permits/types.hpp"

namespace permits {

// Allocation family member: beta * (period+1)^alpha. Non-increasing in the
// period whenever alpha <= 0.
double allocation(double alpha, double beta, int period);

// u/d factor for the given technology and shock; >= 1 for valid firms.
double growth_factor(const FirmParams& firm, Tech tech, Shock shock);

// One-period expected factor q*u + (1-q)*d under the given technology.
double expected_factor(const FirmParams& firm, Tech tech, double q_t);

// Deterministic expected emission trajectory: cumulative level at period t
// when the firm switches from old to new factors at `adoption_time`
// (kNever = stays old). Level(0) = q0.
double expected_emission_level(const FirmParams& firm, int adoption_time, int t,
                               std::span<const double> q);

// Same trajectory re-anchored: grows `anchor_level` from `anchor_period`
// instead of q0 from 0 (the conditional-expectations mode).
double expected_emission_level_from(double anchor_level, int anchor_period, const FirmParams& firm,
                                    int adoption_time, int t, std::span<const double> q);

// Expected one-period emission increment over [t, t+1]; the period-t factor is
// already the new one when t == adoption_time.
double expected_increment(const FirmParams& firm, int adoption_time, int t,
                          std::span<const double> q);
double expected_increment_from(double anchor_level, int anchor_period, const FirmParams& firm,
                               int adoption_time, int t, std::span<const double> q);

// Realized one-period increment from the current cumulative level.
double realized_increment(const FirmParams& firm, Tech tech, Shock shock, double level);

// Production profit over [t, t+1]: (1+rho)^(t+1) * s_shock.
double period_profit(const FirmParams& firm, const EconomyParams& economy, int t, Shock shock);
double expected_period_profit(const FirmParams& firm, const EconomyParams& economy, int t);

// Per-firm expected net positions for the period-[t, t+1] market:
// expected increment minus allocation. Negative = permit excess (seller),
// non-negative = shortage (buyer).
struct PositionTable {
  int settlement_period = 0;  // t+1
  TechnologyVector tech;      // statuses during the period
  std::vector<double> net_position;
};

PositionTable expected_positions(const ModelParams& model, const std::vector<int>& adoption_time,
                                 int t);
PositionTable expected_positions_from(std::span<const double> anchor_levels, int anchor_period,
                                      const ModelParams& model,
                                      const std::vector<int>& adoption_time, int t);

}  // namespace permits
