#include "permits/emissions.hpp"

#include <algorithm>
#include <cmath>

namespace permits {

double allocation(double alpha, double beta, int period) {
  return beta * std::pow(static_cast<double>(period) + 1.0, alpha);
}

double growth_factor(const FirmParams& firm, Tech tech, Shock shock) {
  if (tech == Tech::Old) return shock == Shock::Up ? firm.u_old : firm.d_old;
  return shock == Shock::Up ? firm.u_new : firm.d_new;
}

double expected_factor(const FirmParams& firm, Tech tech, double q_t) {
  const double u = tech == Tech::Old ? firm.u_old : firm.u_new;
  const double d = tech == Tech::Old ? firm.d_old : firm.d_new;
  return q_t * u + (1.0 - q_t) * d;
}

double expected_emission_level_from(double anchor_level, int anchor_period, const FirmParams& firm,
                                    int adoption_time, int t, std::span<const double> q) {
  double level = anchor_level;
  for (int s = anchor_period; s < t; ++s)
    level *= expected_factor(firm, tech_at(adoption_time, s), q[static_cast<std::size_t>(s)]);
  return level;
}

double expected_emission_level(const FirmParams& firm, int adoption_time, int t,
                               std::span<const double> q) {
  return expected_emission_level_from(firm.q0, 0, firm, adoption_time, t, q);
}

double expected_increment_from(double anchor_level, int anchor_period, const FirmParams& firm,
                               int adoption_time, int t, std::span<const double> q) {
  const double level =
      expected_emission_level_from(anchor_level, anchor_period, firm, adoption_time, t, q);
  return level * (expected_factor(firm, tech_at(adoption_time, t),
                                  q[static_cast<std::size_t>(t)]) -
                  1.0);
}

double expected_increment(const FirmParams& firm, int adoption_time, int t,
                          std::span<const double> q) {
  return expected_increment_from(firm.q0, 0, firm, adoption_time, t, q);
}

double realized_increment(const FirmParams& firm, Tech tech, Shock shock, double level) {
  return level * (growth_factor(firm, tech, shock) - 1.0);
}

double period_profit(const FirmParams& firm, const EconomyParams& economy, int t, Shock shock) {
  const double base = shock == Shock::Up ? firm.s_up : firm.s_down;
  return std::pow(1.0 + economy.rho, t + 1) * base;
}

double expected_period_profit(const FirmParams& firm, const EconomyParams& economy, int t) {
  const double q = economy.q[static_cast<std::size_t>(t)];
  return std::pow(1.0 + economy.rho, t + 1) * (q * firm.s_up + (1.0 - q) * firm.s_down);
}

PositionTable expected_positions_from(std::span<const double> anchor_levels, int anchor_period,
                                      const ModelParams& model,
                                      const std::vector<int>& adoption_time, int t) {
  const std::size_t m = model.firm_count();
  PositionTable table;
  table.settlement_period = t + 1;
  table.tech = TechnologyVector::at_period(adoption_time, t);
  table.net_position.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double inc = expected_increment_from(anchor_levels[i], anchor_period, model.firms[i],
                                               adoption_time[i], t, model.economy.q);
    table.net_position[i] = inc - model.policy.allocation_for(i, t);
  }
  return table;
}

PositionTable expected_positions(const ModelParams& model, const std::vector<int>& adoption_time,
                                 int t) {
  std::vector<double> q0(model.firm_count());
  std::transform(model.firms.begin(), model.firms.end(), q0.begin(),
                 [](const FirmParams& f) { return f.q0; });
  return expected_positions_from(q0, 0, model, adoption_time, t);
}

}  // namespace permits
