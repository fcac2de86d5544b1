#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "permits/types.hpp"

namespace permits {

// One member of the allocation family beta * (t+1)^alpha.
struct AllocationPair {
  double alpha = 0.0;
  double beta = 0.0;
};

// The regulator's choice variables for one phase.
struct PolicyParams {
  int horizon = 0;           // number of regulated periods T
  double penalty = 0.0;      // P, per uncovered emission unit and period
  double price_support = 0.0;  // P_g, per cashed permit; 0 disables the instrument

  // Exactly one of the two is used: a per-firm (alpha, beta) family, or an
  // explicit per-firm, per-period schedule (permits are infinitely divisible).
  std::vector<AllocationPair> family;
  std::vector<std::vector<double>> schedule;  // [firm][period]

  bool has_schedule() const { return !schedule.empty(); }
  double allocation_for(std::size_t firm, int period) const;
};

// Per-firm primitives. Growth factors are per-period multipliers on
// cumulative emissions; s_up/s_down are base production profits.
struct FirmParams {
  double q0 = 0.0;        // initial cumulative emissions
  double u_old = 0.0, d_old = 0.0;  // factors under the old technology
  double u_new = 0.0, d_new = 0.0;  // factors under the new technology
  double cost_new = 0.0;  // lump-sum adoption cost
  double s_up = 0.0, s_down = 0.0;  // per-period base profits
  double risk_aversion = 0.0;       // CARA curvature gamma, 0 = linear
};

struct EconomyParams {
  std::vector<double> q;  // per-period up-move probability, length = horizon
  double r = 0.0;         // riskless rate
  double rho = 0.0;       // product appreciation, rho > r
};

// Validated bundle passed around the engine.
struct ModelParams {
  PolicyParams policy;
  std::vector<FirmParams> firms;
  EconomyParams economy;

  std::size_t firm_count() const { return firms.size(); }
};

struct Violation {
  std::string field;    // e.g. "firms[2].u_old"
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

// Pure check of every invariant; violations are data, not faults.
ValidationReport validate(const PolicyParams& policy, const std::vector<FirmParams>& firms,
                          const EconomyParams& economy);
ValidationReport validate(const ModelParams& model);

// Linear interpolation across the firm index: firm 0 receives `first`,
// firm count-1 receives `last`, every field interpolated independently.
// count == 1 yields the `first` endpoint.
std::vector<FirmParams> interpolate_firms(const FirmParams& first, const FirmParams& last,
                                          std::size_t count);
std::vector<AllocationPair> interpolate_allocation(const AllocationPair& first,
                                                   const AllocationPair& last, std::size_t count);

// JSON configuration: top-level keys `policy`, `economy`, `firms`
// (`explicit` array or `bounds` + `count`). Throws ConfigError on schema
// problems; invariant violations are reported by validate().
ModelParams load_model(const nlohmann::json& doc);
ModelParams load_model_file(const std::string& path);

// Canonical resolved form (bounds expanded, scalar q broadcast); this is what
// gets hashed into run manifests.
nlohmann::json to_json(const ModelParams& model);

}  // namespace permits
