#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace permits {

enum class Tech : std::uint8_t { Old, New };
enum class Shock : std::uint8_t { Up, Down };

// Adoption-period sentinel: the firm keeps the old technology through the phase.
inline constexpr int kNever = std::numeric_limits<int>::max();

// Technology status of a firm with adoption period `tau` as seen in period t.
// Adoption bites in its own period: the [t, t+1] increment already uses the
// new factors when tau == t.
inline Tech tech_at(int tau, int t) { return tau <= t ? Tech::New : Tech::Old; }

struct TechnologyVector {
  std::vector<Tech> status;

  std::size_t size() const { return status.size(); }
  Tech operator[](std::size_t i) const { return status[i]; }
  int count_new() const {
    int n = 0;
    for (Tech s : status) n += (s == Tech::New);
    return n;
  }

  static TechnologyVector at_period(const std::vector<int>& adoption_time, int t) {
    TechnologyVector h;
    h.status.reserve(adoption_time.size());
    for (int tau : adoption_time) h.status.push_back(tech_at(tau, t));
    return h;
  }
};

// One realized shock sequence for a whole phase; length equals the horizon.
struct EconomyPath {
  std::vector<Shock> shocks;
  std::size_t length() const { return shocks.size(); }
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Equilibrium search failed to converge or failed KKT post-verification.
// Carries the last strategy profile for diagnosis.
struct SolverError : std::runtime_error {
  std::vector<double> last_profile;
  int rounds = 0;

  SolverError(const std::string& what, std::vector<double> profile, int r)
      : std::runtime_error(what), last_profile(std::move(profile)), rounds(r) {}
};

// Scenario enumeration would exceed the configured budget.
struct BudgetError : std::runtime_error {
  std::uint64_t required = 0;
  std::uint64_t budget = 0;

  BudgetError(std::uint64_t req, std::uint64_t bud)
      : std::runtime_error("scenario enumeration requires " + std::to_string(req) +
                           " evaluations, budget is " + std::to_string(bud)),
        required(req), budget(bud) {}
};

}  // namespace permits
