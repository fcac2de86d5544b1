#include "permits/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "permits/emissions.hpp"

namespace permits {

using nlohmann::json;

double PolicyParams::allocation_for(std::size_t firm, int period) const {
  if (has_schedule()) return schedule[firm][static_cast<std::size_t>(period)];
  const AllocationPair& p = family[firm];
  return allocation(p.alpha, p.beta, period);
}

std::string ValidationReport::to_string() const {
  if (ok()) return "pass";
  std::ostringstream out;
  for (const Violation& v : violations) out << v.field << ": " << v.message << "\n";
  return out.str();
}

namespace {

void fail(ValidationReport& report, std::string field, std::string message) {
  report.violations.push_back({std::move(field), std::move(message)});
}

bool finite(double x) { return std::isfinite(x); }

void check_firm(ValidationReport& report, const FirmParams& f, const std::string& path) {
  for (auto [value, name] : {std::pair{f.q0, "q0"}, {f.u_old, "u_old"}, {f.d_old, "d_old"},
                             {f.u_new, "u_new"}, {f.d_new, "d_new"}, {f.cost_new, "cost_new"},
                             {f.s_up, "s_up"}, {f.s_down, "s_down"},
                             {f.risk_aversion, "risk_aversion"}}) {
    if (!finite(value)) fail(report, path + "." + name, "must be finite");
  }
  if (!(f.u_old > f.d_old)) fail(report, path + ".u_old", "u_old > d_old required");
  if (!(f.d_old >= 1.0)) fail(report, path + ".d_old", "d_old >= 1 required");
  if (!(f.u_new > f.d_new)) fail(report, path + ".u_new", "u_new > d_new required");
  if (!(f.d_new >= 1.0)) fail(report, path + ".d_new", "d_new >= 1 required");
  if (!(f.u_new <= f.u_old))
    fail(report, path + ".u_new", "new technology must not emit faster than old (u_new <= u_old)");
  if (!(f.d_new <= f.d_old))
    fail(report, path + ".d_new", "new technology must not emit faster than old (d_new <= d_old)");
  if (!(f.q0 > 0.0)) fail(report, path + ".q0", "initial emissions must be positive");
  if (!(f.cost_new >= 0.0)) fail(report, path + ".cost_new", "adoption cost must be non-negative");
  if (!(f.s_up > 0.0)) fail(report, path + ".s_up", "base profit must be positive");
  if (!(f.s_down > 0.0)) fail(report, path + ".s_down", "base profit must be positive");
  if (!(f.risk_aversion >= 0.0))
    fail(report, path + ".risk_aversion", "risk aversion must be non-negative");
}

}  // namespace

ValidationReport validate(const PolicyParams& policy, const std::vector<FirmParams>& firms,
                          const EconomyParams& economy) {
  ValidationReport report;
  const std::size_t m = firms.size();

  if (m == 0) fail(report, "firms", "at least one firm required");
  if (policy.horizon < 1) fail(report, "policy.horizon", "horizon must be at least 1 period");
  if (!(policy.penalty > 0.0) || !finite(policy.penalty))
    fail(report, "policy.penalty", "penalty must be positive");
  if (!(policy.price_support >= 0.0) || !finite(policy.price_support))
    fail(report, "policy.price_support", "price support must be non-negative");
  else if (!(policy.price_support < policy.penalty))
    fail(report, "policy.price_support", "price_support must be strictly below penalty");

  if (policy.has_schedule()) {
    if (policy.schedule.size() != m)
      fail(report, "policy.allocation.schedule", "one row per firm required");
    for (std::size_t i = 0; i < policy.schedule.size(); ++i) {
      const auto& row = policy.schedule[i];
      const std::string path = "policy.allocation.schedule[" + std::to_string(i) + "]";
      if (policy.horizon >= 1 && row.size() != static_cast<std::size_t>(policy.horizon))
        fail(report, path, "one entry per period required");
      for (std::size_t t = 0; t < row.size(); ++t)
        if (!(row[t] >= 0.0) || !finite(row[t]))
          fail(report, path + "[" + std::to_string(t) + "]", "allocations must be non-negative");
    }
  } else {
    if (policy.family.size() != m)
      fail(report, "policy.allocation.family", "one (alpha, beta) pair per firm required");
    for (std::size_t i = 0; i < policy.family.size(); ++i) {
      const std::string path = "policy.allocation.family[" + std::to_string(i) + "]";
      if (!(policy.family[i].beta > 0.0) || !finite(policy.family[i].beta))
        fail(report, path + ".beta", "beta must be positive");
      if (!(policy.family[i].alpha <= 0.0) || !finite(policy.family[i].alpha))
        fail(report, path + ".alpha", "alpha must be non-positive (non-increasing schedule)");
    }
  }

  for (std::size_t i = 0; i < m; ++i)
    check_firm(report, firms[i], "firms[" + std::to_string(i) + "]");

  if (policy.horizon >= 1 && economy.q.size() != static_cast<std::size_t>(policy.horizon))
    fail(report, "economy.q", "one up-probability per period required");
  for (std::size_t t = 0; t < economy.q.size(); ++t)
    if (!(economy.q[t] >= 0.0 && economy.q[t] <= 1.0))
      fail(report, "economy.q[" + std::to_string(t) + "]", "probability must lie in [0, 1]");
  if (!(economy.r >= 0.0) || !finite(economy.r))
    fail(report, "economy.r", "riskless rate must be non-negative");
  if (!(economy.rho > economy.r) || !finite(economy.rho))
    fail(report, "economy.rho", "appreciation rate must exceed the riskless rate");

  return report;
}

ValidationReport validate(const ModelParams& model) {
  return validate(model.policy, model.firms, model.economy);
}

namespace {

double lerp_at(double first, double last, std::size_t i, std::size_t count) {
  if (count == 1) return first;
  const double w = static_cast<double>(i) / static_cast<double>(count - 1);
  return first + (last - first) * w;
}

}  // namespace

std::vector<FirmParams> interpolate_firms(const FirmParams& first, const FirmParams& last,
                                          std::size_t count) {
  if (count == 0) throw ConfigError("firm count must be at least 1");
  std::vector<FirmParams> firms(count);
  for (std::size_t i = 0; i < count; ++i) {
    FirmParams& f = firms[i];
    f.q0 = lerp_at(first.q0, last.q0, i, count);
    f.u_old = lerp_at(first.u_old, last.u_old, i, count);
    f.d_old = lerp_at(first.d_old, last.d_old, i, count);
    f.u_new = lerp_at(first.u_new, last.u_new, i, count);
    f.d_new = lerp_at(first.d_new, last.d_new, i, count);
    f.cost_new = lerp_at(first.cost_new, last.cost_new, i, count);
    f.s_up = lerp_at(first.s_up, last.s_up, i, count);
    f.s_down = lerp_at(first.s_down, last.s_down, i, count);
    f.risk_aversion = lerp_at(first.risk_aversion, last.risk_aversion, i, count);
  }
  return firms;
}

std::vector<AllocationPair> interpolate_allocation(const AllocationPair& first,
                                                   const AllocationPair& last, std::size_t count) {
  if (count == 0) throw ConfigError("firm count must be at least 1");
  std::vector<AllocationPair> pairs(count);
  for (std::size_t i = 0; i < count; ++i) {
    pairs[i].alpha = lerp_at(first.alpha, last.alpha, i, count);
    pairs[i].beta = lerp_at(first.beta, last.beta, i, count);
  }
  return pairs;
}

namespace {

const json& require_key(const json& doc, const char* key, const char* where) {
  auto it = doc.find(key);
  if (it == doc.end())
    throw ConfigError(std::string("missing key '") + key + "' in " + where);
  return *it;
}

double require_number(const json& doc, const char* key, const char* where) {
  const json& v = require_key(doc, key, where);
  if (!v.is_number()) throw ConfigError(std::string(where) + "." + key + " must be a number");
  return v.get<double>();
}

FirmParams parse_firm(const json& doc, const char* where) {
  FirmParams f;
  f.q0 = require_number(doc, "q0", where);
  f.u_old = require_number(doc, "u_old", where);
  f.d_old = require_number(doc, "d_old", where);
  f.u_new = require_number(doc, "u_new", where);
  f.d_new = require_number(doc, "d_new", where);
  f.cost_new = require_number(doc, "cost_new", where);
  f.s_up = require_number(doc, "s_up", where);
  f.s_down = require_number(doc, "s_down", where);
  f.risk_aversion = doc.value("risk_aversion", 0.0);
  return f;
}

AllocationPair parse_pair(const json& doc, const char* where) {
  AllocationPair p;
  p.alpha = require_number(doc, "alpha", where);
  p.beta = require_number(doc, "beta", where);
  return p;
}

}  // namespace

ModelParams load_model(const json& doc) {
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
  ModelParams model;

  const json& jf = require_key(doc, "firms", "configuration");
  if (jf.contains("explicit")) {
    for (const json& entry : jf.at("explicit"))
      model.firms.push_back(parse_firm(entry, "firms.explicit[]"));
  } else if (jf.contains("bounds")) {
    const json& bounds = jf.at("bounds");
    const auto count = require_key(jf, "count", "firms").get<std::size_t>();
    model.firms = interpolate_firms(parse_firm(require_key(bounds, "first", "firms.bounds"),
                                               "firms.bounds.first"),
                                    parse_firm(require_key(bounds, "last", "firms.bounds"),
                                               "firms.bounds.last"),
                                    count);
  } else {
    throw ConfigError("firms requires either 'explicit' or 'bounds' + 'count'");
  }
  const std::size_t m = model.firms.size();
  if (m == 0) throw ConfigError("firms list is empty");

  const json& jp = require_key(doc, "policy", "configuration");
  model.policy.horizon = require_key(jp, "horizon", "policy").get<int>();
  model.policy.penalty = require_number(jp, "penalty", "policy");
  model.policy.price_support = jp.value("price_support", 0.0);

  const json& ja = require_key(jp, "allocation", "policy");
  if (ja.contains("schedule")) {
    model.policy.schedule = ja.at("schedule").get<std::vector<std::vector<double>>>();
  } else if (ja.contains("family")) {
    const json& fam = ja.at("family");
    if (fam.is_array()) {
      for (const json& entry : fam)
        model.policy.family.push_back(parse_pair(entry, "policy.allocation.family[]"));
    } else {
      model.policy.family = interpolate_allocation(
          parse_pair(require_key(fam, "first", "policy.allocation.family"),
                     "policy.allocation.family.first"),
          parse_pair(require_key(fam, "last", "policy.allocation.family"),
                     "policy.allocation.family.last"),
          m);
    }
  } else {
    throw ConfigError("policy.allocation requires either 'family' or 'schedule'");
  }

  const json& je = require_key(doc, "economy", "configuration");
  const json& jq = require_key(je, "q", "economy");
  if (jq.is_number()) {
    model.economy.q.assign(static_cast<std::size_t>(std::max(model.policy.horizon, 0)),
                           jq.get<double>());
  } else {
    model.economy.q = jq.get<std::vector<double>>();
  }
  model.economy.r = require_number(je, "r", "economy");
  model.economy.rho = require_number(je, "rho", "economy");

  return model;
}

ModelParams load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("configuration parse error in " + path + ": " + e.what());
  }
  return load_model(doc);
}

json to_json(const ModelParams& model) {
  json doc;
  doc["policy"]["horizon"] = model.policy.horizon;
  doc["policy"]["penalty"] = model.policy.penalty;
  doc["policy"]["price_support"] = model.policy.price_support;
  if (model.policy.has_schedule()) {
    doc["policy"]["allocation"]["schedule"] = model.policy.schedule;
  } else {
    json fam = json::array();
    for (const AllocationPair& p : model.policy.family)
      fam.push_back({{"alpha", p.alpha}, {"beta", p.beta}});
    doc["policy"]["allocation"]["family"] = fam;
  }
  json firms = json::array();
  for (const FirmParams& f : model.firms) {
    firms.push_back({{"q0", f.q0},
                     {"u_old", f.u_old},
                     {"d_old", f.d_old},
                     {"u_new", f.u_new},
                     {"d_new", f.d_new},
                     {"cost_new", f.cost_new},
                     {"s_up", f.s_up},
                     {"s_down", f.s_down},
                     {"risk_aversion", f.risk_aversion}});
  }
  doc["firms"]["explicit"] = firms;
  doc["economy"]["q"] = model.economy.q;
  doc["economy"]["r"] = model.economy.r;
  doc["economy"]["rho"] = model.economy.rho;
  return doc;
}

}  // namespace permits
