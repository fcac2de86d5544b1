#include "permits/risk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace permits {

namespace {

// Smallest sample index k with k/n > t, robust to t*n landing a hair under an
// integer (jump points of the empirical CDF).
std::size_t quantile_index(std::size_t n, double t) {
  const double scaled = static_cast<double>(n) * t;
  const auto k = static_cast<std::size_t>(std::floor(scaled + 1e-9));
  return std::min(k, n - 1);
}

}  // namespace

EmpiricalSample::EmpiricalSample(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw std::invalid_argument("EmpiricalSample: empty sample");
  std::sort(values_.begin(), values_.end());
}

double EmpiricalSample::mean() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s / static_cast<double>(values_.size());
}

double EmpiricalSample::stddev() const {
  if (values_.size() < 2) return 0.0;
  const double mu = mean();
  double s = 0.0;
  for (double v : values_) s += (v - mu) * (v - mu);
  return std::sqrt(s / static_cast<double>(values_.size() - 1));
}

double EmpiricalSample::upper_quantile(double t) const {
  if (!(t > 0.0 && t < 1.0))
    throw std::invalid_argument("upper_quantile: level must lie in (0, 1)");
  return values_[quantile_index(values_.size(), t)];
}

double value_at_risk(const EmpiricalSample& sample, double lambda, RiskConvention convention) {
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw std::invalid_argument("value_at_risk: confidence level must lie in (0, 1]");
  const double q =
      lambda < 1.0 ? sample.upper_quantile(lambda) : sample.max();
  return convention == RiskConvention::Standard ? -q : q;
}

double average_value_at_risk(const EmpiricalSample& sample, double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw std::invalid_argument("average_value_at_risk: confidence level must lie in (0, 1]");
  const std::vector<double>& v = sample.values();
  const std::size_t n = v.size();
  const double scaled = static_cast<double>(n) * lambda;
  const auto full = std::min(static_cast<std::size_t>(std::floor(scaled + 1e-9)), n);

  // Piecewise-constant quantile function: full steps of mass 1/n plus a
  // fractional last step.
  double tail = 0.0;
  for (std::size_t i = 0; i < full; ++i) tail += v[i];
  const double frac = scaled - static_cast<double>(full);
  if (frac > 1e-9 && full < n) tail += frac * v[full];
  return -tail / scaled;
}

SelfFinancingAssessment assess_self_financing(const EmpiricalSample& nets, RiskMeasure measure,
                                              double lambda) {
  const double value = measure == RiskMeasure::VaR
                           ? value_at_risk(nets, lambda, RiskConvention::Standard)
                           : average_value_at_risk(nets, lambda);
  return {value, value <= 0.0};
}

DistributionTable empirical_cdf_pdf(const EmpiricalSample& sample, int bins) {
  if (bins < 1) throw std::invalid_argument("empirical_cdf_pdf: at least one bin required");
  const std::vector<double>& v = sample.values();
  const std::size_t n = v.size();

  DistributionTable table;
  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 < n && v[i + 1] == v[i]) continue;  // keep the last of each run
    table.support.push_back(v[i]);
    table.cdf.push_back(static_cast<double>(i + 1) / static_cast<double>(n));
  }

  double lo = v.front(), hi = v.back();
  if (hi == lo) {
    // Degenerate support: one unit-width bin carrying all the mass.
    table.bin_left = {lo - 0.5};
    table.bin_right = {lo + 0.5};
    table.density = {1.0};
    return table;
  }
  const double width = (hi - lo) / static_cast<double>(bins);
  std::vector<double> count(static_cast<std::size_t>(bins), 0.0);
  for (double x : v) {
    auto b = static_cast<std::size_t>((x - lo) / width);
    count[std::min(b, static_cast<std::size_t>(bins - 1))] += 1.0;
  }
  for (int b = 0; b < bins; ++b) {
    table.bin_left.push_back(lo + width * b);
    table.bin_right.push_back(lo + width * (b + 1));
    table.density.push_back(count[static_cast<std::size_t>(b)] /
                            (static_cast<double>(n) * width));
  }
  return table;
}

}  // namespace permits
