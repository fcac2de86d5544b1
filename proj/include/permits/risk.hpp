#pragma once

#include <cstddef>
#include <vector>

#include "permits/types.hpp"

namespace permits {

// Sorted empirical law with uniform weights.
class EmpiricalSample {
 public:
  explicit EmpiricalSample(std::vector<double> values);  // throws on empty

  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double min() const { return values_.front(); }
  double max() const { return values_.back(); }
  double mean() const;
  double stddev() const;

  // Generalized upper quantile inf{l | P(Y <= l) > t}, right-continuous in t.
  double upper_quantile(double t) const;  // t in (0, 1)

 private:
  std::vector<double> values_;
};

enum class RiskConvention {
  Standard,  // monetary: -q(lambda), cash needed to make the position acceptable
  Paper,     // raw upper quantile q(lambda)
};

enum class RiskMeasure { VaR, AVaR };

double value_at_risk(const EmpiricalSample& sample, double lambda,
                     RiskConvention convention = RiskConvention::Standard);

// -(1/lambda) * integral_0^lambda q(t) dt over the empirical quantile
// function, integrated exactly piecewise.
double average_value_at_risk(const EmpiricalSample& sample, double lambda);

struct SelfFinancingAssessment {
  double value = 0.0;
  bool acceptable = false;  // value <= 0: tax-payers' funds are not required
};

SelfFinancingAssessment assess_self_financing(const EmpiricalSample& nets, RiskMeasure measure,
                                              double lambda);

struct DistributionTable {
  std::vector<double> support;  // sorted unique values
  std::vector<double> cdf;      // P(Y <= support[i])
  std::vector<double> bin_left, bin_right, density;  // density-normalized histogram
};

DistributionTable empirical_cdf_pdf(const EmpiricalSample& sample, int bins);

}  // namespace permits
