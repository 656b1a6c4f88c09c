#pragma once

#include <cstdint>
#include <span>

namespace fbai {

/// Harmonic-type normaliser shared by the SR and CR phase budgets:
/// 1/2 + sum_{k=2..m} 1/k.  Throws std::invalid_argument for m < 1.
double log_bar(std::int64_t m);

/// Discarding threshold 1/sqrt(beta) - 1.  Negative once beta > 1.
double g_threshold(double beta);

/// Bernoulli KL divergence d(a, b) with the 0*log(0) = 0 convention.
/// b must lie in (0,1) unless a == b, in which case 0 is returned.
double kl_bernoulli(double a, double b);

double logit(double p);
double logistic(double x);

/// Neumaier (improved Kahan) summation.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

double compensated_sum(std::span<const double> xs);

}  // namespace fbai
