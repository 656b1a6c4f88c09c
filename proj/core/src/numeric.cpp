#include "fbai/numeric.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fbai {

double log_bar(std::int64_t m) {
  if (m < 1) {
    throw std::invalid_argument("log_bar: m must be >= 1, got " + std::to_string(m));
  }
  CompensatedSum acc;
  acc.add(0.5);
  for (std::int64_t k = 2; k <= m; ++k) {
    acc.add(1.0 / static_cast<double>(k));
  }
  return acc.value();
}

double g_threshold(double beta) {
  if (!(beta > 0.0)) {
    throw std::invalid_argument("g_threshold: beta must be > 0");
  }
  return 1.0 / std::sqrt(beta) - 1.0;
}

namespace {

double xlogx_over(double x, double y) {
  if (x == 0.0) return 0.0;
  return x * std::log(x / y);
}

}  // namespace

double kl_bernoulli(double a, double b) {
  if (!(a >= 0.0 && a <= 1.0) || !(b >= 0.0 && b <= 1.0)) {
    throw std::invalid_argument("kl_bernoulli: arguments must lie in [0,1]");
  }
  if (a == b) return 0.0;
  if (b == 0.0 || b == 1.0) {
    throw std::domain_error("kl_bernoulli: infinite divergence at boundary b");
  }
  const double d = xlogx_over(a, b) + xlogx_over(1.0 - a, 1.0 - b);
  return d > 0.0 ? d : 0.0;
}

double logit(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("logit: argument must lie in (0,1)");
  }
  return std::log(p) - std::log1p(-p);
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

double compensated_sum(std::span<const double> xs) {
  CompensatedSum acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

}  // namespace fbai
