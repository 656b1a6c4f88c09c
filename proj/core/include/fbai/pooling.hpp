#pragma once

#include <cstddef>
#include <span>

namespace fbai {

/// Solution of  min sum_b D(lambda_b, mu_b)  s.t.  lambda_0 <= lambda_k for
/// every k >= 1, where means[0] is mu_0 and D is a separable convex
/// divergence.  At the optimum the top coordinate is pooled with every
/// coordinate whose mean falls below the common level; the rest stay put.
struct PoolResult {
  double value = 0.0;         // optimal objective
  double level = 0.0;         // common value of the pooled coordinates
  std::size_t pool_size = 0;  // number of pooled coordinates, top included
};

/// Squared-distance objective; the level is the arithmetic mean of the pool.
PoolResult pool_quadratic(std::span<const double> means);

/// Bernoulli KL objective sum_b d(lambda_b, mu_b); the level is the logistic
/// of the mean logit of the pool.  Means must lie in (0,1).
PoolResult pool_kl(std::span<const double> means);

}  // namespace fbai
