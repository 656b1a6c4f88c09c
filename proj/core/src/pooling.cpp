#include "fbai/pooling.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "fbai/numeric.hpp"

namespace fbai {

namespace {

// Grows the pool from the smallest mean upwards while the next mean lies
// strictly below the current level.  `transform` maps a mean to the space in
// which the level is an arithmetic average; `level_of` maps back.
template <typename Transform, typename Inverse, typename Divergence>
PoolResult pool(std::span<const double> means, Transform transform, Inverse level_of,
                Divergence divergence) {
  if (means.empty()) throw std::invalid_argument("pool: empty input");
  std::vector<double> rest(means.begin() + 1, means.end());
  std::sort(rest.begin(), rest.end());

  CompensatedSum acc;
  acc.add(transform(means[0]));
  std::size_t size = 1;
  double level = means[0];
  for (double m : rest) {
    if (!(m < level)) break;
    acc.add(transform(m));
    ++size;
    level = level_of(acc.value() / static_cast<double>(size));
  }

  CompensatedSum value;
  value.add(divergence(level, means[0]));
  for (std::size_t i = 0; i + 1 < size; ++i) value.add(divergence(level, rest[i]));
  return {value.value(), level, size};
}

}  // namespace

PoolResult pool_quadratic(std::span<const double> means) {
  return pool(
      means, [](double m) { return m; }, [](double x) { return x; },
      [](double x, double m) { return (x - m) * (x - m); });
}

PoolResult pool_kl(std::span<const double> means) {
  for (double m : means) {
    if (!(m > 0.0 && m < 1.0)) {
      throw std::domain_error("pool_kl: Bernoulli means must lie in (0,1)");
    }
  }
  return pool(
      means, [](double m) { return logit(m); }, [](double x) { return logistic(x); },
      [](double x, double m) { return kl_bernoulli(x, m); });
}

}  // namespace fbai
