#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "fbai/instance.hpp"
#include "fbai/rng.hpp"

namespace fbai::gen {

inline double uniform(RngStream& rng, double lo, double hi) { return lo + (hi - lo) * rng.next_double(); }

inline std::size_t uniform_int(RngStream& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.next_u64() % (hi - lo + 1));
}

// Means in [lo, hi] with a unique maximum.  With `ties` some suboptimal
// means are copied from others to exercise equal-mean code paths.
inline std::vector<double> random_means(RngStream& rng, std::size_t K, double lo = 0.01, double hi = 0.99,
                                        bool ties = false) {
  for (;;) {
    std::vector<double> m(K);
    for (auto& x : m) x = uniform(rng, lo, hi);
    if (ties && K > 2) {
      for (std::size_t i = 0; i + 1 < K; ++i) {
        if (rng.next_u64() % 3 == 0) m[i + 1] = m[i];
      }
    }
    const double top = *std::max_element(m.begin(), m.end());
    if (std::count(m.begin(), m.end(), top) == 1) return m;
  }
}

inline Instance random_instance(RngStream& rng, std::size_t k_min, std::size_t k_max) {
  return Instance(random_means(rng, uniform_int(rng, k_min, k_max)));
}

}  // namespace fbai::gen
