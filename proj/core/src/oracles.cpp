#include "fbai/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fbai/numeric.hpp"

namespace fbai::oracle {

namespace {

// Best response of the other coordinates to lambda_0 = x.
double reduced(std::span<const double> m, double x) {
  double v = (x - m[0]) * (x - m[0]);
  for (std::size_t i = 1; i < m.size(); ++i) {
    const double lift = std::max(0.0, x - m[i]);
    v += lift * lift;
  }
  return v;
}

double scan(std::span<const double> m, double lo, double hi, double step, double& argmin) {
  double best = std::numeric_limits<double>::infinity();
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / step));
  for (std::size_t i = 0; i <= n; ++i) {
    const double x = std::min(hi, lo + static_cast<double>(i) * step);
    const double v = reduced(m, x);
    if (v < best) {
      best = v;
      argmin = x;
    }
  }
  return best;
}

}  // namespace

double xi_oracle(std::span<const double> m) {
  if (m.size() < 2) throw std::invalid_argument("xi_oracle: need at least two coordinates");
  if (m.size() > 8) throw std::length_error("xi_oracle: at most 8 coordinates");
  // lambda_0 beyond [min m, m_0] is never better.
  const double lo = std::min(*std::min_element(m.begin(), m.end()), m[0]);
  const double hi = m[0];
  double x = hi;
  scan(m, lo, hi, 1e-3, x);
  return scan(m, std::max(lo, x - 2e-3), std::min(hi, x + 2e-3), 1e-6, x);
}

double xi_oracle(const SortedInstance& s, const std::vector<std::size_t>& constraint_set) {
  std::vector<double> m;
  for (std::size_t k : constraint_set) {
    if (k < 1 || k > s.num_arms() + 1) throw std::out_of_range("xi_oracle: index outside 1..K+1");
    m.push_back(s.mu(k));
  }
  return xi_oracle(m);
}

double crossing_grid(double b1, double c1, double b2, double c2, std::size_t points) {
  if (!(b1 > 0 && c1 > 0 && c2 > 0 && b2 >= 0) || points < 2) {
    throw std::invalid_argument("crossing_grid: bad coefficients");
  }
  const double hi = c1 / b1;
  const auto f = [&](double x) {
    const double h = std::max(c2 * std::sqrt(x) - b2, 0.0);
    return c1 - b1 * x - h * h;
  };
  double prev_x = 0.0;
  for (std::size_t i = 1; i <= points; ++i) {
    const double x = hi * static_cast<double>(i) / static_cast<double>(points);
    if (f(x) <= 0.0) return 0.5 * (prev_x + x);
    prev_x = x;
  }
  return hi;
}

double two_arm_kl_grid(double m1, double m2) {
  if (!(m1 > 0 && m1 < 1 && m2 > 0 && m2 < 1)) {
    throw std::domain_error("two_arm_kl_grid: means must lie in (0, 1)");
  }
  const auto obj = [&](double a, double b) { return kl_bernoulli(a, m1) + kl_bernoulli(b, m2); };
  double ca = 0.5, cb = 0.5, half = 0.5;
  double best = std::numeric_limits<double>::infinity();
  constexpr int kCells = 200;
  for (int zoom = 0; zoom < 30; ++zoom) {
    double na = ca, nb = cb;
    for (int i = 0; i <= kCells; ++i) {
      const double a = ca - half + 2.0 * half * i / kCells;
      if (a <= 0.0 || a >= 1.0) continue;
      for (int k = 0; k <= kCells; ++k) {
        const double b = cb - half + 2.0 * half * k / kCells;
        if (b <= 0.0 || b >= 1.0 || a > b) continue;
        const double v = obj(a, b);
        if (v < best) {
          best = v;
          na = a;
          nb = b;
        }
      }
    }
    ca = na;
    cb = nb;
    half *= 0.1;
    if (half < 1e-12) break;
  }
  return best;
}

}  // namespace fbai::oracle
