#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "fbai/instance.hpp"
#include "fbai/numeric.hpp"
#include "fbai/rng.hpp"
#include "support/generators.hpp"

using namespace fbai;

namespace {

long double harmonic_tail(int m) {
  long double s = 0.5L;
  for (int k = 2; k <= m; ++k) s += 1.0L / k;
  return s;
}

}  // namespace

TEST(Instance, AcceptsValidMeans) {
  const Instance a = make_instance({0.9, 0.1, 0.1});
  EXPECT_EQ(a.num_arms(), 3u);
  EXPECT_EQ(a.best_arm(), 0u);
  const Instance b = make_instance({0.5, 0.45, 0.45});
  EXPECT_EQ(b.best_arm(), 0u);
  EXPECT_NO_THROW(make_instance({1.0, 0.0, 0.0}));
}

TEST(Instance, RejectsInvalidMeans) {
  EXPECT_THROW(make_instance({0.5, 0.5}), std::invalid_argument);
  EXPECT_THROW(make_instance({0.5}), std::invalid_argument);
  EXPECT_THROW(make_instance({0.5, 1.2}), std::invalid_argument);
  EXPECT_THROW(make_instance({-0.1, 0.2}), std::invalid_argument);
  EXPECT_THROW(make_instance({NAN, 0.2}), std::invalid_argument);
}

TEST(SortDesc, PermutationExamples) {
  auto s = sort_desc(make_instance({0.1, 0.9, 0.1}));
  EXPECT_EQ(s.sorted_means, (std::vector<double>{0.9, 0.1, 0.1}));
  EXPECT_EQ(s.perm, (std::vector<std::size_t>{1, 0, 2}));

  s = sort_desc(make_instance({0.9, 0.1, 0.1}));
  EXPECT_EQ(s.perm, (std::vector<std::size_t>{0, 1, 2}));

  s = sort_desc(make_instance({0.45, 0.5, 0.4}));
  EXPECT_EQ(s.sorted_means, (std::vector<double>{0.5, 0.45, 0.4}));
  EXPECT_EQ(s.perm, (std::vector<std::size_t>{1, 0, 2}));
  EXPECT_EQ(s.mu(4), 0.0);
  EXPECT_THROW(s.mu(0), std::out_of_range);
  EXPECT_THROW(s.mu(5), std::out_of_range);
}

TEST(SortDesc, InverseRecoversMeansOnRandomInstances) {
  RngStream rng(11, 0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = gen::random_means(rng, gen::uniform_int(rng, 2, 12), 0.0, 1.0, true);
    const auto s = sort_desc(Instance(m));
    EXPECT_EQ(s.original_means(), m);
    EXPECT_TRUE(std::is_sorted(s.sorted_means.rbegin(), s.sorted_means.rend()));
    EXPECT_GT(s.sorted_means[0], s.sorted_means[1]);
    // Equal suboptimal means keep ascending original index.
    for (std::size_t i = 1; i + 1 < s.perm.size(); ++i) {
      if (s.sorted_means[i] == s.sorted_means[i + 1]) EXPECT_LT(s.perm[i], s.perm[i + 1]);
    }
  }
}

TEST(LogBar, Values) {
  EXPECT_DOUBLE_EQ(log_bar(1), 0.5);
  EXPECT_DOUBLE_EQ(log_bar(2), 1.0);
  EXPECT_NEAR(log_bar(3), 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(log_bar(50), 3.9992056, 1e-6);
  EXPECT_NEAR(log_bar(50), static_cast<double>(harmonic_tail(50)), 1e-14);
  EXPECT_THROW(log_bar(0), std::invalid_argument);
}

TEST(LogBar, IncrementsAreReciprocals) {
  for (int m = 3; m < 500; ++m) {
    EXPECT_GT(log_bar(m), log_bar(m - 1));
    EXPECT_NEAR(log_bar(m) - log_bar(m - 1), 1.0 / m, 1e-14);
  }
}

TEST(GThreshold, ValuesAndMonotonicity) {
  EXPECT_DOUBLE_EQ(g_threshold(1.0), 0.0);
  EXPECT_DOUBLE_EQ(g_threshold(0.25), 1.0);
  EXPECT_NEAR(g_threshold(0.4), 0.581139, 1e-6);
  EXPECT_LT(g_threshold(2.0), 0.0);
  EXPECT_THROW(g_threshold(0.0), std::invalid_argument);
  EXPECT_THROW(g_threshold(-1.0), std::invalid_argument);
  for (double b = 0.01; b < 3.0; b += 0.01) EXPECT_GT(g_threshold(b), g_threshold(b + 0.01));
}

TEST(KlBernoulli, ValuesAndBoundaries) {
  EXPECT_EQ(kl_bernoulli(0.5, 0.5), 0.0);
  EXPECT_NEAR(kl_bernoulli(0.5, 0.9), 0.510826, 1e-6);
  EXPECT_NEAR(kl_bernoulli(0.0, 0.5), std::log(2.0), 1e-15);
  EXPECT_EQ(kl_bernoulli(0.0, 0.0), 0.0);
  EXPECT_EQ(kl_bernoulli(1.0, 1.0), 0.0);
  EXPECT_THROW(kl_bernoulli(0.5, 0.0), std::domain_error);
  EXPECT_THROW(kl_bernoulli(0.5, 1.0), std::domain_error);
}

TEST(KlBernoulli, PinskerOnGrid) {
  for (double a = 0.01; a <= 0.99; a += 0.01) {
    for (double b = 0.01; b <= 0.99; b += 0.01) {
      const double d = kl_bernoulli(a, b);
      EXPECT_GE(d + 1e-15, 2 * (a - b) * (a - b)) << a << " " << b;
      EXPECT_GE(d, 0.0);
    }
  }
}

TEST(CompensatedSum, RecoversSmallTerms) {
  std::vector<double> xs{1e16, 1.0, -1e16, 1.0};
  EXPECT_EQ(compensated_sum(xs), 2.0);
}

TEST(Rng, DeterministicPerStream) {
  RngStream a(42, 7), b(42, 7), c(42, 8);
  int differ = 0;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    EXPECT_EQ(x, b.next_u64());
    differ += x != c.next_u64();
  }
  EXPECT_GT(differ, 95);
}

TEST(Rng, UniformInUnitInterval) {
  RngStream r(1, 0);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.next_double();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}

TEST(SampleReward, DeterministicArmsAndRange) {
  const Instance inst = make_instance({1.0, 0.0, 0.5});
  RngStream rng(3, 1);
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(sample_reward(inst, 0, rng), 1.0);
    EXPECT_EQ(sample_reward(inst, 1, rng), 0.0);
  }
  EXPECT_THROW(sample_reward(inst, 3, rng), std::out_of_range);
}

TEST(SampleReward, ReplayableFirstDraws) {
  const Instance inst = make_instance({0.3, 0.7});
  RngStream a(9, 4), b(9, 4);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_reward(inst, 1, a), sample_reward(inst, 1, b));
}

TEST(SampleReward, FrequencyWithinFourSigma) {
  const Instance inst = make_instance({0.3, 0.7});
  RngStream rng(2024, 0);
  constexpr int n = 1'000'000;
  int ones = 0;
  for (int i = 0; i < n; ++i) ones += sample_reward(inst, 0, rng) == 1.0;
  const double sigma = std::sqrt(0.3 * 0.7 / n);
  EXPECT_NEAR(static_cast<double>(ones) / n, 0.3, 4 * sigma);
}
