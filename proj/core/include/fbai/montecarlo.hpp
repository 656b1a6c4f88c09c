#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fbai/instance.hpp"
#include "fbai/policy.hpp"

namespace fbai {

/// Benchmark instance shapes.
///   one-group:  0.5, then 0.45 for every other arm
///   two-group:  0.5, 0.45 for k = 2..floor((K-1)/2), 0.4 after that
///   linear:     3/4 - (k-1)/(2K)
///   concave:    sin((K-1)pi/(2K)) for k = 1, sin(9pi(K-k+1)/(20K)) otherwise
///   convex:     3/(10(k+1))
///   stair:      for m = 1..M, m arms at level (3/4) 3^(-m/M); K = M(M+1)/2
enum class Family { OneGroup, TwoGroup, Linear, Concave, Convex, Stair };

std::string_view to_string(Family family);
Family parse_family(std::string_view name);

/// `size` is K, or M for the stair family.  Throws std::invalid_argument on
/// sizes that cannot give a valid instance (K < 2, M < 2).
Instance generate_instance(Family family, std::size_t size);

struct AlgorithmSpec {
  PolicyKind kind = PolicyKind::SR;
  PolicyParams params;
};

struct ExperimentConfig {
  Instance instance{{1.0, 0.0}};
  std::string family;  // CSV label; defaults to the instance label
  std::vector<AlgorithmSpec> algorithms;
  std::vector<std::int64_t> budgets;
  std::int64_t runs = 40000;
  std::uint64_t base_seed = 1;
  unsigned parallelism = 0;  // 0: one worker per hardware thread
};

struct SimResult {
  std::string family;
  std::size_t num_arms = 0;
  PolicyKind algorithm = PolicyKind::SR;
  std::int64_t budget = 0;
  std::int64_t runs = 0;
  std::int64_t errors = 0;
  double error_rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t base_seed = 0;

  friend bool operator==(const SimResult&, const SimResult&) = default;
};

/// Wilson score interval for a binomial proportion.
std::pair<double, double> wilson_ci(std::int64_t errors, std::int64_t runs, double level = 0.95);

/// Seed of one (algorithm, budget) cell; run r of the cell uses
/// RngStream(cell_seed(...), r).
std::uint64_t cell_seed(std::uint64_t base_seed, PolicyKind kind, std::int64_t budget);

/// Checks runs >= 1, a non-empty budget list and the per-policy budget
/// minimum.  Throws std::invalid_argument.
void validate(const ExperimentConfig& config);

/// One SimResult per (algorithm, budget), algorithm-major.
std::vector<SimResult> estimate_error(const ExperimentConfig& config);

/// Re-executes a single run of a cell.
RunOutcome replay_run(const Instance& inst, const AlgorithmSpec& algo, std::int64_t budget,
                      std::uint64_t base_seed, std::int64_t run_index);

/// estimate_error plus the CSV artifact at `csv_path` (skipped when empty).
/// I/O failures throw std::runtime_error naming the path.
std::vector<SimResult> run_experiment(const ExperimentConfig& config, const std::string& csv_path);

}  // namespace fbai
