#include "fbai/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <thread>

#include <boost/math/distributions/normal.hpp>

#include "fbai/io.hpp"
#include "fbai/rng.hpp"

namespace fbai {

std::string_view to_string(Family family) {
  switch (family) {
    case Family::OneGroup: return "one-group";
    case Family::TwoGroup: return "two-group";
    case Family::Linear: return "linear";
    case Family::Concave: return "concave";
    case Family::Convex: return "convex";
    case Family::Stair: return "stair";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  std::string n(name);
  std::transform(n.begin(), n.end(), n.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (Family f : {Family::OneGroup, Family::TwoGroup, Family::Linear, Family::Concave,
                   Family::Convex, Family::Stair}) {
    if (n == to_string(f)) return f;
  }
  throw std::invalid_argument("unknown family '" + std::string(name) + "'");
}

Instance generate_instance(Family family, std::size_t size) {
  if (size < 2) {
    throw std::invalid_argument(std::string(to_string(family)) + ": size must be at least 2");
  }
  std::vector<double> mu;
  const double K = static_cast<double>(size);
  const double pi = std::numbers::pi;
  switch (family) {
    case Family::OneGroup:
      mu.assign(size, 0.45);
      mu[0] = 0.5;
      break;
    case Family::TwoGroup: {
      const std::size_t split = (size - 1) / 2;
      for (std::size_t k = 1; k <= size; ++k) mu.push_back(k == 1 ? 0.5 : (k <= split ? 0.45 : 0.4));
      break;
    }
    case Family::Linear:
      for (std::size_t k = 1; k <= size; ++k) mu.push_back(0.75 - static_cast<double>(k - 1) / (2.0 * K));
      break;
    case Family::Concave:
      mu.push_back(std::sin((K - 1.0) * pi / (2.0 * K)));
      for (std::size_t k = 2; k <= size; ++k) {
        mu.push_back(std::sin(9.0 * pi * static_cast<double>(size - k + 1) / (20.0 * K)));
      }
      break;
    case Family::Convex:
      for (std::size_t k = 1; k <= size; ++k) mu.push_back(3.0 / (10.0 * static_cast<double>(k + 1)));
      break;
    case Family::Stair: {
      const double M = static_cast<double>(size);
      for (std::size_t m = 1; m <= size; ++m) {
        const double level = 0.75 * std::pow(3.0, -static_cast<double>(m) / M);
        mu.insert(mu.end(), m, level);
      }
      break;
    }
  }
  std::string label(to_string(family));
  return Instance(std::move(mu), std::move(label));
}

std::pair<double, double> wilson_ci(std::int64_t errors, std::int64_t runs, double level) {
  if (runs < 1 || errors < 0 || errors > runs) {
    throw std::invalid_argument("wilson_ci: need 0 <= errors <= runs and runs >= 1");
  }
  if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("wilson_ci: level must lie in (0, 1)");
  const double z = boost::math::quantile(boost::math::normal(), 0.5 + level / 2.0);
  const double n = static_cast<double>(runs);
  const double p = static_cast<double>(errors) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  double lo = std::max(0.0, centre - half);
  double hi = std::min(1.0, centre + half);
  if (errors == 0) lo = 0.0;
  if (errors == runs) hi = 1.0;
  return {std::min(lo, p), std::max(hi, p)};
}

std::uint64_t cell_seed(std::uint64_t base_seed, PolicyKind kind, std::int64_t budget) {
  std::uint64_t h = splitmix64(base_seed);
  h = splitmix64(h ^ (static_cast<std::uint64_t>(kind) + 1));
  return splitmix64(h ^ static_cast<std::uint64_t>(budget));
}

void validate(const ExperimentConfig& config) {
  if (config.runs < 1) throw std::invalid_argument("runs must be at least 1");
  if (config.budgets.empty()) throw std::invalid_argument("no budgets given");
  for (const auto& algo : config.algorithms) {
    for (auto T : config.budgets) {
      (void)Policy::create(algo.kind, config.instance.num_arms(), T, algo.params);
    }
  }
}

RunOutcome replay_run(const Instance& inst, const AlgorithmSpec& algo, std::int64_t budget,
                      std::uint64_t base_seed, std::int64_t run_index) {
  RngStream rng(cell_seed(base_seed, algo.kind, budget), static_cast<std::uint64_t>(run_index));
  return run_policy(algo.kind, inst, budget, algo.params, rng);
}

namespace {

std::int64_t count_errors(const ExperimentConfig& config, const AlgorithmSpec& algo, std::int64_t T) {
  const std::uint64_t seed = cell_seed(config.base_seed, algo.kind, T);
  const std::size_t best = config.instance.best_arm();
  unsigned workers = config.parallelism ? config.parallelism : std::thread::hardware_concurrency();
  workers = std::max(1u, workers);
  constexpr std::int64_t kChunk = 256;

  std::atomic<std::int64_t> next{0};
  std::atomic<std::int64_t> errors{0};
  const auto work = [&] {
    std::int64_t local = 0;
    for (;;) {
      const std::int64_t begin = next.fetch_add(kChunk);
      if (begin >= config.runs) break;
      const std::int64_t end = std::min(config.runs, begin + kChunk);
      for (std::int64_t r = begin; r < end; ++r) {
        RngStream rng(seed, static_cast<std::uint64_t>(r));
        if (run_policy(algo.kind, config.instance, T, algo.params, rng).recommended != best) ++local;
      }
    }
    errors += local;
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return errors.load();
}

}  // namespace

std::vector<SimResult> estimate_error(const ExperimentConfig& config) {
  validate(config);
  std::vector<SimResult> out;
  const std::string family = config.family.empty() ? config.instance.label() : config.family;
  for (const auto& algo : config.algorithms) {
    for (auto T : config.budgets) {
      SimResult r;
      r.family = family;
      r.num_arms = config.instance.num_arms();
      r.algorithm = algo.kind;
      r.budget = T;
      r.runs = config.runs;
      r.errors = count_errors(config, algo, T);
      r.error_rate = static_cast<double>(r.errors) / static_cast<double>(r.runs);
      std::tie(r.ci_low, r.ci_high) = wilson_ci(r.errors, r.runs);
      r.base_seed = config.base_seed;
      out.push_back(std::move(r));
    }
  }
  return out;
}

std::vector<SimResult> run_experiment(const ExperimentConfig& config, const std::string& csv_path) {
  auto results = estimate_error(config);
  if (!csv_path.empty()) {
    std::ofstream os(csv_path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + csv_path + "' for writing");
    write_results_csv(os, results);
    if (!os) throw std::runtime_error("write failed for '" + csv_path + "'");
  }
  return results;
}

}  // namespace fbai
