#pragma once

#include <cstdint>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "fbai/instance.hpp"
#include "fbai/rng.hpp"

namespace fbai::repro {

inline constexpr std::int64_t kReferenceRuns = 40000;

struct Criterion {
  int id = 0;
  std::string group;  // bounds | montecarlo | properties | policies
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

struct Options {
  std::int64_t runs = kReferenceRuns;  // Monte Carlo tolerances scale by sqrt(40000 / runs)
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::set<std::string> only;  // group names or criterion ids; empty = all
};

/// Runs the selected criteria, writing one line per criterion to `out` as
/// each finishes.
std::vector<Criterion> run_battery(const Options& opts, std::ostream& out);

/// "[PASS]  3 ..." formatting used by run_battery.
std::string format_line(const Criterion& c);

/// Random instance for property checks: K uniform in [k_min, k_max], means
/// uniform in [lo, hi], redrawn until the maximum is unique.
Instance random_instance(RngStream& rng, std::size_t k_min, std::size_t k_max, double lo = 0.01,
                         double hi = 0.99);

}  // namespace fbai::repro
