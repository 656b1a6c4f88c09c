// Acceptance battery at the reference settings (40000 runs per cell).
// Prints one [PASS]/[FAIL] line per criterion; exits 1 if any fails.

#include <iostream>

#include "battery.hpp"

int main() {
  fbai::repro::Options opts;
  const auto results = fbai::repro::run_battery(opts, std::cout);
  int failed = 0;
  for (const auto& c : results) failed += !c.pass;
  std::cout << results.size() - failed << "/" << results.size() << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
