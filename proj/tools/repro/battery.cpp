#include "battery.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <ostream>
#include <sstream>

#include "fbai/guarantees.hpp"
#include "fbai/montecarlo.hpp"
#include "fbai/numeric.hpp"
#include "fbai/oracles.hpp"
#include "fbai/policy.hpp"

namespace fbai::repro {

namespace {

std::string fmt(const char* f, auto... args) {
  const int n = std::snprintf(nullptr, 0, f, args...);
  std::string out(static_cast<std::size_t>(std::max(n, 0)), '\0');
  std::snprintf(out.data(), out.size() + 1, f, args...);
  return out;
}

double uniform(RngStream& rng, double lo, double hi) { return lo + (hi - lo) * rng.next_double(); }

std::size_t uniform_int(RngStream& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng.next_u64() % (hi - lo + 1));
}

// Collects failures; keeps the first few messages for the summary line.
struct Failures {
  std::size_t count = 0;
  std::vector<std::string> first;
  void add(std::string msg) {
    if (first.size() < 3) first.push_back(std::move(msg));
    ++count;
  }
  std::string summary() const {
    std::string s = std::to_string(count) + " failure(s)";
    for (const auto& m : first) s += "; " + m;
    return s;
  }
};

bool within(double value, double target, double tol) { return std::abs(value - target) <= tol; }

std::vector<double> example2_means() {
  std::vector<double> m{0.95, 0.85, 0.2};
  m.resize(50, 0.0);
  return m;
}

// --- 1..4: closed-form bounds ---------------------------------------------

std::pair<bool, std::string> example1() {
  const auto s = sorted_instance({0.9, 0.1, 0.1});
  const double aud = rate_audibert(s);
  const double sr = rate_sr_pinsker(s).rate;
  const bool ok = within(aud, 0.16, 5e-4) && within(sr, 0.2133, 1e-3);
  return {ok, fmt("audibert=%.6f (0.1600+-0.0005) sr=%.6f (0.2133+-0.0010)", aud, sr)};
}

std::pair<bool, std::string> example2_sr() {
  const auto s = sorted_instance(example2_means());
  const double b = rate_sr_pinsker(s).bound(5000);
  const double rel = std::abs(b / 1.93e-3 - 1.0);
  return {rel <= 0.01, fmt("bound(5000)=%.5e vs 1.93e-3, rel.err %.3f%% (<=1%%)", b, 100 * rel)};
}

std::pair<bool, std::string> example2_crc() {
  const auto s = sorted_instance(example2_means());
  const double b = rate_crc(s).bound(5000);
  const double rel = std::abs(b / 6.40e-4 - 1.0);
  const double alpha = alpha_j(s, 2, CrVariant::Conservative);
  // Oracle coefficients from the brute-force xi: 2 xi_2 / (2 log_bar 2) and
  // sqrt(1 / (3 log_bar 3)) = 1/2.
  const double xi2 = oracle::xi_oracle(s, {1, 2});
  const double c1 = xi2;
  const double grid = oracle::crossing_grid(c1, c1, 0.5, 1.0 + (s.mu(2) - s.mu(3)));
  const bool ok = rel <= 0.01 && within(alpha, 0.11784, 1e-4) && within(alpha, grid, 1e-4);
  return {ok, fmt("bound(5000)=%.5e vs 6.40e-4, rel.err %.3f%%; alpha_2=%.6f grid oracle=%.6f", b,
                  100 * rel, alpha, grid)};
}

// Rate of the CR-A guarantee assembled from direct formulas and the grid
// crossing oracle.
double cra_rate_oracle(const std::vector<double>& mu_sorted) {
  const std::size_t K = mu_sorted.size();
  const auto mu = [&](std::size_t k) { return k <= K ? mu_sorted[k - 1] : 0.0; };
  const auto lbar = [](std::size_t m) {
    double v = 0.5;
    for (std::size_t k = 2; k <= m; ++k) v += 1.0 / static_cast<double>(k);
    return v;
  };
  double best = 1e300;
  for (std::size_t j = 2; j <= K; ++j) {
    const double jd = static_cast<double>(j);
    double rest = 0.0, rest_bar = 0.0;
    for (std::size_t k = 2; k < j; ++k) {
      rest += mu(k);
      rest_bar += mu(k);
    }
    rest += mu(j);
    rest_bar += mu(j + 1);
    const double d = mu(1) - rest / (jd - 1);
    const double d_bar = mu(1) - rest_bar / (jd - 1);
    const double psi = (jd - 1) / jd * d * d;
    const double psi_bar = (jd - 1) / jd * d_bar * d_bar;
    double stretched = 0.0;
    if (j < K) {
      const double phi = (mu(1) + rest) / jd - mu(j + 1);
      const double c1 = psi * (jd + 1) / (jd * jd * lbar(j));
      const double b2 = std::sqrt(1.0 / ((jd + 1) * lbar(j + 1)));
      const double alpha = oracle::crossing_grid(c1, c1, b2, 1.0 + phi);
      stretched = psi * lbar(j + 1) * (1 - alpha) / lbar(j);
    }
    const double term = std::min(std::max(stretched, psi), psi_bar);
    best = std::min(best, 2 * term / (jd * lbar(K)));
  }
  return best;
}

std::pair<bool, std::string> example2_cra() {
  const auto m = example2_means();
  const auto s = sorted_instance(m);
  const double rate = rate_cra(s).rate;
  const double ref = cra_rate_oracle(s.sorted_means);
  const double rel = std::abs(rate / ref - 1.0);
  const double b = std::exp(-5000.0 * rate);
  const bool ok = rel <= 1e-6 && b >= 5.5e-4 && b <= 6.6e-4;
  return {ok, fmt("bound(5000)=%.5e in [5.5e-4, 6.6e-4]; oracle rel.err %.2e (<=1e-6); "
                  "reference 6.36e-4 differs by %+.1f%% (reported only)",
                  b, rel, 100 * (b / 6.36e-4 - 1.0))};
}

// --- 5..6: Monte Carlo ------------------------------------------------------

struct Target {
  PolicyKind kind;
  std::int64_t budget;
  double percent;
  double tol_pp;
};

std::pair<bool, std::string> monte_carlo(const Options& opts, const Instance& inst,
                                         const std::vector<Target>& targets) {
  const double widen = std::max(1.0, std::sqrt(static_cast<double>(kReferenceRuns) /
                                               static_cast<double>(opts.runs)));
  bool ok = true;
  std::string detail;
  for (const auto& t : targets) {
    ExperimentConfig cfg;
    cfg.instance = inst;
    cfg.algorithms = {{t.kind, {}}};
    cfg.budgets = {t.budget};
    cfg.runs = opts.runs;
    cfg.base_seed = opts.seed;
    cfg.parallelism = opts.threads;
    const SimResult r = estimate_error(cfg).front();
    const double pct = 100.0 * r.error_rate;
    const double tol = t.tol_pp * widen;
    const bool pass = within(pct, t.percent, tol);
    ok = ok && pass;
    if (!detail.empty()) detail += "; ";
    detail += fmt("%s T=%lld %.3f%% (%.2f+-%.2f)%s", std::string(to_string(t.kind)).c_str(),
                  static_cast<long long>(t.budget), pct, t.percent, tol, pass ? "" : " OUT");
  }
  return {ok, detail + fmt("; runs=%lld", static_cast<long long>(opts.runs))};
}

// --- 7: properties ----------------------------------------------------------

std::pair<bool, std::string> properties(const Options& opts) {
  Failures f;
  RngStream rng(opts.seed, 7);
  std::size_t checks = 0;

  for (int trial = 0; trial < 200; ++trial) {
    const auto inst = random_instance(rng, 2, 8);
    const auto s = sort_desc(inst);
    const std::size_t K = s.num_arms();
    for (std::size_t j = 2; j <= K; ++j) {
      std::vector<std::size_t> top(j), bar;
      for (std::size_t k = 0; k < j; ++k) top[k] = k + 1;
      bar = top;
      bar.back() = j + 1;
      const double xi = xi_j(s, j), xi_bar = xi_bar_j(s, j);
      const double ox = oracle::xi_oracle(s, top), oxb = oracle::xi_oracle(s, bar);
      if (!within(xi, ox, 1e-6)) f.add(fmt("xi_%zu=%.9f oracle %.9f", j, xi, ox));
      if (!within(xi_bar, oxb, 1e-6)) f.add(fmt("xi_bar_%zu=%.9f oracle %.9f", j, xi_bar, oxb));
      const auto q = psi_phi_zeta(s, j);
      const double gap = s.mu(1) - s.mu(j);
      if (xi_bar < xi - 1e-12) f.add(fmt("xi_bar_%zu < xi_%zu", j, j));
      if (q.psi_bar < q.psi - 1e-12) f.add(fmt("psi_bar_%zu < psi_%zu", j, j));
      if (2 * xi < gap * gap - 1e-12) f.add(fmt("2 xi_%zu < gap^2", j));
      const double gamma = gamma_j_kl(s, j);
      if (gamma < 2 * xi - 1e-12) f.add(fmt("Gamma_%zu=%.9f < 2 xi=%.9f", j, gamma, 2 * xi));
      checks += 6;
    }
  }

  for (int trial = 0; trial < 1000; ++trial) {
    const double b1 = uniform(rng, 1e-4, 3.0);
    const double c1 = trial % 2 ? b1 : uniform(rng, 1e-4, 3.0);
    const double b2 = uniform(rng, 0.0, 1.0);
    const double c2 = uniform(rng, 0.5, 3.0);
    const double x = solve_crossing(b1, c1, b2, c2);
    const double h = std::max(c2 * std::sqrt(x) - b2, 0.0);
    const double residual = std::abs(c1 - b1 * x - h * h);
    if (residual > 1e-12 * std::max(1.0, c1) || x < 0.0 || x > c1 / b1) {
      f.add(fmt("solve_crossing(%g,%g,%g,%g) residual %.2e", b1, c1, b2, c2, residual));
    }
    ++checks;
  }

  for (int trial = 0; trial < 200; ++trial) {
    const auto s = sort_desc(random_instance(rng, 2, 8));
    const std::size_t j = uniform_int(rng, 2, s.num_arms());
    const double beta = 1.0 - rng.next_double();  // (0, 1]
    const double vc = gap_program_value(s, j, beta, CrVariant::Conservative);
    const double va = gap_program_value(s, j, beta, CrVariant::Aggressive);
    const double xi = xi_j(s, j), psi = psi_phi_zeta(s, j).psi;
    if (vc < xi - 1e-9) f.add(fmt("gap C %.9f < xi %.9f (j=%zu beta=%g)", vc, xi, j, beta));
    if (va < psi - 1e-12) f.add(fmt("gap A %.9f < psi %.9f (j=%zu beta=%g)", va, psi, j, beta));
    const double num = gap_program_numeric(s, j, beta, CrVariant::Aggressive);
    if (!within(va, num, 1e-8 * std::max(1.0, va))) {
      f.add(fmt("closed form %.12f vs numeric %.12f", va, num));
    }
    checks += 3;
  }

  for (int trial = 0; trial < 100; ++trial) {
    const auto s = sort_desc(random_instance(rng, 2, 12));
    const double crc = rate_crc(s).rate, sr = rate_sr_pinsker(s).rate;
    if (crc < sr - 1e-15) f.add(fmt("rate_crc %.9g < rate_sr %.9g", crc, sr));
    ++checks;
  }

  if (f.count) return {false, f.summary()};
  return {true, fmt("%zu checks", checks)};
}

// --- 8: policy fuzzing ------------------------------------------------------

std::int64_t ceil_log2(std::size_t k) {
  std::int64_t l = 0;
  while ((std::size_t{1} << l) < k) ++l;
  return l;
}

bool is_round_robin(PolicyKind k) {
  return k == PolicyKind::SR || k == PolicyKind::CRC || k == PolicyKind::CRA;
}

bool is_cr(PolicyKind k) { return k == PolicyKind::CRC || k == PolicyKind::CRA; }

PolicyParams random_params(RngStream& rng, std::size_t K) {
  PolicyParams p;
  if (rng.next_u64() % 2) p.theta0 = uniform(rng, 1e-5, 0.9 / log_bar(static_cast<std::int64_t>(K)));
  return p;
}

Instance one_hot(RngStream& rng, std::size_t K) {
  std::vector<double> m(K, 0.0);
  m[uniform_int(rng, 0, K - 1)] = 1.0;
  return Instance(std::move(m));
}

void fuzz_policy(PolicyKind kind, RngStream& rng, int iterations, Failures& f) {
  const std::string name(to_string(kind));
  for (int it = 0; it < iterations; ++it) {
    const bool deterministic = it % 4 == 0;
    const std::size_t K = uniform_int(rng, 2, 8);
    const Instance inst = deterministic ? one_hot(rng, K) : random_instance(rng, K, K);
    const auto T = static_cast<std::int64_t>(K) * (ceil_log2(K) + 1) +
                   static_cast<std::int64_t>(uniform_int(rng, 0, 600));
    const PolicyParams params = random_params(rng, K);
    Policy p = Policy::create(kind, K, T, params);
    RngStream rewards(rng.next_u64(), 0);
    const std::string where = fmt("%s it=%d K=%zu T=%lld", name.c_str(), it, K, static_cast<long long>(T));

    while (!p.finished()) {
      const std::size_t arm = p.select_arm();
      const auto& st = p.state();
      if (!st.is_candidate(arm)) {
        f.add(where + ": pulled a discarded arm");
        break;
      }
      p.observe(arm, sample_reward(inst, arm, rewards));
      if (is_round_robin(kind)) {
        std::int64_t lo = INT64_MAX, hi = 0;
        for (std::size_t k : p.state().candidates) {
          lo = std::min(lo, p.state().counts[k]);
          hi = std::max(hi, p.state().counts[k]);
        }
        if (hi - lo > 1) {
          f.add(where + ": candidate counts spread > 1");
          break;
        }
      }
    }
    const auto& st = p.state();
    std::int64_t total = 0;
    for (auto n : st.counts) total += n;
    if (total != T) f.add(where + fmt(": sum of counts %lld", static_cast<long long>(total)));
    if (kind != PolicyKind::SH && st.candidates.size() < 2) f.add(where + ": fewer than two candidates");
    if (is_cr(kind)) {
      const auto warm = static_cast<std::int64_t>(std::floor(params.theta0 * static_cast<double>(T)));
      std::int64_t prev = -1;
      for (const auto& e : st.discard_log) {
        if (e.round <= warm) f.add(where + fmt(": discard in round %lld during warm-up", static_cast<long long>(e.round)));
        if (st.counts[e.arm] <= prev) f.add(where + ": discarded counts not increasing");
        prev = st.counts[e.arm];
      }
    }
    if (deterministic && p.recommend() != inst.best_arm()) f.add(where + ": error on deterministic instance");
  }
}

// Replays one reward tape through CR-C and CR-A and compares the i-th
// discard rounds.  The first pair is where condition (A) being implied by
// condition (C) applies directly; later pairs are counted separately.
struct OrderStats {
  std::size_t first_pairs = 0;
  std::size_t later_pairs = 0;
  Failures first;
  Failures later;
};

void fuzz_cr_order(RngStream& rng, int iterations, OrderStats& stats) {
  for (int it = 0; it < iterations; ++it) {
    const std::size_t K = uniform_int(rng, 3, 8);
    const Instance inst = random_instance(rng, K, K);
    const auto T = static_cast<std::int64_t>(K) + static_cast<std::int64_t>(uniform_int(rng, 0, 1500));
    const PolicyParams params = random_params(rng, K);
    RewardTape tape(inst, T, rng.next_u64());
    const auto c = run_policy_with(PolicyKind::CRC, K, T, params, tape.as_fn());
    tape.rewind();
    const auto a = run_policy_with(PolicyKind::CRA, K, T, params, tape.as_fn());
    for (std::size_t i = 0; i < c.discard_log.size(); ++i) {
      (i == 0 ? stats.first_pairs : stats.later_pairs)++;
      if (i < a.discard_log.size() && a.discard_log[i].round <= c.discard_log[i].round) continue;
      const std::string cra_round =
          i < a.discard_log.size() ? "round " + std::to_string(a.discard_log[i].round) : "none";
      (i == 0 ? stats.first : stats.later)
          .add(fmt("tape it=%d K=%zu T=%lld: CR-C discard #%zu in round %lld, CR-A %s", it, K,
                   static_cast<long long>(T), i + 1, static_cast<long long>(c.discard_log[i].round),
                   cra_round.c_str()));
    }
  }
}

std::pair<bool, std::string> policy_fuzz(const Options& opts) {
  Failures f;
  RngStream rng(opts.seed, 8);
  for (PolicyKind k : {PolicyKind::SR, PolicyKind::CRC, PolicyKind::CRA, PolicyKind::SH, PolicyKind::UGapE}) {
    fuzz_policy(k, rng, 1000, f);
  }
  OrderStats order;
  fuzz_cr_order(rng, 1000, order);
  const bool ok = f.count == 0 && order.first.count == 0 && order.later.count == 0;
  std::string detail = fmt("invariants over 5x1000 runs: %s", f.count ? f.summary().c_str() : "ok");
  detail += fmt("; CR-A no later than CR-C over 1000 tapes: first discard %zu/%zu ok, later discards "
                "%zu/%zu ok",
                order.first_pairs - order.first.count, order.first_pairs,
                order.later_pairs - order.later.count, order.later_pairs);
  if (order.first.count) detail += " [" + order.first.summary() + "]";
  if (order.later.count) detail += " [" + order.later.summary() + "]";
  return {ok, detail};
}

}  // namespace

Instance random_instance(RngStream& rng, std::size_t k_min, std::size_t k_max, double lo, double hi) {
  const std::size_t K = uniform_int(rng, k_min, k_max);
  for (;;) {
    std::vector<double> m(K);
    for (auto& x : m) x = uniform(rng, lo, hi);
    const double top = *std::max_element(m.begin(), m.end());
    if (std::count(m.begin(), m.end(), top) == 1) return Instance(std::move(m));
  }
}

std::string format_line(const Criterion& c) {
  return fmt("[%s] %d %-24s %s (%.1fs)", c.pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
             c.detail.c_str(), c.seconds);
}

std::vector<Criterion> run_battery(const Options& opts, std::ostream& out) {
  using Fn = std::function<std::pair<bool, std::string>()>;
  struct Entry {
    int id;
    const char* group;
    const char* name;
    Fn fn;
  };
  const std::vector<Entry> entries{
      {1, "bounds", "example-1-bounds", example1},
      {2, "bounds", "example-2-sr", example2_sr},
      {3, "bounds", "example-2-crc", example2_crc},
      {4, "bounds", "example-2-cra", example2_cra},
      {5, "montecarlo", "stair-k55",
       [&] {
         return monte_carlo(opts, generate_instance(Family::Stair, 10),
                            {{PolicyKind::SR, 5000, 1.26, 0.25},
                             {PolicyKind::CRC, 5000, 1.05, 0.25},
                             {PolicyKind::CRA, 5000, 0.57, 0.25},
                             {PolicyKind::SR, 3000, 5.5, 0.5},
                             {PolicyKind::CRA, 3000, 4.7, 0.5}});
       }},
      {6, "montecarlo", "one-group-k10",
       [&] {
         return monte_carlo(opts, generate_instance(Family::OneGroup, 10),
                            {{PolicyKind::SR, 8000, 4.29, 0.6},
                             {PolicyKind::CRC, 8000, 4.17, 0.6},
                             {PolicyKind::CRA, 8000, 4.07, 0.6}});
       }},
      {7, "properties", "property-suite", [&] { return properties(opts); }},
      {8, "policies", "policy-fuzzing", [&] { return policy_fuzz(opts); }},
  };

  std::vector<Criterion> results;
  for (const auto& e : entries) {
    if (!opts.only.empty() && !opts.only.contains(e.group) && !opts.only.contains(std::to_string(e.id))) {
      continue;
    }
    Criterion c;
    c.id = e.id;
    c.group = e.group;
    c.name = e.name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      std::tie(c.pass, c.detail) = e.fn();
    } catch (const std::exception& ex) {
      c.pass = false;
      c.detail = std::string("exception: ") + ex.what();
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out << format_line(c) << std::endl;
    results.push_back(std::move(c));
  }
  return results;
}

}  // namespace fbai::repro
