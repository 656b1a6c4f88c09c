#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fbai/instance.hpp"
#include "fbai/rng.hpp"

namespace fbai {

/// Fixed-budget sampling rules.
///   SR    - Successive Rejects with phase thresholds T / (j * log_bar(K)).
///   CRC   - Continuous Rejects, conservative discarding condition.
///   CRA   - Continuous Rejects, aggressive (average-gap) discarding condition.
///   SH    - Sequential Halving.
///   UGapE - gap-based exploration, fixed-budget flavour with an on-line
///           estimate of the complexity H.
enum class PolicyKind { SR, CRC, CRA, SH, UGapE };

std::string_view to_string(PolicyKind kind);
/// Accepts "sr", "crc"/"cr-c", "cra"/"cr-a", "sh", "ugape" (case-insensitive).
PolicyKind parse_policy_kind(std::string_view name);

struct PolicyParams {
  double theta0 = 1e-5;      // CR warm-up fraction, in (0, 1/log_bar(K))
  double ugape_clip = 1e-3;  // lower clip on estimated gaps
  double ugape_scale = 1.0;  // multiplies the exploration parameter a

  /// Builds params from a flat key/value map with keys `theta0`,
  /// `ugape_clip`, `ugape_scale`.  Unknown keys throw std::invalid_argument.
  static PolicyParams from_map(const std::map<std::string, double>& kv);
  std::map<std::string, double> to_map() const;
};

struct DiscardEvent {
  std::int64_t round;  // 1-based round in which the arm left the candidate set
  std::size_t arm;     // 0-based arm index

  friend bool operator==(const DiscardEvent&, const DiscardEvent&) = default;
};

/// Complete sampling state of one run.  Plain data: tests may build one by
/// hand and feed it to the discard predicates or to Policy::resume.
struct PolicyState {
  PolicyKind kind = PolicyKind::SR;
  std::size_t num_arms = 0;
  std::int64_t budget = 0;  // T
  std::int64_t t = 0;       // pulls completed so far
  std::vector<std::size_t> candidates;  // ascending arm indices
  std::vector<std::int64_t> counts;
  std::vector<double> sums;
  PolicyParams params;
  std::vector<DiscardEvent> discard_log;

  /// sums[arm]/counts[arm]; an arm never pulled ranks as 0.
  double empirical_mean(std::size_t arm) const;
  bool is_candidate(std::size_t arm) const;
};

struct DiscardDecision {
  bool should_discard = false;
  std::optional<std::size_t> victim;
  std::optional<double> beta;  // argument passed to g_threshold (CR only)
};

enum class CrVariant { Conservative, Aggressive };

/// Empirically worst candidate, ties to the lowest index.
std::size_t empirical_worst(const PolicyState& state);
/// Empirically best candidate, ties to the lowest index.
std::size_t empirical_best(const PolicyState& state);

/// SR rule: |C| = j > 2 and min_{k in C} N_k >= T / (j log_bar K).
DiscardDecision sr_should_discard(const PolicyState& state);

/// CR rule, evaluated at the top of round state.t + 1.  Requires the initial
/// sweep to be complete and the warm-up floor(theta0 T) to have passed; then
/// |C| = j > 2, equal counts inside C strictly above every count outside C,
/// and the gap test against G(beta) with
/// beta = sum_{k in C} N_k log_bar(j) / (T - sum_{k not in C} N_k).
DiscardDecision cr_should_discard(const PolicyState& state, CrVariant variant);

/// Round-by-round driver: select_arm -> observe -> ... -> recommend.
class Policy {
 public:
  /// Throws std::invalid_argument when the budget is too small (T < K for
  /// CR, T < 1 otherwise), K < 2, or theta0 lies outside (0, 1/log_bar K).
  static Policy create(PolicyKind kind, std::size_t num_arms, std::int64_t budget,
                       PolicyParams params = {});

  /// Continue from a hand-built state (used by tests).  SH and UGapE
  /// states cannot be resumed because their bookkeeping is internal.
  static Policy resume(PolicyState state);

  /// Applies the pending discard check for this round (SR/CR), then picks
  /// the arm to pull.  Throws std::logic_error once the budget is spent or
  /// if the previous selection has not been observed.
  std::size_t select_arm();

  /// Records the reward of the arm returned by the last select_arm.
  void observe(std::size_t arm, double reward);

  /// Final recommendation; only valid once t == T.
  std::size_t recommend() const;

  bool finished() const { return state_.t >= state_.budget; }
  const PolicyState& state() const { return state_; }

 private:
  explicit Policy(PolicyState state);

  void apply_discard(std::size_t victim);
  void refresh_cursor();
  void advance_cursor();
  std::size_t round_robin_arm() const { return state_.candidates[cursor_]; }

  std::size_t select_sh();
  std::size_t select_ugape();

  PolicyState state_;
  std::optional<std::size_t> pending_;

  // Position in `candidates` of the first arm holding the minimum count.
  std::size_t cursor_ = 0;
  double log_bar_k_ = 0.0;
  std::int64_t max_outside_ = 0;
  std::int64_t sum_outside_ = 0;

  // Sequential Halving bookkeeping.
  std::int64_t sh_phases_ = 0;
  std::int64_t sh_phase_ = 0;
  std::int64_t sh_quota_ = 0;
  std::vector<std::int64_t> sh_phase_counts_;

  // UGapE: recommendation at the round with the smallest gap index.
  double ugape_best_index_ = 0.0;
  std::optional<std::size_t> ugape_best_arm_;
};

struct RunOutcome {
  std::size_t recommended = 0;
  std::vector<DiscardEvent> discard_log;
  std::vector<std::int64_t> counts;
};

/// Reward source: returns the reward of the next pull of `arm`.
using RewardFn = std::function<double(std::size_t arm)>;

/// Drives one complete run, exactly T pulls.
RunOutcome run_policy(PolicyKind kind, const Instance& inst, std::int64_t budget,
                      const PolicyParams& params, RngStream& rng);

/// Same loop with an arbitrary reward source (reward tapes, deterministic
/// fixtures).
RunOutcome run_policy_with(PolicyKind kind, std::size_t num_arms, std::int64_t budget,
                           const PolicyParams& params, const RewardFn& reward);

/// Pre-drawn per-arm reward sequences: the n-th pull of arm k always sees
/// tape[k][n], whatever policy is pulling.  Used to compare policies on
/// identical reward realisations.
class RewardTape {
 public:
  RewardTape(const Instance& inst, std::int64_t length, std::uint64_t seed);

  double next(std::size_t arm);
  void rewind();
  RewardFn as_fn();

 private:
  std::vector<std::vector<double>> tape_;
  std::vector<std::size_t> position_;
};

/// discard_log as a JSON array of {"round": r, "arm": a} with 1-based arms.
std::string discard_log_to_json(const std::vector<DiscardEvent>& log);

}  // namespace fbai
