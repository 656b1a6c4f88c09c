#include "fbai/policy.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "fbai/numeric.hpp"

namespace fbai {

namespace {

// Slack for comparing an integer count against a real threshold that is
// mathematically an integer but carries rounding error.
constexpr double kThresholdSlack = 1e-12;

bool is_cr(PolicyKind kind) { return kind == PolicyKind::CRC || kind == PolicyKind::CRA; }
bool uses_round_robin(PolicyKind kind) { return kind == PolicyKind::SR || is_cr(kind); }

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::int64_t ceil_log2(std::size_t k) {
  std::int64_t phases = 0;
  std::size_t reach = 1;
  while (reach < k) {
    reach *= 2;
    ++phases;
  }
  return phases;
}

}  // namespace

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::SR: return "SR";
    case PolicyKind::CRC: return "CR-C";
    case PolicyKind::CRA: return "CR-A";
    case PolicyKind::SH: return "SH";
    case PolicyKind::UGapE: return "UGapE";
  }
  return "?";
}

PolicyKind parse_policy_kind(std::string_view name) {
  const std::string n = lower(name);
  if (n == "sr") return PolicyKind::SR;
  if (n == "crc" || n == "cr-c") return PolicyKind::CRC;
  if (n == "cra" || n == "cr-a") return PolicyKind::CRA;
  if (n == "sh") return PolicyKind::SH;
  if (n == "ugape") return PolicyKind::UGapE;
  throw std::invalid_argument("unknown policy '" + std::string(name) + "'");
}

PolicyParams PolicyParams::from_map(const std::map<std::string, double>& kv) {
  PolicyParams p;
  for (const auto& [key, value] : kv) {
    if (key == "theta0") {
      p.theta0 = value;
    } else if (key == "ugape_clip") {
      p.ugape_clip = value;
    } else if (key == "ugape_scale") {
      p.ugape_scale = value;
    } else {
      throw std::invalid_argument("unknown policy parameter '" + key + "'");
    }
  }
  return p;
}

std::map<std::string, double> PolicyParams::to_map() const {
  return {{"theta0", theta0}, {"ugape_clip", ugape_clip}, {"ugape_scale", ugape_scale}};
}

double PolicyState::empirical_mean(std::size_t arm) const {
  const std::int64_t n = counts.at(arm);
  return n > 0 ? sums[arm] / static_cast<double>(n) : 0.0;
}

bool PolicyState::is_candidate(std::size_t arm) const {
  return std::binary_search(candidates.begin(), candidates.end(), arm);
}

std::size_t empirical_worst(const PolicyState& state) {
  if (state.candidates.empty()) throw std::logic_error("empty candidate set");
  std::size_t worst = state.candidates.front();
  double worst_mean = state.empirical_mean(worst);
  for (std::size_t arm : state.candidates) {
    const double m = state.empirical_mean(arm);
    if (m < worst_mean) {
      worst = arm;
      worst_mean = m;
    }
  }
  return worst;
}

std::size_t empirical_best(const PolicyState& state) {
  if (state.candidates.empty()) throw std::logic_error("empty candidate set");
  std::size_t best = state.candidates.front();
  double best_mean = state.empirical_mean(best);
  for (std::size_t arm : state.candidates) {
    const double m = state.empirical_mean(arm);
    if (m > best_mean) {
      best = arm;
      best_mean = m;
    }
  }
  return best;
}

DiscardDecision sr_should_discard(const PolicyState& state) {
  DiscardDecision d;
  const std::size_t j = state.candidates.size();
  if (j <= 2) return d;
  std::int64_t min_count = std::numeric_limits<std::int64_t>::max();
  for (std::size_t arm : state.candidates) min_count = std::min(min_count, state.counts[arm]);
  const double threshold = static_cast<double>(state.budget) /
                           (static_cast<double>(j) * log_bar(static_cast<std::int64_t>(state.num_arms)));
  if (static_cast<double>(min_count) >= threshold * (1.0 - kThresholdSlack)) {
    d.should_discard = true;
    d.victim = empirical_worst(state);
  }
  return d;
}

DiscardDecision cr_should_discard(const PolicyState& state, CrVariant variant) {
  DiscardDecision d;
  const auto K = static_cast<std::int64_t>(state.num_arms);
  if (state.t < K) return d;
  const auto warmup = static_cast<std::int64_t>(
      std::floor(state.params.theta0 * static_cast<double>(state.budget)));
  if (state.t < warmup) return d;

  const std::size_t j = state.candidates.size();
  if (j <= 2) return d;

  const std::int64_t n = state.counts[state.candidates.front()];
  for (std::size_t arm : state.candidates) {
    if (state.counts[arm] != n) return d;
  }
  std::int64_t max_out = 0;
  std::int64_t sum_out = 0;
  for (std::size_t arm = 0; arm < state.num_arms; ++arm) {
    if (state.is_candidate(arm)) continue;
    max_out = std::max(max_out, state.counts[arm]);
    sum_out += state.counts[arm];
  }
  if (n <= max_out) return d;
  const std::int64_t remaining = state.budget - sum_out;
  if (remaining <= 0) return d;

  const double beta = static_cast<double>(n) * static_cast<double>(j) *
                      log_bar(static_cast<std::int64_t>(j)) / static_cast<double>(remaining);
  d.beta = beta;
  const double threshold = g_threshold(beta);

  const std::size_t worst = empirical_worst(state);
  const double worst_mean = state.empirical_mean(worst);
  double gap = 0.0;
  if (variant == CrVariant::Conservative) {
    double min_other = std::numeric_limits<double>::infinity();
    for (std::size_t arm : state.candidates) {
      if (arm != worst) min_other = std::min(min_other, state.empirical_mean(arm));
    }
    gap = min_other - worst_mean;
  } else {
    CompensatedSum others;
    for (std::size_t arm : state.candidates) {
      if (arm != worst) others.add(state.empirical_mean(arm));
    }
    gap = others.value() / static_cast<double>(j - 1) - worst_mean;
  }
  if (gap >= threshold) {
    d.should_discard = true;
    d.victim = worst;
  }
  return d;
}

Policy::Policy(PolicyState state) : state_(std::move(state)) {
  log_bar_k_ = log_bar(static_cast<std::int64_t>(state_.num_arms));
}

Policy Policy::create(PolicyKind kind, std::size_t num_arms, std::int64_t budget,
                      PolicyParams params) {
  if (num_arms < 2) throw std::invalid_argument("policy needs at least 2 arms");
  if (budget < 1) throw std::invalid_argument("budget must be >= 1");
  if (is_cr(kind)) {
    if (budget < static_cast<std::int64_t>(num_arms)) {
      throw std::invalid_argument("CR needs T >= K (one forced pull per arm); T=" +
                                  std::to_string(budget) + ", K=" + std::to_string(num_arms));
    }
    const double upper = 1.0 / log_bar(static_cast<std::int64_t>(num_arms));
    if (!(params.theta0 > 0.0 && params.theta0 < upper)) {
      throw std::invalid_argument("theta0 must lie in (0, 1/log_bar(K)) = (0, " +
                                  std::to_string(upper) + ")");
    }
  }
  if (kind == PolicyKind::UGapE && !(params.ugape_clip > 0.0 && params.ugape_scale > 0.0)) {
    throw std::invalid_argument("ugape_clip and ugape_scale must be positive");
  }

  PolicyState s;
  s.kind = kind;
  s.num_arms = num_arms;
  s.budget = budget;
  s.params = params;
  s.candidates.resize(num_arms);
  for (std::size_t k = 0; k < num_arms; ++k) s.candidates[k] = k;
  s.counts.assign(num_arms, 0);
  s.sums.assign(num_arms, 0.0);

  Policy p(std::move(s));
  if (kind == PolicyKind::SH) {
    p.sh_phases_ = ceil_log2(num_arms);
    p.sh_quota_ = budget / (static_cast<std::int64_t>(num_arms) * p.sh_phases_);
    p.sh_phase_counts_.assign(num_arms, 0);
  }
  return p;
}

Policy Policy::resume(PolicyState state) {
  if (!uses_round_robin(state.kind)) {
    throw std::invalid_argument("only SR and CR states can be resumed");
  }
  const std::size_t K = state.num_arms;
  if (K < 2 || state.counts.size() != K || state.sums.size() != K) {
    throw std::invalid_argument("resume: inconsistent arm vectors");
  }
  if (state.candidates.size() < 2 ||
      !std::is_sorted(state.candidates.begin(), state.candidates.end()) ||
      std::adjacent_find(state.candidates.begin(), state.candidates.end()) !=
          state.candidates.end() ||
      state.candidates.back() >= K) {
    throw std::invalid_argument("resume: candidates must be ascending distinct arm indices");
  }
  std::int64_t total = 0;
  for (auto c : state.counts) total += c;
  if (total != state.t || state.t > state.budget) {
    throw std::invalid_argument("resume: counts must sum to t <= T");
  }
  Policy p(std::move(state));
  for (std::size_t arm = 0; arm < K; ++arm) {
    if (p.state_.is_candidate(arm)) continue;
    p.max_outside_ = std::max(p.max_outside_, p.state_.counts[arm]);
    p.sum_outside_ += p.state_.counts[arm];
  }
  p.refresh_cursor();
  return p;
}

void Policy::refresh_cursor() {
  const auto& c = state_.candidates;
  cursor_ = 0;
  for (std::size_t i = 1; i < c.size(); ++i) {
    if (state_.counts[c[i]] < state_.counts[c[cursor_]]) cursor_ = i;
  }
}

// Called after the arm at cursor_ has been pulled.  Under round-robin the
// arms holding the minimum count form a suffix of the candidate list, so the
// next minimum is normally the neighbour.
void Policy::advance_cursor() {
  const auto& c = state_.candidates;
  const std::int64_t old_min = state_.counts[c[cursor_]] - 1;
  for (std::size_t i = cursor_ + 1; i < c.size(); ++i) {
    if (state_.counts[c[i]] == old_min) {
      cursor_ = i;
      return;
    }
  }
  refresh_cursor();
}

void Policy::apply_discard(std::size_t victim) {
  auto& c = state_.candidates;
  const auto it = std::lower_bound(c.begin(), c.end(), victim);
  if (it == c.end() || *it != victim) throw std::logic_error("discarding a non-candidate");
  c.erase(it);
  state_.discard_log.push_back({state_.t + 1, victim});
  max_outside_ = std::max(max_outside_, state_.counts[victim]);
  sum_outside_ += state_.counts[victim];
  if (uses_round_robin(state_.kind)) refresh_cursor();
}

std::size_t Policy::select_arm() {
  if (pending_) throw std::logic_error("select_arm called twice without observe");
  if (finished()) throw std::logic_error("budget exhausted");

  std::size_t arm = 0;
  switch (state_.kind) {
    case PolicyKind::SR: {
      const std::size_t j = state_.candidates.size();
      if (j > 2) {
        const double threshold =
            static_cast<double>(state_.budget) / (static_cast<double>(j) * log_bar_k_);
        const auto min_count = static_cast<double>(state_.counts[round_robin_arm()]);
        if (min_count >= threshold * (1.0 - kThresholdSlack)) {
          apply_discard(empirical_worst(state_));
        }
      }
      arm = round_robin_arm();
      break;
    }
    case PolicyKind::CRC:
    case PolicyKind::CRA: {
      // Cheap necessary conditions first; the full predicate is evaluated only
      // when every candidate holds the same count.
      if (cursor_ == 0 && state_.candidates.size() > 2 &&
          state_.counts[state_.candidates.front()] > max_outside_) {
        const auto variant = state_.kind == PolicyKind::CRC ? CrVariant::Conservative
                                                            : CrVariant::Aggressive;
        const DiscardDecision d = cr_should_discard(state_, variant);
        if (d.should_discard) apply_discard(*d.victim);
      }
      arm = round_robin_arm();
      break;
    }
    case PolicyKind::SH:
      arm = select_sh();
      break;
    case PolicyKind::UGapE:
      arm = select_ugape();
      break;
  }
  pending_ = arm;
  return arm;
}

void Policy::observe(std::size_t arm, double reward) {
  if (!pending_ || *pending_ != arm) {
    throw std::logic_error("observe: arm " + std::to_string(arm) +
                           " does not match the current selection");
  }
  if (!std::isfinite(reward)) throw std::invalid_argument("observe: reward must be finite");
  pending_.reset();
  ++state_.t;
  ++state_.counts[arm];
  state_.sums[arm] += reward;
  if (uses_round_robin(state_.kind)) {
    advance_cursor();
  } else if (state_.kind == PolicyKind::SH) {
    ++sh_phase_counts_[arm];
  }
}

std::size_t Policy::select_sh() {
  auto& c = state_.candidates;
  while (sh_phase_ < sh_phases_) {
    std::size_t pick = c.front();
    for (std::size_t arm : c) {
      if (sh_phase_counts_[arm] < sh_phase_counts_[pick]) pick = arm;
    }
    if (sh_phase_counts_[pick] < sh_quota_) return pick;

    // Phase complete: keep the empirical top half (ceil), ties to lower index.
    std::vector<std::size_t> ranked = c;
    std::stable_sort(ranked.begin(), ranked.end(), [&](std::size_t a, std::size_t b) {
      return state_.empirical_mean(a) > state_.empirical_mean(b);
    });
    const std::size_t keep = (c.size() + 1) / 2;
    std::vector<std::size_t> dropped(ranked.begin() + static_cast<std::ptrdiff_t>(keep),
                                     ranked.end());
    std::sort(dropped.begin(), dropped.end());
    for (std::size_t arm : dropped) apply_discard(arm);

    ++sh_phase_;
    std::fill(sh_phase_counts_.begin(), sh_phase_counts_.end(), 0);
    if (sh_phase_ < sh_phases_) {
      sh_quota_ = state_.budget / (static_cast<std::int64_t>(c.size()) * sh_phases_);
    }
  }
  // Leftover budget: round-robin over the survivors.
  std::size_t pick = c.front();
  for (std::size_t arm : c) {
    if (state_.counts[arm] < state_.counts[pick]) pick = arm;
  }
  return pick;
}

std::size_t Policy::select_ugape() {
  const std::size_t K = state_.num_arms;
  for (std::size_t arm = 0; arm < K; ++arm) {
    if (state_.counts[arm] == 0) return arm;
  }

  std::vector<double> mean(K);
  for (std::size_t k = 0; k < K; ++k) mean[k] = state_.empirical_mean(k);

  // Top two empirical means.
  std::size_t b1 = 0;
  for (std::size_t k = 1; k < K; ++k) {
    if (mean[k] > mean[b1]) b1 = k;
  }
  std::size_t b2 = b1 == 0 ? 1 : 0;
  for (std::size_t k = 0; k < K; ++k) {
    if (k != b1 && mean[k] > mean[b2]) b2 = k;
  }

  const double clip = state_.params.ugape_clip;
  CompensatedSum h;
  for (std::size_t k = 0; k < K; ++k) {
    const double gap = k == b1 ? mean[b1] - mean[b2] : mean[b1] - mean[k];
    const double g = std::max(gap, clip);
    h.add(1.0 / (g * g));
  }
  const double a = state_.params.ugape_scale *
                   static_cast<double>(state_.budget - static_cast<std::int64_t>(K)) / h.value();

  std::vector<double> width(K), upper(K);
  for (std::size_t k = 0; k < K; ++k) {
    width[k] = std::sqrt(std::max(a, 0.0) / static_cast<double>(state_.counts[k]));
    upper[k] = mean[k] + width[k];
  }
  std::size_t u1 = 0;
  for (std::size_t k = 1; k < K; ++k) {
    if (upper[k] > upper[u1]) u1 = k;
  }
  std::size_t u2 = u1 == 0 ? 1 : 0;
  for (std::size_t k = 0; k < K; ++k) {
    if (k != u1 && upper[k] > upper[u2]) u2 = k;
  }

  std::size_t J = 0;
  double best_b = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < K; ++k) {
    const double rival = k == u1 ? upper[u2] : upper[u1];
    const double b = rival - (mean[k] - width[k]);
    if (b < best_b) {
      best_b = b;
      J = k;
    }
  }
  if (!ugape_best_arm_ || best_b < ugape_best_index_) {
    ugape_best_index_ = best_b;
    ugape_best_arm_ = J;
  }
  const std::size_t u = J == u1 ? u2 : u1;
  if (width[J] > width[u]) return J;
  if (width[u] > width[J]) return u;
  return std::min(J, u);
}

std::size_t Policy::recommend() const {
  if (!finished()) throw std::logic_error("recommend called before the budget is exhausted");
  if (state_.kind == PolicyKind::UGapE && ugape_best_arm_) return *ugape_best_arm_;
  return empirical_best(state_);
}

namespace {

template <typename Reward>
RunOutcome drive(Policy policy, Reward&& reward) {
  while (!policy.finished()) {
    const std::size_t arm = policy.select_arm();
    policy.observe(arm, reward(arm));
  }
  RunOutcome out;
  out.recommended = policy.recommend();
  out.discard_log = policy.state().discard_log;
  out.counts = policy.state().counts;
  return out;
}

}  // namespace

RunOutcome run_policy(PolicyKind kind, const Instance& inst, std::int64_t budget,
                      const PolicyParams& params, RngStream& rng) {
  const auto means = inst.means();
  return drive(Policy::create(kind, inst.num_arms(), budget, params), [&](std::size_t arm) {
    return rng.next_double() < means[arm] ? 1.0 : 0.0;
  });
}

RunOutcome run_policy_with(PolicyKind kind, std::size_t num_arms, std::int64_t budget,
                           const PolicyParams& params, const RewardFn& reward) {
  return drive(Policy::create(kind, num_arms, budget, params), reward);
}

RewardTape::RewardTape(const Instance& inst, std::int64_t length, std::uint64_t seed)
    : tape_(inst.num_arms()), position_(inst.num_arms(), 0) {
  if (length < 0) throw std::invalid_argument("tape length must be >= 0");
  for (std::size_t arm = 0; arm < inst.num_arms(); ++arm) {
    RngStream rng(seed, arm);
    tape_[arm].reserve(static_cast<std::size_t>(length));
    for (std::int64_t n = 0; n < length; ++n) tape_[arm].push_back(sample_reward(inst, arm, rng));
  }
}

double RewardTape::next(std::size_t arm) {
  auto& pos = position_.at(arm);
  if (pos >= tape_[arm].size()) throw std::out_of_range("reward tape exhausted");
  return tape_[arm][pos++];
}

void RewardTape::rewind() { std::fill(position_.begin(), position_.end(), 0); }

RewardFn RewardTape::as_fn() {
  return [this](std::size_t arm) { return next(arm); };
}

std::string discard_log_to_json(const std::vector<DiscardEvent>& log) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : log) arr.push_back({{"round", e.round}, {"arm", e.arm + 1}});
  return arr.dump();
}

}  // namespace fbai
