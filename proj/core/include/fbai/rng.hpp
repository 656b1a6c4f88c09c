#pragma once

#include <array>
#include <cstdint>

namespace fbai {

class Instance;

/// SplitMix64 finaliser; used to derive independent stream keys.
std::uint64_t splitmix64(std::uint64_t x);

/// Deterministic pseudo-random stream keyed by (base_seed, stream_id).
///
/// The key pair is hashed through SplitMix64 into the 256-bit state of a
/// xoshiro256** generator, so distinct stream ids give unrelated sequences
/// and the same pair always replays the same sequence.
class RngStream {
 public:
  RngStream(std::uint64_t base_seed, std::uint64_t stream_id);

  std::uint64_t base_seed() const { return base_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 bits of resolution.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t base_seed_;
  std::uint64_t stream_id_;
  std::array<std::uint64_t, 4> s_{};
};

/// Bernoulli(mean) reward for `arm` (0-based).  Throws std::out_of_range.
double sample_reward(const Instance& inst, std::size_t arm, RngStream& rng);

}  // namespace fbai
