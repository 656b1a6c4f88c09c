#include "fbai/rng.hpp"

#include <stdexcept>
#include <string>

#include "fbai/instance.hpp"

namespace fbai {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RngStream::RngStream(std::uint64_t base_seed, std::uint64_t stream_id)
    : base_seed_(base_seed), stream_id_(stream_id) {
  std::uint64_t key = splitmix64(base_seed) ^ splitmix64(~stream_id * 0xd1342543de82ef95ULL);
  for (auto& word : s_) {
    key += 0x9e3779b97f4a7c15ULL;
    word = splitmix64(key);
  }
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double sample_reward(const Instance& inst, std::size_t arm, RngStream& rng) {
  if (arm >= inst.num_arms()) {
    throw std::out_of_range("sample_reward: arm " + std::to_string(arm) + " out of range");
  }
  return rng.next_double() < inst.mean(arm) ? 1.0 : 0.0;
}

}  // namespace fbai
