#pragma once

#include <cstdint>
#include <string_view>

namespace homebench {

// Deterministic RNG used everywhere seeds matter. std::mt19937_64 would do
// for the engine, but the standard leaves distributions unspecified, so we
// keep the whole draw path in-house to make replay byte-stable.

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // Warm up so that small seeds do not share prefixes.
    splitmix64(state_);
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Uniform in [0, n). n == 0 is a contract violation.
  std::uint64_t below(std::uint64_t n) {
    // Multiply-shift rejection (Lemire); unbiased.
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto lo = static_cast<std::uint64_t>(m);
    if (lo < n) {
      std::uint64_t t = (0ULL - n) % n;
      while (lo < t) {
        x = next_u64();
        m = static_cast<__uint128_t>(x) * n;
        lo = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // Uniform in [0, 1).
  double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool chance(double p) {
    if (p >= 1.0) return true;
    if (p <= 0.0) return false;
    return unit() < p;
  }

 private:
  std::uint64_t state_;
};

// Documented seed-split: each episode draws its stream from
// (root, task id, trial) so episodes are independent of batch order.
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view task_id,
                                 std::uint64_t trial) {
  std::uint64_t s = root ^ (0x9e3779b97f4a7c15ULL * (trial + 1));
  s ^= fnv1a64(task_id);
  splitmix64(s);
  return splitmix64(s);
}

// Named sub-stream of a seed (planner stream vs. simulator stream, etc).
inline std::uint64_t derive_stream(std::uint64_t seed, std::string_view name) {
  std::uint64_t s = seed ^ fnv1a64(name);
  splitmix64(s);
  return splitmix64(s);
}

}  // namespace homebench
