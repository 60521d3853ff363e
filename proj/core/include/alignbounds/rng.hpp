#pragma once

#include <array>
#include <cstdint>

namespace alignbounds {

struct RngSeed {
  std::uint64_t value = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl64(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

// xoshiro256++ seeded through SplitMix64. split() derives a child stream
// from the creation seed and a task index, so substreams do not depend on
// how much of the parent has been consumed. That keeps parallel sweeps
// reproducible for any worker count.
class RngStream {
 public:
  explicit RngStream(RngSeed seed) : seed_(seed) {
    std::uint64_t s = seed.value;
    for (auto& word : state_) word = detail::splitmix64(s);
  }

  RngSeed seed() const { return seed_; }

  RngStream split(std::uint64_t task) const {
    std::uint64_t s =
        seed_.value ^ (0x632BE59BD9B4E019ULL + task * 0x9E3779B97F4A7C15ULL);
    return RngStream(RngSeed{detail::splitmix64(s)});
  }

  std::uint64_t next_u64() {
    const std::uint64_t result =
        detail::rotl64(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = detail::rotl64(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

 private:
  RngSeed seed_;
  std::array<std::uint64_t, 4> state_{};
};

}  // namespace alignbounds
