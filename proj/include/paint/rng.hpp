#pragma once

#include <cstdint>
#include <string_view>

namespace paint {

// Deterministic 64-bit generator (splitmix64). Every reproducibility claim in
// this library rides on the stream being identical across platforms, so the
// standard <random> distributions are never used.
class SplitMix64 {
 public:
  constexpr explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  constexpr std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n); n == 0 yields 0.
  constexpr std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : next() % n; }

  constexpr bool coin() { return (next() & 1u) != 0; }

 private:
  std::uint64_t state_;
};

constexpr std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ull;
  }
  return h;
}

// Independent substream per (seed, label); keeps concurrent consumers off each
// other's draws without coordination.
constexpr SplitMix64 stream_for(std::uint64_t seed, std::string_view label) {
  return SplitMix64(seed ^ fnv1a64(label));
}

}  // namespace paint
