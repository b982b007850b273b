#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace goldband {

/// SplitMix64 finalizer. Used both as a seed mixer and as the avalanche step
/// of derive_seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// 64-bit FNV-1a over the bytes of a string.
constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char ch : s) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Per-trial seed:
///
///   s0 = splitmix64(master)
///   s1 = splitmix64(s0 ^ fnv1a64(label))
///   s2 = splitmix64(s1 ^ trial)
///
/// The result depends only on its arguments, so trials can be scheduled on
/// any thread in any order and still reproduce.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                                    std::uint64_t trial) noexcept {
  std::uint64_t s = splitmix64(master);
  s = splitmix64(s ^ fnv1a64(label));
  return splitmix64(s ^ trial);
}

/// Stream separator for the strategy's own randomness (GR's epsilon draws).
inline constexpr std::uint64_t kStrategyStream = 0x5354524154454759ULL;

/// mt19937_64 with an explicitly defined uniform draw. The standard
/// distributions are implementation-defined, so they are avoided wherever a
/// seed has to reproduce across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) built from the top 53 bits of one engine output.
  double uniform() noexcept {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// One uniform draw; true with probability p. p = 1 is always true and
  /// p = 0 always false.
  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Uniform index in [0, n) from one uniform draw.
  std::size_t index(std::size_t n) noexcept {
    auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace goldband
