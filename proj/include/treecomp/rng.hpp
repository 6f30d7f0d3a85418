// Portable seeded random generation.
//
// Golden values in the test suite depend on the exact output stream, so the
// generator, the seeding procedure and the bounded-integer reduction are all
// fixed here instead of delegating to <random> distributions (whose outputs
// are implementation-defined).
//
//   * SplitMix64 (Steele, Lea, Flood) expands a 64-bit seed.
//   * Xoshiro256** (Blackman, Vigna) is the stream generator; its state is
//     the first four SplitMix64 outputs of the seed.
//   * uniform_below(m) uses rejection on the top of the 64-bit range so every
//     residue is equally likely.
#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace treecomp {

class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// One SplitMix64 step applied to `x`; used to derive independent per-trial seeds.
constexpr std::uint64_t splitmix(std::uint64_t x) noexcept { return SplitMix64(x).next(); }

/// Seed for trial `index` of a run with master seed `master`.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return master ^ splitmix(index);
}

class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Xoshiro256(std::uint64_t seed) noexcept {
    SplitMix64 sm(seed);
    for (auto& word : s_) word = sm.next();
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept { return next(); }

  constexpr std::uint64_t next() noexcept {
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

  /// Uniform integer in [0, bound). `bound` must be positive.
  constexpr std::uint64_t uniform_below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
    // Reject the lowest (2^64 mod bound) values so the remaining range is a
    // whole number of copies of [0, bound).
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t x = next();
      if (x >= threshold) return x % bound;
    }
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform01() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
};

/// Uniform permutation of 1..n (Fisher-Yates, descending swap positions).
inline std::vector<std::int64_t> sample_permutation(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("sample_permutation: n must be >= 1");
  std::vector<std::int64_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::int64_t{1});
  Xoshiro256 gen(seed);
  for (std::size_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(gen.uniform_below(i + 1));
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

}  // namespace treecomp
