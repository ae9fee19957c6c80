#pragma once

// Random streams. Every run owns an independent engine whose seed is a
// SplitMix64 hash chain over (master seed, key...). Adding runs or L values
// never shifts the streams of existing ones, and the derivation is
// independent of thread scheduling.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace pdsim {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t k : keys) h = splitmix64(h ^ splitmix64(k + 0x632BE59BD9B4E019ULL));
  return h;
}

inline Rng child_stream(std::uint64_t master, std::initializer_list<std::uint64_t> keys) {
  return Rng(derive_seed(master, keys));
}

// Unbiased integer in [0, n). Implemented here rather than with
// std::uniform_int_distribution so draws are identical across standard libraries.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  // Lemire's multiply-and-reject.
  std::uint64_t x = rng();
  __uint128_t m = static_cast<__uint128_t>(x) * n;
  auto low = static_cast<std::uint64_t>(m);
  if (low < n) {
    const std::uint64_t threshold = (0 - n) % n;
    while (low < threshold) {
      x = rng();
      m = static_cast<__uint128_t>(x) * n;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

inline bool coin_flip(Rng& rng) { return (rng() >> 63) != 0; }

// Fisher-Yates with uniform_below, for the same portability reason.
template <class RandomIt>
void shuffle(RandomIt first, RandomIt last, Rng& rng) {
  const auto n = static_cast<std::uint64_t>(last - first);
  for (std::uint64_t i = n; i > 1; --i) {
    const auto j = uniform_below(rng, i);
    using std::swap;
    swap(first[i - 1], first[j]);
  }
}

}  // namespace pdsim
