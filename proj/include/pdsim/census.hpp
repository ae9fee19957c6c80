#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "pdsim/game.hpp"

namespace pdsim {

struct StrategyCensus {
  std::size_t n_C = 0;
  std::size_t n_D = 0;
  std::size_t n_A = 0;

  std::size_t total() const noexcept { return n_C + n_D + n_A; }

  std::size_t count(Strategy s) const noexcept {
    switch (s) {
      case Strategy::Cooperate: return n_C;
      case Strategy::Defect: return n_D;
      case Strategy::Abstain: return n_A;
    }
    return 0;
  }

  std::size_t& count(Strategy s) noexcept {
    switch (s) {
      case Strategy::Cooperate: return n_C;
      case Strategy::Defect: return n_D;
      default: return n_A;
    }
  }

  // The single strategy held by everyone, if any.
  std::optional<Strategy> homogeneous() const noexcept {
    const std::size_t n = total();
    for (Strategy s : kAllStrategies)
      if (count(s) == n) return s;
    return std::nullopt;
  }

  // Strategy with strictly more members than each of the others.
  std::optional<Strategy> strict_plurality() const noexcept {
    for (Strategy s : kAllStrategies) {
      bool best = true;
      for (Strategy o : kAllStrategies)
        if (o != s && count(o) >= count(s)) best = false;
      if (best) return s;
    }
    return std::nullopt;
  }

  friend bool operator==(const StrategyCensus&, const StrategyCensus&) = default;
};

inline StrategyCensus census_of(std::span<const Strategy> members) noexcept {
  StrategyCensus c;
  for (Strategy s : members) ++c.count(s);
  return c;
}

// 64-bit FNV-1a over the strategy sequence.
inline std::uint64_t state_hash(std::span<const Strategy> cells) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (Strategy s : cells) {
    h ^= static_cast<std::uint64_t>(s);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace pdsim
