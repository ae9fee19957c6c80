#pragma once

// Strategies and payoffs of the Prisoner's Dilemma extended with an
// abstain (loner) option.

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "pdsim/error.hpp"

namespace pdsim {

enum class Strategy : std::uint8_t { Cooperate = 0, Defect = 1, Abstain = 2 };

inline constexpr std::array<Strategy, 3> kAllStrategies{Strategy::Cooperate, Strategy::Defect,
                                                        Strategy::Abstain};

constexpr std::size_t index_of(Strategy s) noexcept { return static_cast<std::size_t>(s); }

constexpr char to_char(Strategy s) noexcept {
  switch (s) {
    case Strategy::Cooperate: return 'C';
    case Strategy::Defect: return 'D';
    case Strategy::Abstain: return 'A';
  }
  return '?';
}

constexpr std::optional<Strategy> strategy_from_char(char c) noexcept {
  switch (c) {
    case 'C': return Strategy::Cooperate;
    case 'D': return Strategy::Defect;
    case 'A': return Strategy::Abstain;
    default: return std::nullopt;
  }
}

inline std::ostream& operator<<(std::ostream& os, Strategy s) { return os << to_char(s); }

struct PayoffTable {
  double T = 5.0;  // temptation
  double R = 3.0;  // reward
  double P = 1.0;  // punishment
  double S = 0.0;  // sucker
  double L = 1.5;  // loner

  static PayoffTable standard(double loner) { return PayoffTable{5.0, 3.0, 1.0, 0.0, loner}; }
  PayoffTable with_loner(double loner) const {
    PayoffTable t = *this;
    t.L = loner;
    return t;
  }
  friend bool operator==(const PayoffTable&, const PayoffTable&) = default;
};

// First violated inequality, or nullopt for a valid table.
inline std::optional<std::string> ordering_violation(const PayoffTable& t) {
  if (!(t.S < t.P)) return "S<P";
  if (!(t.P < t.R)) return "P<R";
  if (!(t.R < t.T)) return "R<T";
  if (!(t.S < t.L)) return "S<L";
  if (!(t.L < t.R)) return "L<R";
  return std::nullopt;
}

inline void validate_table(const PayoffTable& t) {
  if (auto v = ordering_violation(t)) throw OrderingViolation(*v);
}

struct InteractionPayoff {
  double focal;
  double opponent;
  friend bool operator==(const InteractionPayoff&, const InteractionPayoff&) = default;
};

// Any interaction involving an abstainer pays L to both sides.
constexpr InteractionPayoff payoff_pair(Strategy self, Strategy other, const PayoffTable& t) noexcept {
  if (self == Strategy::Abstain || other == Strategy::Abstain) return {t.L, t.L};
  if (self == Strategy::Cooperate) {
    return other == Strategy::Cooperate ? InteractionPayoff{t.R, t.R} : InteractionPayoff{t.S, t.T};
  }
  return other == Strategy::Cooperate ? InteractionPayoff{t.T, t.S} : InteractionPayoff{t.P, t.P};
}

// Focal payoffs indexed [self][other]; hot loops read this instead of branching.
using PayoffMatrix = std::array<std::array<double, 3>, 3>;

constexpr PayoffMatrix focal_matrix(const PayoffTable& t) noexcept {
  PayoffMatrix m{};
  for (Strategy a : kAllStrategies)
    for (Strategy b : kAllStrategies) m[index_of(a)][index_of(b)] = payoff_pair(a, b, t).focal;
  return m;
}

}  // namespace pdsim
