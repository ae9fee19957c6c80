#pragma once

// Initial conditions for both environments.

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "pdsim/census.hpp"
#include "pdsim/error.hpp"
#include "pdsim/grid.hpp"
#include "pdsim/rng.hpp"
#include "pdsim/trajectory.hpp"

namespace pdsim {

struct UniformRandom {
  std::vector<Strategy> strategies{kAllStrategies.begin(), kAllStrategies.end()};
};

struct ExactCounts {
  StrategyCensus counts;
};

// Centered inner_side x inner_side block of `inner`, wrapped in middle_layers
// one-cell rings of `middle`; everything else is `outer`.
struct NestedRings {
  Strategy inner = Strategy::Cooperate;
  Strategy middle = Strategy::Abstain;
  Strategy outer = Strategy::Defect;
  std::size_t inner_side = 3;
  std::size_t middle_layers = 3;

  // Inner-middle-outer initials, e.g. "CAD".
  std::string label() const { return {to_char(inner), to_char(middle), to_char(outer)}; }

  static NestedRings from_label(const std::string& label, std::size_t inner_side = 3, std::size_t middle_layers = 3) {
    if (label.size() != 3) throw Error("ring label must have three letters: " + label);
    NestedRings r;
    auto at = [&](std::size_t i) {
      auto s = strategy_from_char(label[i]);
      if (!s) throw Error("bad strategy letter in ring label: " + label);
      return *s;
    };
    r.inner = at(0);
    r.middle = at(1);
    r.outer = at(2);
    r.inner_side = inner_side;
    r.middle_layers = middle_layers;
    return r;
  }
};

// The six inner/middle/outer permutations, in the order DCA, DAC, CDA, CAD, ACD, ADC.
inline std::vector<NestedRings> all_ring_permutations(std::size_t inner_side = 3, std::size_t middle_layers = 3) {
  std::vector<NestedRings> out;
  for (const char* l : {"DCA", "DAC", "CDA", "CAD", "ACD", "ADC"})
    out.push_back(NestedRings::from_label(l, inner_side, middle_layers));
  return out;
}

struct WellMixedTarget {
  std::size_t size = 100;
};

struct LatticeTarget {
  std::size_t width = 100;
  std::size_t height = 100;
};

struct SeedSpec {
  std::variant<UniformRandom, ExactCounts, NestedRings> variant;
  std::variant<WellMixedTarget, LatticeTarget> target;

  std::size_t sites() const {
    if (const auto* w = std::get_if<WellMixedTarget>(&target)) return w->size;
    const auto& l = std::get<LatticeTarget>(target);
    return l.width * l.height;
  }
};

inline std::vector<Strategy> uniform_assignment(const UniformRandom& u, std::size_t n, Rng& rng) {
  if (u.strategies.empty()) throw Error("uniform seeding needs a non-empty strategy set");
  std::vector<Strategy> out(n);
  for (auto& s : out) s = u.strategies[uniform_below(rng, u.strategies.size())];
  return out;
}

inline std::vector<Strategy> exact_assignment(const ExactCounts& e, std::size_t n, Rng& rng) {
  if (e.counts.total() != n)
    throw CountMismatch("counts sum to " + std::to_string(e.counts.total()) + ", expected " + std::to_string(n));
  std::vector<Strategy> out;
  out.reserve(n);
  for (Strategy s : kAllStrategies) out.insert(out.end(), e.counts.count(s), s);
  shuffle(out.begin(), out.end(), rng);
  return out;
}

inline Grid seed_nested_rings(const NestedRings& r, std::size_t width, std::size_t height) {
  if (r.inner_side == 0) throw GridTooSmallForRings("inner_side must be at least 1");
  const std::size_t block = r.inner_side + 2 * r.middle_layers;
  if (block >= std::min(width, height))
    throw GridTooSmallForRings("a " + std::to_string(block) + "-cell ring block does not fit a " +
                               std::to_string(width) + "x" + std::to_string(height) + " grid");
  Grid g(width, height, r.outer);
  const std::size_t x0 = width / 2 - r.inner_side / 2;
  const std::size_t y0 = height / 2 - r.inner_side / 2;
  const std::size_t x1 = x0 + r.inner_side;  // exclusive
  const std::size_t y1 = y0 + r.inner_side;
  for (std::size_t y = y0 - r.middle_layers; y < y1 + r.middle_layers; ++y) {
    for (std::size_t x = x0 - r.middle_layers; x < x1 + r.middle_layers; ++x) {
      const bool inside = x >= x0 && x < x1 && y >= y0 && y < y1;
      g.set(x, y, inside ? r.inner : r.middle);
    }
  }
  return g;
}

inline Grid to_grid(std::vector<Strategy> cells, const LatticeTarget& t) {
  Grid g(t.width, t.height);
  std::copy(cells.begin(), cells.end(), g.cells().begin());
  return g;
}

using SeededState = std::variant<Population, Grid>;

// Realize a seed spec. NestedRings ignores the rng.
inline SeededState seed(const SeedSpec& spec, Rng& rng) {
  const std::size_t n = spec.sites();
  if (n == 0) throw Error("seed target has no sites");
  auto realize = [&](std::vector<Strategy> cells) -> SeededState {
    if (const auto* l = std::get_if<LatticeTarget>(&spec.target)) return to_grid(std::move(cells), *l);
    return cells;
  };
  if (const auto* u = std::get_if<UniformRandom>(&spec.variant)) return realize(uniform_assignment(*u, n, rng));
  if (const auto* e = std::get_if<ExactCounts>(&spec.variant)) return realize(exact_assignment(*e, n, rng));
  const auto* l = std::get_if<LatticeTarget>(&spec.target);
  if (l == nullptr) throw Error("nested rings apply only to lattice targets");
  return seed_nested_rings(std::get<NestedRings>(spec.variant), l->width, l->height);
}

// Short name used in file names and reports.
inline std::string seed_label(const SeedSpec& spec) {
  if (const auto* r = std::get_if<NestedRings>(&spec.variant)) return r->label();
  if (const auto* e = std::get_if<ExactCounts>(&spec.variant)) {
    return std::to_string(e->counts.n_C) + "C" + std::to_string(e->counts.n_D) + "D" +
           std::to_string(e->counts.n_A) + "A";
  }
  std::string s = "uniform-";
  for (Strategy st : std::get<UniformRandom>(spec.variant).strategies) s += to_char(st);
  return s;
}

}  // namespace pdsim
