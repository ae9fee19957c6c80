#pragma once

// Spatial environment. Each cell plays one game with each of its eight Moore
// neighbors on a torus, then all cells simultaneously copy the strategy of
// the best scorer in their neighborhood.

#include <array>
#include <cstddef>
#include <deque>
#include <vector>

#include "pdsim/error.hpp"
#include "pdsim/game.hpp"
#include "pdsim/grid.hpp"
#include "pdsim/trajectory.hpp"

namespace pdsim {

struct Coord {
  std::size_t x;
  std::size_t y;
  friend bool operator==(const Coord&, const Coord&) = default;
  friend auto operator<=>(const Coord&, const Coord&) = default;
};

struct Offset {
  int dx;
  int dy;
};

// Row-major scan order: NW, N, NE, W, E, SW, S, SE.
inline constexpr std::array<Offset, 8> kMooreOffsets{{
    {-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1}}};

inline void require_lattice_size(const Grid& g) {
  if (g.width() < 3 || g.height() < 3) throw GridTooSmall(g.width(), g.height());
}

inline std::array<Coord, 8> moore_neighbors(const Grid& g, std::size_t x, std::size_t y) {
  require_lattice_size(g);
  if (x >= g.width() || y >= g.height()) throw Error("cell out of bounds");
  std::array<Coord, 8> out{};
  for (std::size_t k = 0; k < 8; ++k) {
    out[k] = {g.wrap_x(static_cast<std::ptrdiff_t>(x) + kMooreOffsets[k].dx),
              g.wrap_y(static_cast<std::ptrdiff_t>(y) + kMooreOffsets[k].dy)};
  }
  return out;
}

using ScoreField = std::vector<double>;

namespace detail {

// Wrapped index of x - 1, x, x + 1 for every x, so the hot loops avoid modulo.
inline std::vector<std::array<std::size_t, 3>> wrapped_triples(std::size_t n) {
  std::vector<std::array<std::size_t, 3>> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = {(i + n - 1) % n, i, (i + 1) % n};
  return t;
}

}  // namespace detail

// Sum of the eight focal payoffs of each cell. Computed from neighbor counts,
// so two cells with the same neighborhood multiset score bit-identically.
inline ScoreField score_all(const Grid& g, const PayoffTable& table) {
  require_lattice_size(g);
  const PayoffMatrix m = focal_matrix(table);
  const auto xs = detail::wrapped_triples(g.width());
  const auto ys = detail::wrapped_triples(g.height());
  const auto cells = g.cells();
  const std::size_t w = g.width();

  ScoreField scores(g.size());
  for (std::size_t y = 0; y < g.height(); ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      std::array<unsigned, 3> counts{};
      for (std::size_t ry : ys[y])
        for (std::size_t rx : xs[x]) ++counts[index_of(cells[ry * w + rx])];
      const Strategy self = cells[y * w + x];
      --counts[index_of(self)];
      const auto& row = m[index_of(self)];
      scores[y * w + x] = row[0] * counts[0] + row[1] * counts[1] + row[2] * counts[2];
    }
  }
  return scores;
}

enum class TieRule {
  // Keep the current strategy when the focal score ties the maximum; otherwise
  // take the first maximal neighbor in scan order.
  KeepSelf,
  // First maximal member of the row-major scan with the focal cell in the
  // middle: NW, N, NE, W, self, E, SW, S, SE.
  ScanOrder,
};

struct LatticeRules {
  bool include_self = true;
  TieRule tie_rule = TieRule::KeepSelf;
};

// Synchronous update: every cell reads only the prior grid and its scores.
inline Grid imitation_step(const Grid& g, const ScoreField& scores, const LatticeRules& rules = {}) {
  require_lattice_size(g);
  const auto xs = detail::wrapped_triples(g.width());
  const auto ys = detail::wrapped_triples(g.height());
  const std::size_t w = g.width();
  const auto cells = g.cells();

  Grid next = g;
  auto out = next.cells();
  for (std::size_t y = 0; y < g.height(); ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t self = y * w + x;
      bool have = false;
      double best = 0.0;
      std::size_t pick = self;
      bool self_pending = rules.include_self;
      if (rules.include_self && rules.tie_rule == TieRule::KeepSelf) {
        have = true;
        best = scores[self];
        self_pending = false;
      }
      for (std::size_t j = 0; j < 3; ++j) {
        for (std::size_t i = 0; i < 3; ++i) {
          if (i == 1 && j == 1 && !self_pending) continue;
          const std::size_t idx = ys[y][j] * w + xs[x][i];
          if (!have || scores[idx] > best) {
            have = true;
            best = scores[idx];
            pick = idx;
          }
        }
      }
      out[self] = cells[pick];
    }
  }
  return next;
}

inline Grid imitation_step(const Grid& g, const PayoffTable& table, const LatticeRules& rules = {}) {
  return imitation_step(g, score_all(g, table), rules);
}

struct SnapshotPolicy {
  enum class Kind { None, Periodic, Dense };
  Kind kind = Kind::Periodic;
  std::size_t every = 10;  // Periodic only; first and last are always kept

  static SnapshotPolicy none() { return {Kind::None, 0}; }
  static SnapshotPolicy dense() { return {Kind::Dense, 1}; }
  static SnapshotPolicy periodic(std::size_t every) { return {Kind::Periodic, every}; }

  bool wants(std::size_t gen) const noexcept {
    switch (kind) {
      case Kind::None: return false;
      case Kind::Dense: return true;
      case Kind::Periodic: return gen == 0 || (every != 0 && gen % every == 0);
    }
    return false;
  }
};

struct LatticeOptions {
  std::size_t max_generations = 1000;
  LatticeRules rules{};
  std::size_t max_period = 20;  // longest cycle the run loop looks for
  SnapshotPolicy snapshots{};
};

// Iterate imitation steps. Stops on a fixed point (successor equals the
// current grid, which is not recorded again), on a confirmed cycle of period
// 2..max_period once the trajectory shows 2p consecutive lag-p repeats, or at
// max_generations.
inline Trajectory run_lattice(Grid grid, const PayoffTable& table, const LatticeOptions& opts = {}) {
  validate_table(table);
  require_lattice_size(grid);

  Trajectory traj;
  traj.record(grid.cells());
  if (opts.snapshots.wants(0)) traj.snapshots.emplace(0, grid);

  std::deque<Grid> recent;  // recent.back() is the current grid
  recent.push_back(grid);
  std::size_t cycle_end = 0;  // generation at which a confirmed cycle stops the run

  for (std::size_t gen = 0;; ++gen) {
    if (cycle_end != 0 && gen >= cycle_end) {
      traj.stop = StopReason::Cycle;
      break;
    }
    if (gen == opts.max_generations) {
      traj.stop = StopReason::GenerationCap;
      break;
    }
    Grid next = imitation_step(grid, table, opts.rules);
    if (next == grid) {
      traj.stop = StopReason::FixedPoint;
      break;
    }
    grid = std::move(next);
    const std::size_t t = gen + 1;
    traj.record(grid.cells());
    if (opts.snapshots.wants(t)) traj.snapshots.emplace(t, grid);

    if (cycle_end == 0) {
      // recent[recent.size() - p] is the grid p generations back.
      for (std::size_t p = 2; p <= opts.max_period && p <= recent.size(); ++p) {
        const Grid& back = recent[recent.size() - p];
        if (traj.hashes[t] == traj.hashes[t - p] && back == grid) {
          traj.period = p;
          cycle_end = t + 2 * p - 1;
          break;
        }
      }
    }
    recent.push_back(grid);
    if (recent.size() > opts.max_period) recent.pop_front();
  }
  if (opts.snapshots.kind != SnapshotPolicy::Kind::None) traj.snapshots.emplace(traj.generations() - 1, grid);
  if (traj.stop != StopReason::Cycle) traj.period = 0;
  traj.terminal = std::move(grid);
  return traj;
}

}  // namespace pdsim
