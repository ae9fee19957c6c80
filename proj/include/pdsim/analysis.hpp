#pragma once

// Phenomenology extracted from trajectories: equilibria, clusters, gliders,
// outcome labels and batch aggregates.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdlib>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pdsim/census.hpp"
#include "pdsim/error.hpp"
#include "pdsim/grid.hpp"
#include "pdsim/lattice.hpp"
#include "pdsim/trajectory.hpp"

namespace pdsim {

// ---------------------------------------------------------------------------
// Equilibria

enum class EquilibriumKind { FixedPoint, Cycle, NotConverged };

struct EquilibriumReport {
  EquilibriumKind kind = EquilibriumKind::NotConverged;
  std::size_t period = 0;  // 1 for FixedPoint, p for Cycle, 0 otherwise
  std::size_t onset = 0;   // first generation of the repeating regime
  friend bool operator==(const EquilibriumReport&, const EquilibriumReport&) = default;
};

inline const char* to_string(EquilibriumKind k) {
  switch (k) {
    case EquilibriumKind::FixedPoint: return "FixedPoint";
    case EquilibriumKind::Cycle: return "Cycle";
    case EquilibriumKind::NotConverged: return "NotConverged";
  }
  return "?";
}

namespace detail {

// Generations g and g - lag hold the same state. Hash equality is confirmed
// against stored snapshots whenever both exist.
inline bool same_state(const Trajectory& t, std::size_t g, std::size_t lag) {
  if (t.hashes[g] != t.hashes[g - lag]) return false;
  const auto a = t.snapshots.find(g);
  const auto b = t.snapshots.find(g - lag);
  if (a != t.snapshots.end() && b != t.snapshots.end()) return a->second == b->second;
  return true;
}

// Number of trailing generations g with same_state(g, lag).
inline std::size_t trailing_repeats(const Trajectory& t, std::size_t lag) {
  std::size_t k = 0;
  for (std::size_t g = t.hashes.size(); g-- > lag;) {
    if (!same_state(t, g, lag)) break;
    ++k;
  }
  return k;
}

}  // namespace detail

inline EquilibriumReport detect_equilibrium(const Trajectory& t, std::size_t max_period = 20) {
  const std::size_t n = t.hashes.size();
  if (n == 0) throw Error("empty trajectory");
  const std::size_t run1 = detail::trailing_repeats(t, 1);
  // The run loops stop at a fixed point without recording the repeat itself.
  if (t.stop == StopReason::Homogeneous || t.stop == StopReason::FixedPoint || run1 > 0)
    return {EquilibriumKind::FixedPoint, 1, n - 1 - run1};
  for (std::size_t p = 2; p <= max_period; ++p) {
    const std::size_t k = detail::trailing_repeats(t, p);
    if (k >= 2 * p) return {EquilibriumKind::Cycle, p, n - k - p};
  }
  return {EquilibriumKind::NotConverged, 0, n};
}

// ---------------------------------------------------------------------------
// Clusters

enum class Adjacency { Moore, VonNeumann };

// Extent on the torus: the shortest wrapped interval covering the occupied
// columns (rows). x + width may exceed the grid width when the box wraps.
struct BoundingBox {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t width = 0;
  std::size_t height = 0;
  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct Cluster {
  Strategy strategy;
  std::size_t size;
  BoundingBox box;
  std::vector<std::size_t> cells;  // row-major indices, ascending
};

struct ClusterReport {
  std::vector<Cluster> clusters;  // ordered by first cell in row-major order

  std::size_t total_cells() const {
    return std::accumulate(clusters.begin(), clusters.end(), std::size_t{0},
                           [](std::size_t s, const Cluster& c) { return s + c.size; });
  }
};

namespace detail {

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent[b] = a;
  }
};

// Shortest circular interval covering all occupied positions: (start, length).
inline std::pair<std::size_t, std::size_t> circular_extent(const std::vector<bool>& occupied) {
  const std::size_t n = occupied.size();
  std::size_t best_gap = 0, best_gap_end = 0;  // gap ends just before best_gap_end
  std::size_t first = n;
  for (std::size_t i = 0; i < n; ++i)
    if (occupied[i]) {
      first = i;
      break;
    }
  if (first == n) return {0, 0};
  // Walk the circle once starting at an occupied position, measuring gaps.
  std::size_t gap = 0;
  for (std::size_t step = 1; step <= n; ++step) {
    const std::size_t i = (first + step) % n;
    if (occupied[i]) {
      if (gap > best_gap) {
        best_gap = gap;
        best_gap_end = i;
      }
      gap = 0;
    } else {
      ++gap;
    }
  }
  if (best_gap == 0) return {0, n};
  return {best_gap_end, n - best_gap};
}

}  // namespace detail

// Connected components of `strategy` cells with toroidal wrap. Union-find over
// the forward half of each neighborhood, so every adjacent pair is joined once.
inline ClusterReport find_clusters(const Grid& g, Strategy strategy, Adjacency adj = Adjacency::Moore) {
  const std::size_t w = g.width(), h = g.height();
  detail::DisjointSets sets(g.size());
  static constexpr std::array<Offset, 4> kMooreForward{{{1, 0}, {-1, 1}, {0, 1}, {1, 1}}};
  static constexpr std::array<Offset, 2> kVonNeumannForward{{{1, 0}, {0, 1}}};
  const std::span<const Offset> forward =
      adj == Adjacency::Moore ? std::span<const Offset>(kMooreForward) : std::span<const Offset>(kVonNeumannForward);

  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w; ++x) {
      if (g.at(x, y) != strategy) continue;
      for (const Offset& o : forward) {
        const std::size_t nx = g.wrap_x(static_cast<std::ptrdiff_t>(x) + o.dx);
        const std::size_t ny = g.wrap_y(static_cast<std::ptrdiff_t>(y) + o.dy);
        if (g.at(nx, ny) == strategy) sets.unite(g.index(x, y), g.index(nx, ny));
      }
    }

  ClusterReport report;
  std::map<std::size_t, std::size_t> slot_of_root;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.cells()[i] != strategy) continue;
    const std::size_t root = sets.find(i);
    auto [it, fresh] = slot_of_root.try_emplace(root, report.clusters.size());
    if (fresh) report.clusters.push_back(Cluster{strategy, 0, {}, {}});
    Cluster& c = report.clusters[it->second];
    ++c.size;
    c.cells.push_back(i);
  }
  for (Cluster& c : report.clusters) {
    std::vector<bool> cols(w, false), rows(h, false);
    for (std::size_t i : c.cells) {
      cols[i % w] = true;
      rows[i / w] = true;
    }
    const auto [x0, cw] = detail::circular_extent(cols);
    const auto [y0, ch] = detail::circular_extent(rows);
    c.box = {x0, y0, cw, ch};
  }
  return report;
}

// Every Moore neighbor of the cluster outside it holds `shell`.
inline bool surrounded_by(const Grid& g, const Cluster& c, Strategy shell) {
  std::vector<bool> member(g.size(), false);
  for (std::size_t i : c.cells) member[i] = true;
  bool any_border = false;  // a cluster filling the whole grid has no shell
  for (std::size_t i : c.cells) {
    const auto x = static_cast<std::ptrdiff_t>(i % g.width());
    const auto y = static_cast<std::ptrdiff_t>(i / g.width());
    for (const Offset& o : kMooreOffsets) {
      const std::size_t j = g.index(g.wrap_x(x + o.dx), g.wrap_y(y + o.dy));
      if (member[j]) continue;
      if (g.cells()[j] != shell) return false;
      any_border = true;
    }
  }
  return any_border;
}

// Smallest cooperator cluster fully enclosed by defectors, if any.
inline std::optional<std::size_t> min_enclosed_cooperator_cluster(const Grid& g, Adjacency adj = Adjacency::Moore) {
  std::optional<std::size_t> best;
  for (const Cluster& c : find_clusters(g, Strategy::Cooperate, adj).clusters)
    if (surrounded_by(g, c, Strategy::Defect) && (!best || c.size < *best)) best = c.size;
  return best;
}

// ---------------------------------------------------------------------------
// Gliders

struct Displacement {
  int dx = 0;
  int dy = 0;
  friend bool operator==(const Displacement&, const Displacement&) = default;
};

// Signed representative of a torus shift with the smallest magnitude.
inline int signed_shift(std::size_t s, std::size_t n) {
  const auto v = static_cast<int>(s);
  const auto m = static_cast<int>(n);
  return v > m / 2 ? v - m : v;
}

// Ordering used to pick "the smallest" displacement among several matches.
inline bool displacement_less(const Displacement& a, const Displacement& b) {
  const int ma = std::abs(a.dx) + std::abs(a.dy), mb = std::abs(b.dx) + std::abs(b.dy);
  if (ma != mb) return ma < mb;
  if (a.dy != b.dy) return a.dy < b.dy;
  return a.dx < b.dx;
}

// Smallest nonzero d with later == earlier translated by d, if any.
inline std::optional<Displacement> whole_grid_translation(const Grid& earlier, const Grid& later) {
  if (earlier.width() != later.width() || earlier.height() != later.height()) return std::nullopt;
  if (earlier.census() != later.census()) return std::nullopt;
  const std::size_t w = earlier.width(), h = earlier.height();
  const auto a = earlier.cells(), b = later.cells();
  std::optional<Displacement> best;
  for (std::size_t sy = 0; sy < h; ++sy) {
    for (std::size_t sx = 0; sx < w; ++sx) {
      if (sx == 0 && sy == 0) continue;
      bool match = true;
      for (std::size_t y = 0; y < h && match; ++y) {
        const std::size_t ty = (y + sy) % h;
        for (std::size_t x = 0; x < w; ++x)
          if (b[ty * w + (x + sx) % w] != a[y * w + x]) {
            match = false;
            break;
          }
      }
      if (!match) continue;
      const Displacement d{signed_shift(sx, w), signed_shift(sy, h)};
      if (!best || displacement_less(d, *best)) best = d;
    }
  }
  return best;
}

namespace detail {

// A connected patch of non-background cells, normalized so it can be compared
// with a translated copy.
struct Patch {
  std::size_t x0, y0;  // bounding box origin on the torus
  std::size_t w, h;
  std::vector<std::pair<std::size_t, Strategy>> cells;  // local offsets (y * w + x), sorted
};

inline std::vector<Patch> foreground_patches(const Grid& g, Strategy background) {
  const std::size_t gw = g.width(), gh = g.height();
  DisjointSets sets(g.size());
  static constexpr std::array<Offset, 4> kForward{{{1, 0}, {-1, 1}, {0, 1}, {1, 1}}};
  for (std::size_t y = 0; y < gh; ++y)
    for (std::size_t x = 0; x < gw; ++x) {
      if (g.at(x, y) == background) continue;
      for (const Offset& o : kForward) {
        const std::size_t nx = g.wrap_x(static_cast<std::ptrdiff_t>(x) + o.dx);
        const std::size_t ny = g.wrap_y(static_cast<std::ptrdiff_t>(y) + o.dy);
        if (g.at(nx, ny) != background) sets.unite(g.index(x, y), g.index(nx, ny));
      }
    }
  std::map<std::size_t, std::vector<std::size_t>> members;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.cells()[i] != background) members[sets.find(i)].push_back(i);

  std::vector<Patch> patches;
  for (auto& [root, cells] : members) {
    std::vector<bool> cols(gw, false), rows(gh, false);
    for (std::size_t i : cells) {
      cols[i % gw] = true;
      rows[i / gw] = true;
    }
    const auto [x0, w] = circular_extent(cols);
    const auto [y0, h] = circular_extent(rows);
    Patch p{x0, y0, w, h, {}};
    for (std::size_t i : cells) {
      const std::size_t lx = (i % gw + gw - x0) % gw;
      const std::size_t ly = (i / gw + gh - y0) % gh;
      p.cells.emplace_back(ly * w + lx, g.cells()[i]);
    }
    std::sort(p.cells.begin(), p.cells.end());
    patches.push_back(std::move(p));
  }
  return patches;
}

inline bool same_shape(const Patch& a, const Patch& b) { return a.w == b.w && a.h == b.h && a.cells == b.cells; }

inline Strategy most_common(const Grid& g) {
  const StrategyCensus c = g.census();
  return *std::max_element(kAllStrategies.begin(), kAllStrategies.end(),
                           [&](Strategy a, Strategy b) { return c.count(a) < c.count(b); });
}

// Displacements d (within `reach` cells per axis) such that some patch of
// frames[0] reappears unchanged at offset k*d in every frames[k], and was not
// still in place in frames[1].
inline std::vector<Displacement> tracked_patch_translations(std::span<const Grid* const> frames, std::size_t reach) {
  const Grid& first = *frames[0];
  const Strategy background = most_common(first);
  std::vector<std::vector<Patch>> patches;
  for (const Grid* f : frames) patches.push_back(foreground_patches(*f, background));
  const std::size_t gw = first.width(), gh = first.height();
  auto present = [&](const std::vector<Patch>& in, const Patch& p, std::size_t x0, std::size_t y0) {
    return std::any_of(in.begin(), in.end(),
                       [&](const Patch& q) { return q.x0 == x0 && q.y0 == y0 && same_shape(p, q); });
  };
  std::vector<Displacement> out;
  for (const Patch& p : patches[0]) {
    // A patch spanning most of the grid is background noise, not an object.
    if (p.w * 2 > gw || p.h * 2 > gh) continue;
    if (present(patches[1], p, p.x0, p.y0)) continue;
    for (const Patch& q : patches[1]) {
      if (!same_shape(p, q)) continue;
      const Displacement d{signed_shift((q.x0 + gw - p.x0) % gw, gw), signed_shift((q.y0 + gh - p.y0) % gh, gh)};
      if (d == Displacement{} || static_cast<std::size_t>(std::abs(d.dx)) > reach ||
          static_cast<std::size_t>(std::abs(d.dy)) > reach)
        continue;
      bool travels = true;
      for (std::size_t k = 2; k < frames.size() && travels; ++k) {
        const auto step = static_cast<std::ptrdiff_t>(k);
        travels = present(patches[k], p, first.wrap_x(static_cast<std::ptrdiff_t>(p.x0) + step * d.dx),
                          first.wrap_y(static_cast<std::ptrdiff_t>(p.y0) + step * d.dy));
      }
      if (travels && std::find(out.begin(), out.end(), d) == out.end()) out.push_back(d);
    }
  }
  return out;
}

}  // namespace detail

struct GliderReport {
  std::size_t period = 0;
  Displacement displacement;
  std::size_t onset = 0;     // first generation t of the confirmed pair
  bool whole_grid = false;   // the entire grid translates, not just one patch
  friend bool operator==(const GliderReport&, const GliderReport&) = default;
};

// Looks for a state that recurs p generations later translated by a nonzero
// displacement d, and keeps doing so for kGliderPeriods periods in a row. The
// whole grid is tried first; then individual patches of non-background cells,
// which finds gliders travelling among static structures. Patch displacements
// are limited to 2p cells per axis, the farthest influence can propagate in p
// steps. Requires dense snapshots over the window of interest.
inline constexpr std::size_t kGliderPeriods = 3;

inline std::optional<GliderReport> detect_glider(const Trajectory& t, std::size_t max_period = 8) {
  const auto& snaps = t.snapshots;
  auto snap = [&](std::size_t g) -> const Grid* {
    auto it = snaps.find(g);
    return it == snaps.end() ? nullptr : &it->second;
  };
  for (std::size_t p = 1; p <= max_period; ++p) {
    for (const auto& [g0, grid0] : snaps) {
      std::vector<const Grid*> frames{&grid0};
      for (std::size_t k = 1; k <= kGliderPeriods && frames.back() != nullptr; ++k) frames.push_back(snap(g0 + k * p));
      if (frames.back() == nullptr) continue;
      // A static grid with translational symmetry is not moving.
      if (grid0 == *frames[1]) continue;
      if (auto d = whole_grid_translation(grid0, *frames[1])) {
        bool holds = true;
        for (std::size_t k = 2; k < frames.size() && holds; ++k) {
          const auto step = static_cast<std::ptrdiff_t>(k);
          holds = grid0.translated(step * d->dx, step * d->dy) == *frames[k];
        }
        if (holds) return GliderReport{p, *d, g0, true};
      }
      const auto found = detail::tracked_patch_translations(frames, 2 * p);
      if (!found.empty())
        return GliderReport{p, *std::min_element(found.begin(), found.end(), displacement_less), g0, false};
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Outcomes

enum class OutcomeLabel {
  DefectionSpreads,
  CooperationSpreads,
  AbstinenceSpreads,
  StructurallyStable,
  AbstainersInvaded,
  Mixed,
};

inline constexpr std::array<OutcomeLabel, 6> kAllOutcomes{
    OutcomeLabel::DefectionSpreads,   OutcomeLabel::CooperationSpreads, OutcomeLabel::AbstinenceSpreads,
    OutcomeLabel::StructurallyStable, OutcomeLabel::AbstainersInvaded,  OutcomeLabel::Mixed};

inline const char* to_string(OutcomeLabel l) {
  switch (l) {
    case OutcomeLabel::DefectionSpreads: return "DefectionSpreads";
    case OutcomeLabel::CooperationSpreads: return "CooperationSpreads";
    case OutcomeLabel::AbstinenceSpreads: return "AbstinenceSpreads";
    case OutcomeLabel::StructurallyStable: return "StructurallyStable";
    case OutcomeLabel::AbstainersInvaded: return "AbstainersInvaded";
    case OutcomeLabel::Mixed: return "Mixed";
  }
  return "?";
}

struct OutcomeThresholds {
  double dominance = 0.99;           // share of C that counts as cooperation spreading
  double defector_share_of_rest = 0.99;  // share of non-C cells that must be D
  double spread_margin = 0.05;       // minimal share gained for a strategy to have spread
};

// Rules, first match wins:
//   CooperationSpreads  C share >= dominance.
//   DefectionSpreads    D strict plurality, D >= defector_share_of_rest of the
//                       non-C sites, and D gained >= spread_margin share (or
//                       holds every site).
//   AbstinenceSpreads   A strict plurality and A gained >= spread_margin share
//                       (or holds every site).
//   AbstainersInvaded   A below its seeded count while a C cluster survives
//                       fully enclosed by D (lattice only).
//   StructurallyStable  fixed point or cycle with all three strategies present.
//   Mixed               anything else.
inline OutcomeLabel classify_outcome(const Trajectory& t, const EquilibriumReport& eq,
                                     const OutcomeThresholds& th = {}) {
  const StrategyCensus& start = t.initial_census();
  const StrategyCensus& end = t.terminal_census();
  const auto n = static_cast<double>(end.total());
  const auto share = [n](std::size_t c) { return static_cast<double>(c) / n; };
  const auto gained = [&](Strategy s) {
    return share(end.count(s)) - share(start.count(s)) >= th.spread_margin || end.count(s) == end.total();
  };
  const auto plurality = end.strict_plurality();

  if (share(end.n_C) >= th.dominance) return OutcomeLabel::CooperationSpreads;
  if (plurality == Strategy::Defect && gained(Strategy::Defect) &&
      static_cast<double>(end.n_D) >= th.defector_share_of_rest * static_cast<double>(end.n_D + end.n_A))
    return OutcomeLabel::DefectionSpreads;
  if (plurality == Strategy::Abstain && gained(Strategy::Abstain)) return OutcomeLabel::AbstinenceSpreads;
  if (t.is_lattice() && end.n_A < start.n_A && min_enclosed_cooperator_cluster(t.terminal_grid()))
    return OutcomeLabel::AbstainersInvaded;
  if (eq.kind != EquilibriumKind::NotConverged && end.n_C > 0 && end.n_D > 0 && end.n_A > 0)
    return OutcomeLabel::StructurallyStable;
  return OutcomeLabel::Mixed;
}

// ---------------------------------------------------------------------------
// Batches

struct RunAnalysis {
  EquilibriumReport equilibrium;
  OutcomeLabel outcome;
  bool cooperation_survived;
  std::optional<std::size_t> min_enclosed_c_cluster;  // lattice runs at equilibrium only
};

inline RunAnalysis analyze_run(const Trajectory& t, std::size_t max_period = 20, const OutcomeThresholds& th = {}) {
  RunAnalysis r;
  r.equilibrium = detect_equilibrium(t, max_period);
  r.outcome = classify_outcome(t, r.equilibrium, th);
  r.cooperation_survived = t.terminal_census().n_C > 0;
  if (t.is_lattice() && r.equilibrium.kind != EquilibriumKind::NotConverged)
    r.min_enclosed_c_cluster = min_enclosed_cooperator_cluster(t.terminal_grid());
  return r;
}

struct MeanCensus {
  double C = 0, D = 0, A = 0;
};

struct BatchSummary {
  std::size_t runs = 0;
  std::vector<MeanCensus> mean_census;  // per generation, padded
  std::map<OutcomeLabel, std::size_t> outcome_counts;
  std::size_t fixed_points = 0;
  std::map<std::size_t, std::size_t> cycles_by_period;
  std::size_t not_converged = 0;
  double cooperation_survival = 0.0;  // fraction of runs with terminal C > 0
  std::optional<std::size_t> min_enclosed_c_cluster;
  std::vector<RunAnalysis> per_run;

  double outcome_frequency(OutcomeLabel l) const {
    auto it = outcome_counts.find(l);
    return it == outcome_counts.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(runs);
  }
};

// Census of generation g, continuing a finished run with its absorbing state
// (or its cycle, replayed in phase).
inline const StrategyCensus& padded_census(const Trajectory& t, std::size_t g) {
  const std::size_t n = t.census.size();
  if (g < n) return t.census[g];
  if (t.stop == StopReason::Cycle && t.period > 1 && n >= t.period) {
    const std::size_t back = (g - (n - 1)) % t.period;  // steps past the end, folded onto the cycle
    return t.census[n - 1 - (t.period - back) % t.period];
  }
  return t.census.back();
}

inline BatchSummary aggregate_runs(std::span<const Trajectory> runs, std::size_t max_period = 20,
                                   const OutcomeThresholds& th = {}) {
  if (runs.empty()) throw EmptyBatch();
  BatchSummary s;
  s.runs = runs.size();
  std::size_t longest = 0;
  std::size_t survived = 0;
  for (const Trajectory& t : runs) {
    longest = std::max(longest, t.generations());
    RunAnalysis r = analyze_run(t, max_period, th);
    ++s.outcome_counts[r.outcome];
    switch (r.equilibrium.kind) {
      case EquilibriumKind::FixedPoint: ++s.fixed_points; break;
      case EquilibriumKind::Cycle: ++s.cycles_by_period[r.equilibrium.period]; break;
      case EquilibriumKind::NotConverged: ++s.not_converged; break;
    }
    survived += r.cooperation_survived ? 1 : 0;
    if (r.min_enclosed_c_cluster && (!s.min_enclosed_c_cluster || *r.min_enclosed_c_cluster < *s.min_enclosed_c_cluster))
      s.min_enclosed_c_cluster = r.min_enclosed_c_cluster;
    s.per_run.push_back(r);
  }
  s.cooperation_survival = static_cast<double>(survived) / static_cast<double>(runs.size());
  s.mean_census.resize(longest);
  for (std::size_t g = 0; g < longest; ++g) {
    MeanCensus m;
    for (const Trajectory& t : runs) {
      const StrategyCensus& c = padded_census(t, g);
      m.C += static_cast<double>(c.n_C);
      m.D += static_cast<double>(c.n_D);
      m.A += static_cast<double>(c.n_A);
    }
    const auto k = static_cast<double>(runs.size());
    s.mean_census[g] = {m.C / k, m.D / k, m.A / k};
  }
  return s;
}

}  // namespace pdsim
