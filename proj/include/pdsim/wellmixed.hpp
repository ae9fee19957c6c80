#pragma once

// Non-spatial environment: fitness from pairwise games, then generational
// tournament selection.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "pdsim/census.hpp"
#include "pdsim/error.hpp"
#include "pdsim/game.hpp"
#include "pdsim/rng.hpp"
#include "pdsim/trajectory.hpp"

namespace pdsim {

using FitnessVector = std::vector<double>;

enum class InteractionMode { RoundRobin, Sampled };

// Every member plays every other member once; no self-play.
inline FitnessVector evaluate_roundrobin(std::span<const Strategy> pop, const PayoffTable& table) {
  if (pop.size() < 2) throw PopulationTooSmall(pop.size());
  const PayoffMatrix m = focal_matrix(table);
  const StrategyCensus c = census_of(pop);
  // Fitness depends only on the focal strategy, so compute it once per strategy.
  std::array<double, 3> by_strategy{};
  for (Strategy self : kAllStrategies) {
    if (c.count(self) == 0) continue;
    double f = 0.0;
    for (Strategy other : kAllStrategies) {
      const std::size_t n = c.count(other) - (other == self ? 1 : 0);
      f += m[index_of(self)][index_of(other)] * static_cast<double>(n);
    }
    by_strategy[index_of(self)] = f;
  }
  FitnessVector fitness(pop.size());
  std::transform(pop.begin(), pop.end(), fitness.begin(), [&](Strategy s) { return by_strategy[index_of(s)]; });
  return fitness;
}

// Sampled interactions. A random ordering of the population is drawn; in round
// r (1..games_per_agent) the member at position j initiates a game against the
// member at position j + r (mod N). Both players accrue their payoff, so each
// member initiates exactly games_per_agent games against distinct opponents
// and is drawn as an opponent exactly games_per_agent times. With
// games_per_agent == N - 1 every ordered pair meets once, which is exactly
// twice the round-robin fitness.
inline FitnessVector evaluate_sampled(std::span<const Strategy> pop, const PayoffTable& table,
                                      std::size_t games_per_agent, Rng& rng) {
  const std::size_t n = pop.size();
  if (n < 2) throw PopulationTooSmall(n);
  if (games_per_agent == 0 || games_per_agent > n - 1)
    throw Error("games_per_agent must lie in [1, N-1]");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  shuffle(order.begin(), order.end(), rng);

  FitnessVector fitness(n, 0.0);
  for (std::size_t r = 1; r <= games_per_agent; ++r) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t a = order[j];
      const std::size_t b = order[(j + r) % n];
      const InteractionPayoff p = payoff_pair(pop[a], pop[b], table);
      fitness[a] += p.focal;
      fitness[b] += p.opponent;
    }
  }
  return fitness;
}

// Fitness advantage of a cooperator over an abstainer in a defector-free
// round robin: (n_C - 1)(R - L).
inline double analytic_gap_CA(const StrategyCensus& c, const PayoffTable& t) {
  if (c.n_D != 0) throw WrongComposition("analytic_gap_CA requires a defector-free population");
  if (c.n_C == 0) return 0.0;
  return static_cast<double>(c.n_C - 1) * (t.R - t.L);
}

// Fitness advantage of a defector over an abstainer in a cooperator-free
// round robin: (n_D - 1)(P - L). Positive favors defectors.
inline double analytic_gap_DA(const StrategyCensus& c, const PayoffTable& t) {
  if (c.n_C != 0) throw WrongComposition("analytic_gap_DA requires a cooperator-free population");
  if (c.n_D == 0) return 0.0;
  return static_cast<double>(c.n_D - 1) * (t.P - t.L);
}

struct TournamentOptions {
  std::size_t size = 2;
  bool with_replacement = false;
};

// N independent tournaments; each copies the strategy of its fittest entrant,
// ties broken uniformly.
inline Population tournament_step(std::span<const Strategy> pop, std::span<const double> fitness, Rng& rng,
                                  const TournamentOptions& opts = {}) {
  const std::size_t n = pop.size();
  if (fitness.size() != n) throw Error("fitness vector not aligned with population");
  if (opts.size == 0 || (!opts.with_replacement && opts.size > n)) throw Error("invalid tournament size");

  Population next(n);
  std::vector<std::size_t> entrants(opts.size);
  std::vector<std::size_t> best;
  best.reserve(opts.size);
  for (std::size_t slot = 0; slot < n; ++slot) {
    for (std::size_t k = 0; k < opts.size; ++k) {
      std::size_t pick;
      do {
        pick = uniform_below(rng, n);
      } while (!opts.with_replacement &&
               std::find(entrants.begin(), entrants.begin() + static_cast<std::ptrdiff_t>(k), pick) !=
                   entrants.begin() + static_cast<std::ptrdiff_t>(k));
      entrants[k] = pick;
    }
    best.clear();
    double top = fitness[entrants[0]];
    for (std::size_t e : entrants) {
      if (fitness[e] > top) {
        top = fitness[e];
        best.clear();
      }
      if (fitness[e] == top) best.push_back(e);
    }
    const std::size_t winner = best.size() == 1 ? best.front() : best[uniform_below(rng, best.size())];
    next[slot] = pop[winner];
  }
  return next;
}

struct WellMixedOptions {
  std::size_t max_generations = 1000;
  InteractionMode mode = InteractionMode::RoundRobin;
  std::size_t games_per_agent = 10;
  TournamentOptions tournament{};
};

// Evolve until the population is homogeneous or max_generations steps ran.
inline Trajectory run_wellmixed(Population pop, const PayoffTable& table, const WellMixedOptions& opts, Rng& rng) {
  validate_table(table);
  if (pop.size() < 2) throw PopulationTooSmall(pop.size());
  Trajectory traj;
  traj.record(pop);
  for (std::size_t gen = 0;; ++gen) {
    if (traj.census.back().homogeneous()) {
      traj.stop = StopReason::Homogeneous;
      break;
    }
    if (gen == opts.max_generations) {
      traj.stop = StopReason::GenerationCap;
      break;
    }
    const FitnessVector fitness = opts.mode == InteractionMode::RoundRobin
                                      ? evaluate_roundrobin(pop, table)
                                      : evaluate_sampled(pop, table, opts.games_per_agent, rng);
    pop = tournament_step(pop, fitness, rng, opts.tournament);
    traj.record(pop);
  }
  traj.terminal = std::move(pop);
  return traj;
}

}  // namespace pdsim
