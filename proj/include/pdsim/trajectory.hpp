#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <variant>
#include <vector>

#include "pdsim/census.hpp"
#include "pdsim/grid.hpp"

namespace pdsim {

using Population = std::vector<Strategy>;

enum class StopReason { Homogeneous, FixedPoint, Cycle, GenerationCap };

// Record of one simulated run. census[g] and hashes[g] describe generation g.
struct Trajectory {
  std::vector<StrategyCensus> census;
  std::vector<std::uint64_t> hashes;
  std::map<std::size_t, Grid> snapshots;
  std::variant<Population, Grid> terminal;
  StopReason stop = StopReason::GenerationCap;
  std::size_t period = 0;  // set when stop == Cycle

  std::size_t generations() const noexcept { return census.size(); }
  const StrategyCensus& initial_census() const { return census.front(); }
  const StrategyCensus& terminal_census() const { return census.back(); }
  bool is_lattice() const noexcept { return std::holds_alternative<Grid>(terminal); }
  const Grid& terminal_grid() const { return std::get<Grid>(terminal); }

  void record(std::span<const Strategy> state) {
    census.push_back(census_of(state));
    hashes.push_back(state_hash(state));
  }
};

}  // namespace pdsim
