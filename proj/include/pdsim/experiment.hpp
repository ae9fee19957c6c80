#pragma once

// Batch orchestration and output files.
//
// Run (seed s, L index l, run r) draws from child_stream(master_seed, {s, l, r}),
// so every run is reproducible on its own and results do not depend on the
// number of workers or their scheduling.
//
// Files written to the output directory:
//   census.csv            L,run,generation,n_C,n_D,n_A   (census_<seed>.csv when
//                         the config lists several seeds)
//   mean_census.csv       seed,L,generation,mean_C,mean_D,mean_A
//   summary.json          per-cell outcome frequencies, survival, equilibria
//   snapshots/            <seed>_L<L>_run<r>_gen<g>.txt, lattice runs only

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "pdsim/analysis.hpp"
#include "pdsim/config.hpp"
#include "pdsim/lattice.hpp"
#include "pdsim/rng.hpp"
#include "pdsim/seeding.hpp"
#include "pdsim/snapshot.hpp"
#include "pdsim/wellmixed.hpp"

namespace pdsim {

struct RunRecord {
  std::size_t run = 0;
  Trajectory trajectory;                // snapshots already filtered to the config policy
  std::optional<GliderReport> glider;   // only when glider detection is enabled
};

struct CellResult {
  std::size_t seed_index = 0;
  std::size_t L_index = 0;
  std::string seed_label;
  double L = 0.0;
  std::vector<RunRecord> runs;
  BatchSummary summary;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<CellResult> cells;  // seed-major, then L
};

// Bounded worker pool over [0, n). The exception of the lowest failing index
// is rethrown after all workers finish.
template <class Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

inline RunRecord simulate_run(const ExperimentConfig& cfg, std::size_t seed_index, std::size_t L_index,
                              std::size_t run) {
  Rng rng = child_stream(cfg.master_seed, {seed_index, L_index, run});
  const PayoffTable table = cfg.payoffs.with_loner(cfg.L_values.at(L_index));
  SeededState initial = seed(cfg.seeds.at(seed_index), rng);

  RunRecord rec;
  rec.run = run;
  if (cfg.environment == Environment::WellMixed) {
    rec.trajectory = run_wellmixed(std::get<Population>(std::move(initial)), table, cfg.wellmixed_options(), rng);
    return rec;
  }
  LatticeOptions opts = cfg.lattice_options();
  if (cfg.detect_gliders) opts.snapshots = SnapshotPolicy::dense();
  rec.trajectory = run_lattice(std::get<Grid>(std::move(initial)), table, opts);
  if (cfg.detect_gliders) {
    rec.glider = detect_glider(rec.trajectory, cfg.glider_max_period);
    auto& snaps = rec.trajectory.snapshots;
    const std::size_t last = rec.trajectory.generations() - 1;
    for (auto it = snaps.begin(); it != snaps.end();) {
      const bool keep = cfg.snapshots.kind != SnapshotPolicy::Kind::None &&
                        (cfg.snapshots.wants(it->first) || it->first == last);
      it = keep ? std::next(it) : snaps.erase(it);
    }
  }
  return rec;
}

inline ExperimentResult run_experiment(const ExperimentConfig& cfg, std::size_t workers = 1) {
  ExperimentResult result;
  result.config = cfg;
  const std::size_t n_L = cfg.L_values.size();
  const std::size_t jobs = cfg.cell_count() * cfg.runs;

  std::vector<RunRecord> records(jobs);
  parallel_for(jobs, workers, [&](std::size_t job) {
    const std::size_t run = job % cfg.runs;
    const std::size_t cell = job / cfg.runs;
    records[job] = simulate_run(cfg, cell / n_L, cell % n_L, run);
  });

  result.cells.resize(cfg.cell_count());
  parallel_for(cfg.cell_count(), workers, [&](std::size_t cell) {
    CellResult& c = result.cells[cell];
    c.seed_index = cell / n_L;
    c.L_index = cell % n_L;
    c.seed_label = seed_label(cfg.seeds[c.seed_index]);
    c.L = cfg.L_values[c.L_index];
    c.runs.assign(std::make_move_iterator(records.begin() + static_cast<std::ptrdiff_t>(cell * cfg.runs)),
                  std::make_move_iterator(records.begin() + static_cast<std::ptrdiff_t>((cell + 1) * cfg.runs)));
    std::vector<Trajectory> trajs;
    trajs.reserve(c.runs.size());
    for (const RunRecord& r : c.runs) trajs.push_back(r.trajectory);
    c.summary = aggregate_runs(trajs, cfg.max_period, cfg.thresholds);
  });
  return result;
}

// ---------------------------------------------------------------------------
// Serialization

inline nlohmann::ordered_json summary_json(const ExperimentResult& result) {
  using nlohmann::ordered_json;
  const ExperimentConfig& cfg = result.config;
  ordered_json root;
  root["environment"] = to_string(cfg.environment);
  root["master_seed"] = cfg.master_seed;
  root["runs"] = cfg.runs;
  root["max_generations"] = cfg.max_generations;
  root["payoffs"] = {{"T", cfg.payoffs.T}, {"R", cfg.payoffs.R}, {"P", cfg.payoffs.P}, {"S", cfg.payoffs.S}};

  ordered_json cells = ordered_json::array();
  for (const CellResult& c : result.cells) {
    const BatchSummary& s = c.summary;
    ordered_json cell;
    cell["seed"] = c.seed_label;
    cell["L"] = c.L;
    cell["runs"] = s.runs;

    ordered_json outcomes;
    for (OutcomeLabel l : kAllOutcomes) {
      auto it = s.outcome_counts.find(l);
      outcomes[to_string(l)] = it == s.outcome_counts.end() ? 0 : it->second;
    }
    cell["outcomes"] = outcomes;

    std::size_t plural[4] = {0, 0, 0, 0};
    for (const RunRecord& r : c.runs) {
      const auto p = r.trajectory.terminal_census().strict_plurality();
      ++plural[p ? index_of(*p) : 3];
    }
    cell["plurality"] = {{"C", plural[0]}, {"D", plural[1]}, {"A", plural[2]}, {"none", plural[3]}};
    cell["cooperation_survival"] = s.cooperation_survival;

    ordered_json cycles = ordered_json::object();
    for (const auto& [period, count] : s.cycles_by_period) cycles[std::to_string(period)] = count;
    cell["equilibria"] = {{"fixed_point", s.fixed_points}, {"cycles", cycles}, {"not_converged", s.not_converged}};
    cell["min_enclosed_c_cluster"] =
        s.min_enclosed_c_cluster ? ordered_json(*s.min_enclosed_c_cluster) : ordered_json(nullptr);
    if (cfg.detect_gliders) {
      cell["gliders"] = std::count_if(c.runs.begin(), c.runs.end(), [](const RunRecord& r) { return r.glider.has_value(); });
    }

    ordered_json runs = ordered_json::array();
    for (std::size_t i = 0; i < c.runs.size(); ++i) {
      const RunRecord& r = c.runs[i];
      const RunAnalysis& a = s.per_run[i];
      const StrategyCensus& end = r.trajectory.terminal_census();
      ordered_json run;
      run["run"] = r.run;
      run["generations"] = r.trajectory.generations();
      run["outcome"] = to_string(a.outcome);
      run["equilibrium"] = {{"kind", to_string(a.equilibrium.kind)},
                            {"period", a.equilibrium.period},
                            {"onset", a.equilibrium.onset}};
      run["terminal"] = {{"C", end.n_C}, {"D", end.n_D}, {"A", end.n_A}};
      if (cfg.detect_gliders) {
        run["glider"] = r.glider ? ordered_json{{"period", r.glider->period},
                                                {"dx", r.glider->displacement.dx},
                                                {"dy", r.glider->displacement.dy},
                                                {"onset", r.glider->onset},
                                                {"whole_grid", r.glider->whole_grid}}
                                 : ordered_json(nullptr);
      }
      runs.push_back(std::move(run));
    }
    cell["per_run"] = std::move(runs);
    cells.push_back(std::move(cell));
  }
  root["cells"] = std::move(cells);
  return root;
}

inline std::string census_csv(const ExperimentResult& result, std::size_t seed_index) {
  std::ostringstream os;
  os << "L,run,generation,n_C,n_D,n_A\n";
  for (const CellResult& c : result.cells) {
    if (c.seed_index != seed_index) continue;
    const std::string L = format_number(c.L);
    for (const RunRecord& r : c.runs)
      for (std::size_t g = 0; g < r.trajectory.census.size(); ++g) {
        const StrategyCensus& k = r.trajectory.census[g];
        os << L << ',' << r.run << ',' << g << ',' << k.n_C << ',' << k.n_D << ',' << k.n_A << '\n';
      }
  }
  return os.str();
}

inline std::string mean_census_csv(const ExperimentResult& result) {
  std::ostringstream os;
  os << "seed,L,generation,mean_C,mean_D,mean_A\n";
  for (const CellResult& c : result.cells) {
    const std::string L = format_number(c.L);
    for (std::size_t g = 0; g < c.summary.mean_census.size(); ++g) {
      const MeanCensus& m = c.summary.mean_census[g];
      os << c.seed_label << ',' << L << ',' << g << ',' << format_number(m.C) << ',' << format_number(m.D) << ','
         << format_number(m.A) << '\n';
    }
  }
  return os.str();
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out << content;
  if (!out.flush()) throw IoError(path.string(), "write failed");
}

}  // namespace detail

// Files go to a staging directory first and are moved into `dir` only when
// everything was written; on failure the staging directory is removed.
inline void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  const fs::path staging = dir / ".staging";
  std::error_code ec;
  try {
    fs::create_directories(dir);
    fs::remove_all(staging);
    fs::create_directories(staging);
  } catch (const fs::filesystem_error& e) {
    throw IoError(dir.string(), e.what());
  }

  std::vector<fs::path> produced;
  try {
    const std::size_t n_seeds = result.config.seeds.size();
    for (std::size_t s = 0; s < n_seeds; ++s) {
      const std::string name =
          n_seeds == 1 ? "census.csv" : "census_" + seed_label(result.config.seeds[s]) + ".csv";
      detail::write_file(staging / name, census_csv(result, s));
      produced.push_back(name);
    }
    detail::write_file(staging / "mean_census.csv", mean_census_csv(result));
    produced.push_back("mean_census.csv");
    detail::write_file(staging / "summary.json", summary_json(result).dump(2) + "\n");
    produced.push_back("summary.json");

    bool any_snapshots = false;
    for (const CellResult& c : result.cells)
      for (const RunRecord& r : c.runs)
        for (const auto& [gen, grid] : r.trajectory.snapshots) {
          if (!any_snapshots) {
            fs::create_directories(staging / "snapshots");
            any_snapshots = true;
          }
          const std::string name = c.seed_label + "_L" + format_number(c.L) + "_run" + std::to_string(r.run) +
                                   "_gen" + std::to_string(gen) + ".txt";
          detail::write_file(staging / "snapshots" / name, snapshot_text(Snapshot{gen, c.L, grid}));
        }

    fs::remove_all(dir / "snapshots");
    if (any_snapshots) {
      fs::rename(staging / "snapshots", dir / "snapshots");
    }
    for (const fs::path& p : produced) fs::rename(staging / p, dir / p);
    fs::remove_all(staging);
  } catch (const fs::filesystem_error& e) {
    fs::remove_all(staging, ec);
    throw IoError(e.path1().string(), e.what());
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
}

}  // namespace pdsim
