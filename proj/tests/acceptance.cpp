// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>

#include "oracles.hpp"
#include "pdsim/experiment.hpp"

using namespace pdsim;
namespace fs = std::filesystem;

namespace {

constexpr Strategy C = Strategy::Cooperate, D = Strategy::Defect, A = Strategy::Abstain;

struct Verdict {
  bool pass = true;
  std::string detail;
};

std::size_t workers() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Fraction of runs in a cell whose terminal population is all `s`.
std::size_t homogeneous_count(const CellResult& c, Strategy s) {
  return static_cast<std::size_t>(std::count_if(c.runs.begin(), c.runs.end(), [&](const RunRecord& r) {
    const StrategyCensus k = r.trajectory.terminal_census();
    return k.homogeneous() && k.count(s) > 0;
  }));
}

std::size_t plurality_count(const CellResult& c, Strategy s) {
  return static_cast<std::size_t>(std::count_if(c.runs.begin(), c.runs.end(), [&](const RunRecord& r) {
    return r.trajectory.terminal_census().strict_plurality() == s;
  }));
}

std::size_t survival_count(const CellResult& c) {
  return static_cast<std::size_t>(
      std::count_if(c.runs.begin(), c.runs.end(), [](const RunRecord& r) { return r.trajectory.terminal_census().n_C > 0; }));
}

Verdict payoff_matrix() {
  const PayoffTable t = PayoffTable::standard(1.5);
  const std::map<std::pair<Strategy, Strategy>, InteractionPayoff> table1{
      {{C, C}, {3, 3}},     {{C, D}, {0, 5}},     {{C, A}, {1.5, 1.5}}, {{D, C}, {5, 0}},     {{D, D}, {1, 1}},
      {{D, A}, {1.5, 1.5}}, {{A, C}, {1.5, 1.5}}, {{A, D}, {1.5, 1.5}}, {{A, A}, {1.5, 1.5}}};
  Verdict v{true, "9/9 pairs exact"};
  for (const auto& [pair, want] : table1) {
    const InteractionPayoff got = payoff_pair(pair.first, pair.second, t);
    if (got.focal != want.focal || got.opponent != want.opponent) {
      v = {false, fmt("mismatch at %c%c", to_char(pair.first), to_char(pair.second))};
      break;
    }
  }
  return v;
}

Verdict analytic_gaps() {
  Rng rng(20240501);
  double worst = 0.0;
  std::size_t checks = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const bool cooperators = trial < 200;
    const Strategy other = cooperators ? C : D;
    const std::size_t n = 2 + uniform_below(rng, 199);
    const std::size_t k = 1 + uniform_below(rng, n - 1);  // both strategies present
    Population pop(n, A);
    std::fill(pop.begin(), pop.begin() + static_cast<std::ptrdiff_t>(k), other);
    shuffle(pop.begin(), pop.end(), rng);
    const double L = 0.01 + 2.98 * std::ldexp(static_cast<double>(rng() >> 11), -53);
    const PayoffTable t = PayoffTable::standard(L);
    const FitnessVector f = evaluate_roundrobin(pop, t);
    const double want = cooperators ? static_cast<double>(k - 1) * (t.R - L) : static_cast<double>(k - 1) * (t.P - L);
    for (std::size_t i = 0; i < n; ++i) {
      if (pop[i] != other) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (pop[j] != A) continue;
        const double gap = f[i] - f[j];
        const double rel = std::abs(gap - want) / std::max({1.0, std::abs(want), std::abs(f[i])});
        worst = std::max(worst, rel);
        ++checks;
      }
    }
  }
  return {worst <= 1e-9, fmt("200+200 populations, %zu pairs, worst relative error %.2e", checks, worst)};
}

Verdict cooperators_beat_abstainers() {
  const ExperimentConfig cfg =
      parse_config("environment: wellmixed\nseed: {kind: counts, counts: {C: 50, A: 50}}\nL_values: [0.5, 1.5, 2.9]\n"
                   "runs: 100\nmaster_seed: 3\n");
  const ExperimentResult r = run_experiment(cfg, workers());
  Verdict v;
  for (const CellResult& c : r.cells) {
    const std::size_t n = homogeneous_count(c, C);
    v.pass = v.pass && n == c.runs.size();
    v.detail += fmt("L=%s all-C %zu/%zu; ", format_number(c.L).c_str(), n, c.runs.size());
  }
  return v;
}

Verdict defector_abstainer_threshold() {
  const ExperimentResult r = run_experiment(preset_config("fig1a", "runs: 100\n"), workers());
  Verdict v;
  for (const CellResult& c : r.cells) {
    const std::size_t d = homogeneous_count(c, D), a = homogeneous_count(c, A);
    v.detail += fmt("L=%s D %zu A %zu; ", format_number(c.L).c_str(), d, a);
    if (c.L == 0.9) v.pass = v.pass && d >= 90;
    else if (c.L == 1.1) v.pass = v.pass && a >= 60;
    else v.pass = v.pass && d >= 20 && a >= 20;
  }
  return v;
}

Verdict lone_cooperator_seeds() {
  const ExperimentResult r = run_experiment(preset_config("fig1c", "runs: 100\n"), workers());
  Verdict v;
  for (const CellResult& c : r.cells) {
    const std::size_t ac = homogeneous_count(c, C), aa = homogeneous_count(c, A);
    v.pass = v.pass && ac + aa == c.runs.size() && ac > 0 && aa > 0;
    v.detail += fmt("L=%s C %zu A %zu; ", format_number(c.L).c_str(), ac, aa);
  }
  return v;
}

Verdict lattice_pairwise() {
  Verdict v;
  // (a) lone defector among cooperators.
  Grid g(100, 100, C);
  g.set(50, 50, D);
  const Trajectory t = run_lattice(g, PayoffTable::standard(1.5));
  bool increasing = true;
  for (std::size_t i = 1; i < t.generations(); ++i) increasing = increasing && t.census[i].n_D > t.census[i - 1].n_D;
  const bool settled = t.terminal_census().n_C == 0 || t.stop == StopReason::FixedPoint || t.stop == StopReason::Cycle;
  v.pass = increasing && settled;
  v.detail = fmt("(a) D strictly increasing over %zu generations, terminal C=%zu; ", t.generations(),
                 t.terminal_census().n_C);
  // (b) cooperator pair among abstainers.
  for (double L : {0.5, 1.5, 2.9}) {
    Grid p(100, 100, A);
    p.set(49, 50, C);
    p.set(50, 50, C);
    const Trajectory tp = run_lattice(p, PayoffTable::standard(L));
    const bool all_c = tp.terminal_census().n_C == p.size();
    v.pass = v.pass && all_c;
    v.detail += fmt("(b) L=%s %s; ", format_number(L).c_str(), all_c ? "all-C" : "not all-C");
  }
  return v;
}

Verdict seeded_rings(const ExperimentResult& r) {
  auto find = [&](const std::string& label, double L) -> const CellResult& {
    for (const CellResult& c : r.cells)
      if (c.seed_label == label && c.L == L) return c;
    throw std::runtime_error("missing cell " + label);
  };
  Verdict v;
  auto expect = [&](const std::string& label, double L, OutcomeLabel want, auto&& extra, const char* extra_name) {
    const CellResult& c = find(label, L);
    const OutcomeLabel got = c.summary.per_run.at(0).outcome;
    const bool ok = got == want && extra(c);
    v.pass = v.pass && ok;
    v.detail += fmt("%s@%s %s%s%s; ", label.c_str(), format_number(L).c_str(), to_string(got), ok ? "" : " FAILED ",
                    ok ? "" : extra_name);
  };
  auto none = [](const CellResult&) { return true; };
  auto all_three = [](const CellResult& c) {
    const StrategyCensus k = c.runs.at(0).trajectory.terminal_census();
    return k.n_C > 0 && k.n_D > 0 && k.n_A > 0;
  };
  auto big_c_cluster = [](const CellResult& c) {
    for (const Cluster& cl : find_clusters(c.runs.at(0).trajectory.terminal_grid(), C).clusters)
      if (cl.size >= 9) return true;
    return false;
  };
  auto c_survives = [](const CellResult& c) { return c.runs.at(0).trajectory.terminal_census().n_C > 0; };
  expect("CAD", 1.5, OutcomeLabel::CooperationSpreads, none, "");
  expect("CDA", 1.5, OutcomeLabel::StructurallyStable, all_three, "(all three present)");
  expect("ADC", 1.5, OutcomeLabel::AbstinenceSpreads, big_c_cluster, "(C cluster >= 9)");
  expect("DCA", 0.5, OutcomeLabel::DefectionSpreads, c_survives, "(C survives)");
  expect("DAC", 0.5, OutcomeLabel::DefectionSpreads, c_survives, "(C survives)");
  return v;
}

struct ThirdsResults {
  ExperimentResult result;
  const CellResult& cell(double L) const {
    for (const CellResult& c : result.cells)
      if (c.L == L) return c;
    throw std::runtime_error("missing L");
  }
};

Verdict thirds_statistics(const ThirdsResults& t) {
  const CellResult& low = t.cell(0.5);
  const std::size_t d_plural = plurality_count(low, D), low_surv = survival_count(low);
  bool pass = d_plural >= 95 && low_surv >= 40 && low_surv <= 85;
  std::size_t a_plural = 0, surv = 0, total = 0;
  for (double L : {1.1, 1.5, 2.0}) {
    const CellResult& c = t.cell(L);
    a_plural += plurality_count(c, A);
    surv += survival_count(c);
    total += c.runs.size();
  }
  const double surv_frac = static_cast<double>(surv) / static_cast<double>(total);
  pass = pass && 2 * a_plural > total && surv_frac >= 0.30 && surv_frac <= 0.75;
  return {pass, fmt("L=0.5: D plurality %zu/100, C survives %zu/100; L in {1.1,1.5,2.0}: A plurality %zu/%zu, "
                    "C survives %.1f%%",
                    d_plural, low_surv, a_plural, total, 100.0 * surv_frac)};
}

Verdict minimum_cluster(const ThirdsResults& t) {
  std::size_t runs_with_cluster = 0;
  std::optional<std::size_t> smallest;
  for (const CellResult& c : t.result.cells)
    for (const RunAnalysis& a : c.summary.per_run)
      if (a.min_enclosed_c_cluster) {
        ++runs_with_cluster;
        if (!smallest || *a.min_enclosed_c_cluster < *smallest) smallest = a.min_enclosed_c_cluster;
      }
  const bool pass = !smallest || *smallest >= 9;
  return {pass, fmt("%zu stable runs with D-enclosed C clusters, smallest %zu", runs_with_cluster, smallest.value_or(0))};
}

Verdict cycles_and_gliders(const ThirdsResults& t) {
  std::size_t two_cycles = 0;
  for (double L : {1.5, 2.0})
    for (const RunAnalysis& a : t.cell(L).summary.per_run)
      if (a.equilibrium.kind == EquilibriumKind::Cycle && a.equilibrium.period == 2) ++two_cycles;

  // Glider scan: batches of 50 seeds until one shows up or the budget runs out.
  std::size_t scanned = 0, found = 0;
  std::string where;
  for (std::size_t batch = 0; batch < 4 && found == 0; ++batch) {
    const ExperimentConfig cfg =
        preset_config("gliders", "L_values: [1.8]\nruns: 50\nmaster_seed: " + std::to_string(1800 + batch) + "\n");
    const ExperimentResult r = run_experiment(cfg, workers());
    for (const RunRecord& run : r.cells.at(0).runs)
      if (run.glider) {
        if (found++ == 0)
          where = fmt(" (first: master seed %zu run %zu, period %zu, d=(%d,%d), onset %zu)", 1800 + batch, run.run,
                      run.glider->period, run.glider->displacement.dx, run.glider->displacement.dy, run.glider->onset);
      }
    scanned += r.cells.at(0).runs.size();
  }
  return {two_cycles > 0 && found > 0 && scanned >= 50,
          fmt("%zu two-cycles at L in {1.5,2.0} over 200 seeds; %zu gliders at L=1.8 over %zu seeds", two_cycles, found,
              scanned) +
              where};
}

std::map<std::string, std::string> tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) {
      std::ifstream in(e.path(), std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      out[fs::relative(e.path(), dir).string()] = ss.str();
    }
  return out;
}

Verdict determinism() {
  const fs::path root = fs::temp_directory_path() / "pdsim_acceptance_determinism";
  Verdict v;
  for (const char* preset : {"fig1b", "table2"}) {
    const ExperimentConfig cfg = preset_config(preset);
    fs::remove_all(root);
    write_outputs(run_experiment(cfg, 1), root / "a");
    write_outputs(run_experiment(cfg, 1), root / "b");
    write_outputs(run_experiment(cfg, 8), root / "c");
    const auto a = tree(root / "a");
    const bool same = a == tree(root / "b") && a == tree(root / "c");
    v.pass = v.pass && same && !a.empty();
    v.detail += fmt("%s: %zu files %s; ", preset, a.size(), same ? "identical" : "DIFFER");
  }
  fs::remove_all(root);
  return v;
}

Verdict analysis_oracles() {
  Rng rng(1212);
  std::size_t cluster_ok = 0, glider_ok = 0;
  const std::size_t trials = 50;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    const std::size_t w = 3 + uniform_below(rng, 18), h = 3 + uniform_below(rng, 18);
    const UniformRandom u = trial % 3 == 0 ? UniformRandom{{A, C}} : UniformRandom{};
    const Grid g = to_grid(uniform_assignment(u, w * h, rng), LatticeTarget{w, h});

    bool clusters_match = true;
    for (Strategy s : kAllStrategies)
      for (bool moore : {true, false}) {
        std::set<std::set<std::size_t>> got;
        for (const Cluster& c : find_clusters(g, s, moore ? Adjacency::Moore : Adjacency::VonNeumann).clusters)
          got.insert(std::set<std::size_t>(c.cells.begin(), c.cells.end()));
        clusters_match = clusters_match && got == oracle::flood_fill(g, s, moore);
      }
    cluster_ok += clusters_match;

    const auto sx = static_cast<std::ptrdiff_t>(uniform_below(rng, w));
    const auto sy = static_cast<std::ptrdiff_t>(uniform_below(rng, h));
    Trajectory t;
    for (std::ptrdiff_t i = 0; i < 4; ++i) {
      const Grid step = g.translated(i * sx, i * sy);
      t.record(step.cells());
      t.snapshots.emplace(static_cast<std::size_t>(i), step);
    }
    t.terminal = t.snapshots.rbegin()->second;
    const auto got = detect_glider(t, 1);
    const auto want = t.snapshots.at(0) == t.snapshots.at(1) ? std::nullopt
                                                             : oracle::smallest_translation(t.snapshots.at(0), t.snapshots.at(1));
    const bool glider_match = got.has_value() == want.has_value() &&
                              (!got || (got->displacement.dx == want->dx && got->displacement.dy == want->dy));
    glider_ok += glider_match;
  }
  return {cluster_ok == trials && glider_ok == trials,
          fmt("clusters %zu/%zu grids, gliders %zu/%zu grids", cluster_ok, trials, glider_ok, trials)};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Verdict()>& fn) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !v.pass;
    std::printf("[%s] AC%d %s: %s (%.1fs)\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str(), secs);
    std::fflush(stdout);
  };

  report(1, "payoff matrix", payoff_matrix);
  report(2, "analytic fitness gaps", analytic_gaps);
  report(3, "well-mixed C vs A", cooperators_beat_abstainers);
  report(4, "well-mixed D vs A threshold", defector_abstainer_threshold);
  report(5, "lone cooperator seeds", lone_cooperator_seeds);
  report(6, "lattice pairwise", lattice_pairwise);

  ExperimentResult rings;
  report(7, "nested-ring seeds", [&] {
    rings = run_experiment(preset_config("table2"), workers());
    return seeded_rings(rings);
  });

  ThirdsResults thirds;
  bool thirds_ok = true;
  try {
    thirds.result = run_experiment(
        preset_config("lattice-thirds", "L_values: [0.5, 1.1, 1.5, 2.0]\nruns: 100\nsnapshots: {policy: none}\n"),
        workers());
  } catch (const std::exception& e) {
    thirds_ok = false;
    std::fprintf(stderr, "random-thirds batch failed: %s\n", e.what());
  }
  auto needs_thirds = [&](auto fn) {
    return [&, fn]() -> Verdict {
      if (!thirds_ok) return {false, "random-thirds batch did not run"};
      return fn(thirds);
    };
  };
  report(8, "random-thirds statistics", needs_thirds(thirds_statistics));
  report(9, "minimum enclosed cooperator cluster", needs_thirds(minimum_cluster));
  report(10, "cycles and gliders", needs_thirds(cycles_and_gliders));
  report(11, "determinism and worker independence", determinism);
  report(12, "analysis oracles", analysis_oracles);

  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
