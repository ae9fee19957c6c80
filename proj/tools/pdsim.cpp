// Command-line front end.
//
//   pdsim run [config.yaml] [--preset NAME] [--out DIR] [--workers N]
//   pdsim inspect <snapshot.txt>
//   pdsim presets

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "pdsim/analysis.hpp"
#include "pdsim/config.hpp"
#include "pdsim/experiment.hpp"
#include "pdsim/snapshot.hpp"

namespace {

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw pdsim::IoError(path, "cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cmd_run(const std::string& config_path, const std::string& preset, const std::string& out_dir,
            std::size_t workers) {
  if (config_path.empty() && preset.empty()) throw pdsim::ValidationError("run", "give a config file or --preset");
  const std::string text = config_path.empty() ? std::string{} : read_text(config_path);
  const pdsim::ExperimentConfig cfg = preset.empty() ? pdsim::parse_config(text) : pdsim::preset_config(preset, text);
  const std::string dir = out_dir.empty() ? cfg.output_dir : out_dir;

  const auto result = pdsim::run_experiment(cfg, workers);
  pdsim::write_outputs(result, dir);

  for (const auto& cell : result.cells) {
    const auto& s = cell.summary;
    std::cout << cell.seed_label << " L=" << pdsim::format_number(cell.L) << "  runs=" << s.runs
              << "  C-survival=" << pdsim::format_number(s.cooperation_survival);
    for (auto label : pdsim::kAllOutcomes) {
      auto it = s.outcome_counts.find(label);
      if (it != s.outcome_counts.end()) std::cout << "  " << pdsim::to_string(label) << '=' << it->second;
    }
    std::cout << '\n';
  }
  std::cout << "wrote " << dir << '\n';
  return 0;
}

int cmd_inspect(const std::string& path) {
  const pdsim::Snapshot snap = pdsim::load_snapshot(path);
  const auto& g = snap.grid;
  const auto c = g.census();
  std::cout << "generation " << snap.generation << ", " << g.width() << "x" << g.height()
            << ", L=" << pdsim::format_number(snap.L) << '\n'
            << "census C=" << c.n_C << " D=" << c.n_D << " A=" << c.n_A << '\n';
  for (auto s : pdsim::kAllStrategies) {
    const auto report = pdsim::find_clusters(g, s);
    std::cout << pdsim::to_char(s) << " clusters: " << report.clusters.size();
    if (!report.clusters.empty()) {
      const auto [lo, hi] = std::minmax_element(report.clusters.begin(), report.clusters.end(),
                                                [](const auto& a, const auto& b) { return a.size < b.size; });
      std::cout << " (sizes " << lo->size << ".." << hi->size << ")";
    }
    std::cout << '\n';
    for (const auto& cl : report.clusters) {
      if (cl.size * 2 > g.size()) continue;  // skip the background
      std::cout << "  size " << cl.size << " at (" << cl.box.x << "," << cl.box.y << ") " << cl.box.width << "x"
                << cl.box.height;
      if (s == pdsim::Strategy::Cooperate && pdsim::surrounded_by(g, cl, pdsim::Strategy::Defect))
        std::cout << " enclosed by D";
      std::cout << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extended Prisoner's Dilemma simulator with an abstain option"};
  app.require_subcommand(1);

  std::string config_path, preset, out_dir;
  std::size_t workers = std::max(1u, std::thread::hardware_concurrency());
  auto* run = app.add_subcommand("run", "run an experiment and write census/summary/snapshot files");
  run->add_option("config", config_path, "YAML configuration (overlays the preset when both are given)");
  run->add_option("--preset", preset, "named experiment: fig1a fig1b fig1c fig1d fig2 lattice-thirds gliders table2");
  run->add_option("--out", out_dir, "output directory (default: output.dir from the config)");
  run->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);

  std::string snapshot_path;
  auto* inspect = app.add_subcommand("inspect", "print census and cluster report of a snapshot");
  inspect->add_option("snapshot", snapshot_path)->required();

  auto* list = app.add_subcommand("presets", "list built-in presets");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(config_path, preset, out_dir, workers);
    if (*inspect) return cmd_inspect(snapshot_path);
    if (*list) {
      for (const auto& [name, text] : pdsim::presets()) std::cout << name << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "pdsim: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
