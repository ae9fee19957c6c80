#pragma once

// Experiment configuration: a YAML document with nested sections, validated
// strictly (unknown keys are errors) and completed with defaults.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "pdsim/analysis.hpp"
#include "pdsim/error.hpp"
#include "pdsim/game.hpp"
#include "pdsim/lattice.hpp"
#include "pdsim/seeding.hpp"
#include "pdsim/wellmixed.hpp"

namespace pdsim {

enum class Environment { WellMixed, Lattice };

inline const char* to_string(Environment e) { return e == Environment::WellMixed ? "wellmixed" : "lattice"; }

struct ExperimentConfig {
  Environment environment = Environment::Lattice;
  std::vector<SeedSpec> seeds;
  PayoffTable payoffs{};  // L is taken from L_values
  std::vector<double> L_values;
  std::size_t runs = 100;
  std::size_t max_generations = 1000;
  std::uint64_t master_seed = 0;

  std::size_t population = 100;
  std::size_t grid_width = 100;
  std::size_t grid_height = 100;

  InteractionMode interaction = InteractionMode::RoundRobin;
  std::size_t games_per_agent = 10;
  TournamentOptions tournament{};

  LatticeRules lattice_rules{};
  std::size_t max_period = 20;
  SnapshotPolicy snapshots = SnapshotPolicy::periodic(10);

  OutcomeThresholds thresholds{};
  bool detect_gliders = false;
  std::size_t glider_max_period = 8;

  std::string output_dir = "out";

  std::size_t cell_count() const { return seeds.size() * L_values.size(); }

  WellMixedOptions wellmixed_options() const {
    return {max_generations, interaction, games_per_agent, tournament};
  }
  LatticeOptions lattice_options() const { return {max_generations, lattice_rules, max_period, snapshots}; }
};

namespace detail {

inline std::string where(const YAML::Node& n) {
  const YAML::Mark m = n.Mark();
  if (m.line < 0) return "<document>";
  return "line " + std::to_string(m.line + 1) + ", column " + std::to_string(m.column + 1);
}

inline void reject_unknown(const YAML::Node& map, const std::string& section, std::set<std::string> allowed) {
  if (!map.IsMap()) throw ValidationError(section, "expected a mapping at " + where(map));
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key))
      throw ValidationError(section.empty() ? key : section + "." + key, "unknown key at " + where(kv.first));
  }
}

template <class T>
T read(const YAML::Node& n, const std::string& field) {
  try {
    return n.as<T>();
  } catch (const YAML::Exception&) {
    throw ValidationError(field, "wrong type at " + where(n));
  }
}

template <class T>
void read_if(const YAML::Node& parent, const char* key, const std::string& field, T& out) {
  if (const YAML::Node n = parent[key]) out = read<T>(n, field);
}

inline std::size_t read_count(const YAML::Node& n, const std::string& field) {
  const auto v = read<long long>(n, field);
  if (v < 0) throw ValidationError(field, "must be non-negative");
  return static_cast<std::size_t>(v);
}

inline void read_count_if(const YAML::Node& parent, const char* key, const std::string& field, std::size_t& out) {
  if (const YAML::Node n = parent[key]) out = read_count(n, field);
}

inline std::vector<Strategy> parse_strategy_letters(const std::string& letters, const std::string& field) {
  std::vector<Strategy> out;
  for (char c : letters) {
    auto s = strategy_from_char(c);
    if (!s) throw ValidationError(field, std::string("unknown strategy letter '") + c + "'");
    if (std::find(out.begin(), out.end(), *s) != out.end()) throw ValidationError(field, "repeated strategy");
    out.push_back(*s);
  }
  if (out.empty()) throw ValidationError(field, "strategy set is empty");
  return out;
}

inline std::vector<std::variant<UniformRandom, ExactCounts, NestedRings>> parse_seed(const YAML::Node& n,
                                                                                     const std::string& field) {
  reject_unknown(n, field, {"kind", "strategies", "counts", "layout", "inner_side", "middle_layers"});
  if (!n["kind"]) throw ValidationError(field + ".kind", "missing");
  const auto kind = read<std::string>(n["kind"], field + ".kind");
  if (kind == "uniform") {
    UniformRandom u;
    if (n["strategies"]) u.strategies = parse_strategy_letters(read<std::string>(n["strategies"], field), field + ".strategies");
    return {u};
  }
  if (kind == "counts") {
    if (!n["counts"]) throw ValidationError(field + ".counts", "missing");
    const YAML::Node c = n["counts"];
    reject_unknown(c, field + ".counts", {"C", "D", "A"});
    ExactCounts e;
    read_count_if(c, "C", field + ".counts.C", e.counts.n_C);
    read_count_if(c, "D", field + ".counts.D", e.counts.n_D);
    read_count_if(c, "A", field + ".counts.A", e.counts.n_A);
    return {e};
  }
  if (kind == "rings") {
    std::size_t inner_side = 3, layers = 3;
    read_count_if(n, "inner_side", field + ".inner_side", inner_side);
    read_count_if(n, "middle_layers", field + ".middle_layers", layers);
    if (inner_side == 0) throw ValidationError(field + ".inner_side", "must be at least 1");
    const auto layout = n["layout"] ? read<std::string>(n["layout"], field + ".layout") : std::string("all");
    std::vector<std::variant<UniformRandom, ExactCounts, NestedRings>> out;
    if (layout == "all") {
      for (const NestedRings& r : all_ring_permutations(inner_side, layers)) out.emplace_back(r);
      return out;
    }
    const auto letters = parse_strategy_letters(layout, field + ".layout");
    if (letters.size() != 3) throw ValidationError(field + ".layout", "needs three distinct letters");
    out.emplace_back(NestedRings::from_label(layout, inner_side, layers));
    return out;
  }
  throw ValidationError(field + ".kind", "expected uniform, counts or rings");
}

}  // namespace detail

// Parse and validate a configuration document.
inline ExperimentConfig parse_config(const YAML::Node& root) {
  using namespace detail;
  if (!root.IsMap()) throw ParseError("<document>", "configuration must be a mapping");
  reject_unknown(root, "", {"environment", "seed", "population", "grid", "payoffs", "L_values", "runs",
                            "max_generations", "master_seed", "wellmixed", "lattice", "snapshots", "analysis",
                            "output"});
  ExperimentConfig cfg;

  if (!root["environment"]) throw ValidationError("environment", "missing");
  const auto env = read<std::string>(root["environment"], "environment");
  if (env == "wellmixed") cfg.environment = Environment::WellMixed;
  else if (env == "lattice") cfg.environment = Environment::Lattice;
  else throw ValidationError("environment", "expected wellmixed or lattice");
  cfg.snapshots = cfg.environment == Environment::Lattice ? SnapshotPolicy::periodic(10) : SnapshotPolicy::none();

  read_count_if(root, "population", "population", cfg.population);
  if (const YAML::Node g = root["grid"]) {
    reject_unknown(g, "grid", {"width", "height"});
    read_count_if(g, "width", "grid.width", cfg.grid_width);
    read_count_if(g, "height", "grid.height", cfg.grid_height);
  }
  if (cfg.environment == Environment::WellMixed && cfg.population < 2)
    throw ValidationError("population", "needs at least 2 members");
  if (cfg.environment == Environment::Lattice && (cfg.grid_width < 3 || cfg.grid_height < 3))
    throw ValidationError("grid", "must be at least 3x3");

  if (const YAML::Node p = root["payoffs"]) {
    reject_unknown(p, "payoffs", {"T", "R", "P", "S"});
    read_if(p, "T", "payoffs.T", cfg.payoffs.T);
    read_if(p, "R", "payoffs.R", cfg.payoffs.R);
    read_if(p, "P", "payoffs.P", cfg.payoffs.P);
    read_if(p, "S", "payoffs.S", cfg.payoffs.S);
  }
  {
    const PayoffTable& t = cfg.payoffs;
    if (!(t.S < t.P && t.P < t.R && t.R < t.T)) throw ValidationError("payoffs", "ordering S<P<R<T violated");
  }

  if (!root["L_values"]) throw ValidationError("L_values", "missing");
  {
    const YAML::Node ls = root["L_values"];
    if (!ls.IsSequence() || ls.size() == 0) throw ValidationError("L_values", "expected a non-empty list");
    for (const auto& item : ls) {
      const auto L = read<double>(item, "L_values");
      if (auto v = ordering_violation(cfg.payoffs.with_loner(L)))
        throw ValidationError("L", "ordering " + *v + " violated by L=" + std::to_string(L));
      cfg.L_values.push_back(L);
    }
  }

  read_count_if(root, "runs", "runs", cfg.runs);
  if (cfg.runs < 1) throw ValidationError("runs", "must be at least 1");
  read_count_if(root, "max_generations", "max_generations", cfg.max_generations);
  if (cfg.max_generations < 1) throw ValidationError("max_generations", "must be at least 1");
  read_if(root, "master_seed", "master_seed", cfg.master_seed);

  if (const YAML::Node w = root["wellmixed"]) {
    reject_unknown(w, "wellmixed", {"interaction", "games_per_agent", "tournament_size", "with_replacement"});
    if (w["interaction"]) {
      const auto mode = read<std::string>(w["interaction"], "wellmixed.interaction");
      if (mode == "roundrobin") cfg.interaction = InteractionMode::RoundRobin;
      else if (mode == "sampled") cfg.interaction = InteractionMode::Sampled;
      else throw ValidationError("wellmixed.interaction", "expected roundrobin or sampled");
    }
    read_count_if(w, "games_per_agent", "wellmixed.games_per_agent", cfg.games_per_agent);
    read_count_if(w, "tournament_size", "wellmixed.tournament_size", cfg.tournament.size);
    read_if(w, "with_replacement", "wellmixed.with_replacement", cfg.tournament.with_replacement);
  }
  if (cfg.environment == Environment::WellMixed) {
    if (cfg.interaction == InteractionMode::Sampled && (cfg.games_per_agent < 1 || cfg.games_per_agent >= cfg.population))
      throw ValidationError("wellmixed.games_per_agent", "must lie in [1, population - 1]");
    if (cfg.tournament.size < 1 || (!cfg.tournament.with_replacement && cfg.tournament.size > cfg.population))
      throw ValidationError("wellmixed.tournament_size", "must lie in [1, population]");
  }

  if (const YAML::Node l = root["lattice"]) {
    reject_unknown(l, "lattice", {"include_self", "tie_rule", "max_period"});
    read_if(l, "include_self", "lattice.include_self", cfg.lattice_rules.include_self);
    if (l["tie_rule"]) {
      const auto rule = read<std::string>(l["tie_rule"], "lattice.tie_rule");
      if (rule == "keep-self") cfg.lattice_rules.tie_rule = TieRule::KeepSelf;
      else if (rule == "scan-order") cfg.lattice_rules.tie_rule = TieRule::ScanOrder;
      else throw ValidationError("lattice.tie_rule", "expected keep-self or scan-order");
    }
    read_count_if(l, "max_period", "lattice.max_period", cfg.max_period);
    if (cfg.max_period < 2) throw ValidationError("lattice.max_period", "must be at least 2");
  }

  if (const YAML::Node s = root["snapshots"]) {
    reject_unknown(s, "snapshots", {"policy", "every"});
    if (s["policy"]) {
      const auto policy = read<std::string>(s["policy"], "snapshots.policy");
      if (policy == "none") cfg.snapshots = SnapshotPolicy::none();
      else if (policy == "dense") cfg.snapshots = SnapshotPolicy::dense();
      else if (policy == "periodic") cfg.snapshots = SnapshotPolicy::periodic(10);
      else throw ValidationError("snapshots.policy", "expected none, periodic or dense");
    }
    if (s["every"]) {
      cfg.snapshots.every = read_count(s["every"], "snapshots.every");
      if (cfg.snapshots.kind == SnapshotPolicy::Kind::Periodic && cfg.snapshots.every == 0)
        throw ValidationError("snapshots.every", "must be positive");
    }
  }

  if (const YAML::Node a = root["analysis"]) {
    reject_unknown(a, "analysis", {"dominance", "defector_share_of_rest", "spread_margin", "detect_gliders",
                                   "glider_max_period"});
    read_if(a, "dominance", "analysis.dominance", cfg.thresholds.dominance);
    read_if(a, "defector_share_of_rest", "analysis.defector_share_of_rest", cfg.thresholds.defector_share_of_rest);
    read_if(a, "spread_margin", "analysis.spread_margin", cfg.thresholds.spread_margin);
    read_if(a, "detect_gliders", "analysis.detect_gliders", cfg.detect_gliders);
    read_count_if(a, "glider_max_period", "analysis.glider_max_period", cfg.glider_max_period);
  }

  if (const YAML::Node o = root["output"]) {
    reject_unknown(o, "output", {"dir"});
    read_if(o, "dir", "output.dir", cfg.output_dir);
  }

  if (!root["seed"]) throw ValidationError("seed", "missing");
  {
    const YAML::Node s = root["seed"];
    std::vector<YAML::Node> items;
    if (s.IsSequence()) {
      for (const auto& item : s) items.push_back(item);
    } else {
      items.push_back(s);
    }
    if (items.empty()) throw ValidationError("seed", "no seed specified");
    for (std::size_t i = 0; i < items.size(); ++i) {
      const std::string field = s.IsSequence() ? "seed[" + std::to_string(i) + "]" : "seed";
      for (auto& variant : parse_seed(items[i], field)) {
        SeedSpec spec;
        spec.variant = std::move(variant);
        if (cfg.environment == Environment::WellMixed) spec.target = WellMixedTarget{cfg.population};
        else spec.target = LatticeTarget{cfg.grid_width, cfg.grid_height};
        if (const auto* e = std::get_if<ExactCounts>(&spec.variant); e && e->counts.total() != spec.sites())
          throw ValidationError(field + ".counts", "counts sum to " + std::to_string(e->counts.total()) +
                                                       ", expected " + std::to_string(spec.sites()));
        if (const auto* r = std::get_if<NestedRings>(&spec.variant)) {
          if (cfg.environment != Environment::Lattice) throw ValidationError(field, "rings need a lattice");
          if (r->inner_side + 2 * r->middle_layers >= std::min(cfg.grid_width, cfg.grid_height))
            throw ValidationError(field, "ring block does not fit the grid");
        }
        cfg.seeds.push_back(std::move(spec));
      }
    }
  }
  return cfg;
}

namespace detail {

// Recursively overlay `top` onto `base`; maps merge, everything else replaces.
inline YAML::Node overlay(const YAML::Node& base, const YAML::Node& top) {
  if (!base.IsMap() || !top.IsMap()) return YAML::Clone(top);
  YAML::Node out = YAML::Clone(base);
  for (const auto& kv : top) {
    const auto key = kv.first.as<std::string>();
    out[key] = out[key] ? overlay(out[key], kv.second) : YAML::Clone(kv.second);
  }
  return out;
}

inline YAML::Node load_yaml(const std::string& text) {
  try {
    YAML::Node n = YAML::Load(text);
    if (n.IsNull()) return YAML::Node(YAML::NodeType::Map);
    return n;
  } catch (const YAML::ParserException& e) {
    throw ParseError("line " + std::to_string(e.mark.line + 1) + ", column " + std::to_string(e.mark.column + 1),
                     e.msg);
  }
}

}  // namespace detail

inline ExperimentConfig parse_config(const std::string& text) { return parse_config(detail::load_yaml(text)); }

// Named configurations reproducing each published experiment.
inline const std::map<std::string, std::string>& presets() {
  static const std::map<std::string, std::string> table{
      {"fig1a", R"(environment: wellmixed
seed: {kind: counts, counts: {C: 0, D: 50, A: 50}}
L_values: [0.9, 1.0, 1.1]
master_seed: 101
)"},
      {"fig1b", R"(environment: wellmixed
seed: {kind: counts, counts: {C: 34, D: 33, A: 33}}
L_values: [0.5, 1.0, 1.5, 2.0, 2.5]
master_seed: 102
)"},
      {"fig1c", R"(environment: wellmixed
seed: {kind: counts, counts: {C: 1, D: 0, A: 99}}
L_values: [0.5, 1.0, 1.5, 2.0, 2.5]
master_seed: 103
)"},
      {"fig1d", R"(environment: wellmixed
seed: {kind: counts, counts: {C: 1, D: 1, A: 98}}
L_values: [0.5, 1.0, 1.5, 2.0, 2.5]
master_seed: 104
)"},
      {"fig2", R"(environment: lattice
seed: {kind: uniform, strategies: DA}
L_values: [0.9, 1.0, 1.1]
master_seed: 105
)"},
      {"lattice-thirds", R"(environment: lattice
seed: {kind: uniform, strategies: CDA}
L_values: [0.5, 1.0, 1.1, 1.5, 1.8, 2.0]
master_seed: 106
)"},
      {"gliders", R"(environment: lattice
seed: {kind: uniform, strategies: CDA}
L_values: [1.7, 1.8, 1.9]
master_seed: 107
snapshots: {policy: none}
analysis: {detect_gliders: true}
)"},
      {"table2", R"(environment: lattice
seed: {kind: rings, layout: all}
L_values: [0.5, 1.5]
runs: 1
master_seed: 108
)"},
  };
  return table;
}

// Preset text, optionally overlaid with a user document.
inline ExperimentConfig preset_config(const std::string& name, const std::string& overrides = {}) {
  const auto& table = presets();
  const auto it = table.find(name);
  if (it == table.end()) throw ValidationError("preset", "unknown preset '" + name + "'");
  YAML::Node base = detail::load_yaml(it->second);
  if (!overrides.empty()) base = detail::overlay(base, detail::load_yaml(overrides));
  return parse_config(base);
}

}  // namespace pdsim
