// Copyright 2026 The uavnav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// uavnav: train, evaluate and benchmark connectivity-aware UAV navigation.
//
// Exit codes: 0 success, 1 config or input error, 2 a training run diverged,
// 3 the oracle found no feasible path (oracle subcommand).

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "uavnav/config.hpp"
#include "uavnav/experiment.hpp"

namespace {

using namespace uavnav;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitDiverged = 2;
constexpr int kExitInfeasible = 3;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> scenario;
  std::optional<std::string> encoder;
};

void add_common(CLI::App* cmd, Overrides& o, bool with_encoder = true) {
  cmd->add_option("--config", o.config, "experiment config (JSON)")->required();
  cmd->add_option("--seed", o.seed, "run a single seed instead of the configured list");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--scenario", o.scenario, "max_outage or outage_budget");
  if (with_encoder) cmd->add_option("--encoder", o.encoder, "fsr or rbf");
}

ExperimentConfig load(const Overrides& o) {
  ExperimentConfig c = load_config(o.config);
  if (o.seed) c.seeds = {*o.seed};
  if (o.out) c.output_dir = *o.out;
  if (o.scenario) {
    c.scenario.kind = parse_scenario_kind(*o.scenario);
    // A max-outage run decides once per step.
    if (c.scenario.kind == ScenarioKind::MaxOutage) c.scenario.t1 = c.scenario.dt;
  }
  if (o.encoder) c.encoder.kind = parse_encoder_kind(*o.encoder);
  validate_config(c);
  return c;
}

std::string gap_text(const std::optional<double>& g) {
  if (!g) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", *g);
  return buf;
}

int cmd_train(const Overrides& o) {
  const ExperimentConfig c = load(o);
  const ExperimentSummary s = run_experiment(c);
  bool diverged = false;
  for (const RunRecord& r : s.runs) {
    std::cout << "seed " << r.seed << ": " << r.status;
    if (r.gap_pct) std::cout << ", gap " << gap_text(r.gap_pct);
    if (!r.message.empty()) std::cout << " (" << r.message << ")";
    std::cout << "\n";
    diverged = diverged || r.status == "diverged";
  }
  std::cout << "feasibility " << s.feasibility_rate << ", mean gap " << gap_text(s.mean_gap_pct)
            << "\nwrote " << (fs::path(c.output_dir) / "summary.json").string() << "\n";
  return diverged ? kExitDiverged : kExitOk;
}

int cmd_eval(const Overrides& o, const std::string& weights_path) {
  const ExperimentConfig c = load(o);
  std::ifstream in(weights_path);
  if (!in) throw ConfigError("--weights: cannot open " + weights_path);
  json wj;
  try {
    wj = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("--weights: " + std::string(e.what()));
  }
  const WeightBank bank = weights_from_json(wj);
  NavigationEnv<SpecEncoder> env(c.map, c.channel, c.scenario, SpecEncoder(c.encoder), c.seeds.front());
  if (bank.actions() != env.num_actions() || bank.dim() != env.feature_dim())
    throw ConfigError("--weights: shape does not match the configured encoder");
  const EpisodeTrace t = extract_trajectory(bank, env, c.learner.gamma);
  verify_trace(t, c.map, c.channel, c.scenario);

  const GridGraph g = GridGraph::build(c.map, c.channel, c.scenario.dt);
  const OracleResult opt = solve_oracle(g, c.scenario);
  const fs::path path = fs::path(c.output_dir) / "eval_trajectory.csv";
  detail::write_file(path, trajectory_table(t, c.scenario.dt));
  std::optional<double> g_pct;
  if (t.feasible && opt.feasible) g_pct = gap(t, opt);
  std::cout << "steps " << t.steps.size() << ", travel time " << t.travel_time << " s, goal "
            << (t.goal_reached ? "reached" : "missed") << ", feasible " << (t.feasible ? "yes" : "no")
            << ", gap " << gap_text(g_pct) << "\nwrote " << path.string() << "\n";
  return kExitOk;
}

int cmd_oracle(const Overrides& o) {
  const ExperimentConfig c = load(o);
  const GridGraph g = GridGraph::build(c.map, c.channel, c.scenario.dt);
  const OracleResult opt = solve_oracle(g, c.scenario);
  const double min_t2 = min_feasible_t2(g, c.scenario.strict_budget);
  const fs::path dir(c.output_dir);
  detail::write_file(dir / "coverage.csv", coverage_table(g));
  detail::write_file(dir / "oracle_path.csv", oracle_path_table(g, opt));
  json j = {{"scenario", to_string(c.scenario.kind)},
            {"feasible", opt.feasible},
            {"steps", opt.feasible ? json(opt.steps()) : json(nullptr)},
            {"travel_time_s", opt.feasible ? json(opt.travel_time) : json(nullptr)},
            {"min_feasible_t2_s", std::isfinite(min_t2) ? json(min_t2) : json(nullptr)}};
  detail::write_file(dir / "oracle.json", j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
  return opt.feasible ? kExitOk : kExitInfeasible;
}

struct SweepOptions {
  std::string style = "corridor";
  std::string encoder = "fsr";
  std::uint64_t first_seed = 1;
  std::size_t maps = 10;
  std::optional<std::size_t> episodes;
  std::string out = "out/sweep";
};

int cmd_sweep(const SweepOptions& so) {
  MapStyle style;
  try {
    style = parse_map_style(so.style);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("--style: ") + e.what());
  }
  const EncoderKind kind = parse_encoder_kind(so.encoder);
  const fs::path dir(so.out);
  json points = json::array();
  double sum = 0.0;
  std::size_t gaps = 0, feasible = 0;
  bool diverged = false;
  for (std::size_t k = 0; k < so.maps; ++k) {
    const std::uint64_t seed = so.first_seed + k;
    ExperimentConfig c = benchmark_config(seed, style, kind);
    if (so.episodes) c.learner.episodes = *so.episodes;
    c.output_dir = (dir / ("map_" + std::to_string(seed))).string();
    const ExperimentSummary s = run_experiment(c);
    const RunRecord& r = s.runs.front();
    points.push_back(s.to_json());
    feasible += r.feasible ? 1 : 0;
    diverged = diverged || r.status == "diverged";
    if (r.gap_pct) {
      sum += *r.gap_pct;
      ++gaps;
    }
    std::cout << "map " << seed << ": " << r.status << ", gap " << gap_text(r.gap_pct) << "\n";
  }
  const std::optional<double> mean = gaps ? std::optional<double>(sum / static_cast<double>(gaps)) : std::nullopt;
  json j = {{"style", so.style},
            {"encoder", so.encoder},
            {"maps", so.maps},
            {"first_seed", so.first_seed},
            {"feasibility_rate", so.maps ? static_cast<double>(feasible) / static_cast<double>(so.maps) : 0.0},
            {"mean_gap_pct", mean ? json(*mean) : json(nullptr)},
            {"points", points}};
  detail::write_file(dir / "sweep.json", j.dump(2) + "\n");
  std::cout << "feasible " << feasible << "/" << so.maps << ", mean gap " << gap_text(mean) << "\nwrote "
            << (dir / "sweep.json").string() << "\n";
  return diverged ? kExitDiverged : kExitOk;
}

int cmd_genmap(const std::string& style_name, std::uint64_t seed, const std::string& encoder,
               const std::optional<std::string>& out) {
  MapStyle style;
  try {
    style = parse_map_style(style_name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("--style: ") + e.what());
  }
  const std::string text = config_to_json(benchmark_config(seed, style, parse_encoder_kind(encoder))).dump(2) + "\n";
  if (out) {
    detail::write_file(*out, text);
    std::cout << "wrote " << *out << "\n";
  } else {
    std::cout << text;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"connectivity-aware UAV navigation with double Q-learning"};
  app.require_subcommand(1);

  Overrides train_o, eval_o, oracle_o;
  std::string weights;
  auto* train_cmd = app.add_subcommand("train", "train every configured seed and write tables and a summary");
  add_common(train_cmd, train_o);
  auto* eval_cmd = app.add_subcommand("eval", "roll out saved weights greedily and score them");
  add_common(eval_cmd, eval_o);
  eval_cmd->add_option("--weights", weights, "weights.json written by train")->required();
  auto* oracle_cmd = app.add_subcommand("oracle", "solve the configured map exactly on the lattice");
  add_common(oracle_cmd, oracle_o, false);

  SweepOptions so;
  auto* sweep_cmd = app.add_subcommand("sweep", "train on a range of benchmark maps");
  sweep_cmd->add_option("--style", so.style, "corridor, islands or random")->capture_default_str();
  sweep_cmd->add_option("--encoder", so.encoder, "fsr or rbf")->capture_default_str();
  sweep_cmd->add_option("--seed", so.first_seed, "first map seed")->capture_default_str();
  sweep_cmd->add_option("--maps", so.maps, "number of maps")->capture_default_str();
  sweep_cmd->add_option("--episodes", so.episodes, "override the training budget");
  sweep_cmd->add_option("--out", so.out, "output directory")->capture_default_str();

  std::string gen_style = "corridor", gen_encoder = "fsr";
  std::uint64_t gen_seed = 1;
  std::optional<std::string> gen_out;
  auto* gen_cmd = app.add_subcommand("genmap", "print the full config of a benchmark map");
  gen_cmd->add_option("--style", gen_style, "corridor, islands or random")->capture_default_str();
  gen_cmd->add_option("--seed", gen_seed, "map seed")->capture_default_str();
  gen_cmd->add_option("--encoder", gen_encoder, "fsr or rbf")->capture_default_str();
  gen_cmd->add_option("--out", gen_out, "write to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*train_cmd) return cmd_train(train_o);
    if (*eval_cmd) return cmd_eval(eval_o, weights);
    if (*oracle_cmd) return cmd_oracle(oracle_o);
    if (*sweep_cmd) return cmd_sweep(so);
    if (*gen_cmd) return cmd_genmap(gen_style, gen_seed, gen_encoder, gen_out);
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDiverged;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
