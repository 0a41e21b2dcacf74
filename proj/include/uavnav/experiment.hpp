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

#ifndef UAVNAV_EXPERIMENT_HPP
#define UAVNAV_EXPERIMENT_HPP

// Train / evaluate / oracle orchestration and the table and summary writers.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavnav/config.hpp"
#include "uavnav/learner.hpp"
#include "uavnav/mdp.hpp"
#include "uavnav/oracle.hpp"

namespace uavnav {

namespace detail {

inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace detail

/// step, t_seconds, x_m, y_m, serving_gbs, rate_bps_hz, connected, c_term, p_term, reward.
/// Row 0 is the start position with empty per-step fields.
inline std::string trajectory_table(const EpisodeTrace& t, double dt) {
  std::ostringstream os;
  os << "step,t_seconds,x_m,y_m,serving_gbs,rate_bps_hz,connected,c_term,p_term,reward\n";
  if (!t.positions.empty())
    os << "0,0," << detail::num(t.positions[0].x) << ',' << detail::num(t.positions[0].y) << ",,,,,,\n";
  for (std::size_t k = 0; k < t.steps.size(); ++k) {
    const StepOutcome& s = t.steps[k];
    os << k + 1 << ',' << detail::num((k + 1) * dt) << ',' << detail::num(s.next_state.x) << ','
       << detail::num(s.next_state.y) << ',' << s.serving_gbs << ',' << detail::num(s.rate) << ','
       << (s.connected ? 1 : 0) << ',' << detail::num(s.c_term) << ',' << detail::num(s.p_term) << ','
       << detail::num(s.reward) << '\n';
  }
  return os.str();
}

/// episode, steps, return, feasible.
inline std::string curve_table(const std::vector<EpisodeRecord>& curve) {
  std::ostringstream os;
  os << "episode,steps,return,feasible\n";
  for (std::size_t e = 0; e < curve.size(); ++e)
    os << e << ',' << curve[e].steps << ',' << detail::num(curve[e].discounted_return) << ','
       << (curve[e].feasible ? 1 : 0) << '\n';
  return os.str();
}

/// One row per lattice cell: i, j, x_m, y_m, admissible, connected.
inline std::string coverage_table(const GridGraph& g) {
  std::ostringstream os;
  os << "i,j,x_m,y_m,admissible,connected\n";
  for (std::size_t id = 0; id < g.size(); ++id) {
    const Cell c = g.cell(id);
    const Position p = g.position(id);
    os << c.i << ',' << c.j << ',' << detail::num(p.x) << ',' << detail::num(p.y) << ','
       << (g.admissible(id) ? 1 : 0) << ',' << (g.admissible(id) && g.connected(id) ? 1 : 0) << '\n';
  }
  return os.str();
}

/// step, i, j, x_m, y_m, connected.
inline std::string oracle_path_table(const GridGraph& g, const OracleResult& r) {
  std::ostringstream os;
  os << "step,i,j,x_m,y_m,connected\n";
  for (std::size_t k = 0; k < r.path.size(); ++k) {
    const std::size_t id = g.id_of(r.path[k]);
    const Position p = g.position(id);
    os << k << ',' << r.path[k].i << ',' << r.path[k].j << ',' << detail::num(p.x) << ','
       << detail::num(p.y) << ',' << (g.connected(id) ? 1 : 0) << '\n';
  }
  return os.str();
}

/// Recomputes a greedy trace from scratch. Any mismatch is a bug, so it is
/// reported by exception.
inline void verify_trace(const EpisodeTrace& t, const MapSpec& m, const ChannelParams& cp,
                         const ScenarioSpec& sc) {
  auto fail = [](std::size_t k, const std::string& what) {
    throw std::logic_error("trajectory step " + std::to_string(k) + ": " + what);
  };
  if (t.positions.size() != t.steps.size() + 1) fail(0, "positions and steps disagree in length");
  if (!(t.positions.front() == m.start)) fail(0, "does not start at map.start");
  const bool deterministic = cp.fading_model == FadingModel::UnitDeterministic;
  std::size_t streak = 0, total = 0;
  bool streak_violated = false;
  for (std::size_t k = 0; k < t.steps.size(); ++k) {
    const StepOutcome& s = t.steps[k];
    if (!(s.next_state == t.positions[k + 1])) fail(k + 1, "position column mismatch");
    if (!is_admissible(s.next_state, m)) fail(k + 1, "inadmissible position");
    if (s.reward != -1.0 + sc.lambda * s.c_term + s.p_term) fail(k + 1, "reward decomposition");
    if (deterministic && link_report(s.next_state, m, cp).connected != s.connected)
      fail(k + 1, "connectivity flag disagrees with link_report");
    if (s.connected) {
      streak = 0;
    } else {
      ++streak;
      ++total;
      if (static_cast<double>(streak) * sc.dt >= sc.t1 - 1e-9) streak_violated = true;
    }
  }
  const bool ok = sc.kind == ScenarioKind::MaxOutage
                      ? !streak_violated
                      : budget_satisfied(total, sc.dt, sc.t2, sc.strict_budget);
  const bool feasible = t.goal_reached && ok;
  if (feasible != t.feasible) fail(t.steps.size(), "feasibility flag disagrees with recomputation");
}

/// Oracle for the configured scenario.
inline OracleResult solve_oracle(const GridGraph& g, const ScenarioSpec& sc) {
  return sc.kind == ScenarioKind::MaxOutage ? solve_scenario1(g)
                                            : solve_scenario2(g, sc.t2, sc.strict_budget);
}

struct RunRecord {
  std::uint64_t seed = 0;
  std::string status;  // ok, learned_infeasible, oracle_infeasible, diverged
  bool feasible = false;
  bool goal_reached = false;
  std::size_t steps = 0;
  double travel_time = 0.0;
  std::optional<double> gap_pct;
  std::string message;
};

struct ExperimentSummary {
  std::string scenario;
  std::string encoder;
  std::size_t seed_count = 0;
  std::optional<double> mean_gap_pct, min_gap_pct, max_gap_pct;
  double feasibility_rate = 0.0;
  bool oracle_feasible = false;
  double oracle_travel_time = std::numeric_limits<double>::infinity();
  double min_feasible_t2 = std::numeric_limits<double>::infinity();
  std::vector<RunRecord> runs;

  nlohmann::json to_json() const {
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
    auto fin = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
    nlohmann::json runs_json = nlohmann::json::array();
    for (const RunRecord& r : runs)
      runs_json.push_back({{"seed", r.seed},
                           {"status", r.status},
                           {"feasible", r.feasible},
                           {"goal_reached", r.goal_reached},
                           {"steps", r.steps},
                           {"travel_time_s", r.travel_time},
                           {"gap_pct", opt(r.gap_pct)},
                           {"message", r.message}});
    return {{"scenario", scenario},
            {"encoder", encoder},
            {"seed_count", seed_count},
            {"mean_gap_pct", opt(mean_gap_pct)},
            {"min_gap_pct", opt(min_gap_pct)},
            {"max_gap_pct", opt(max_gap_pct)},
            {"feasibility_rate", feasibility_rate},
            {"oracle", {{"feasible", oracle_feasible},
                        {"travel_time_s", fin(oracle_travel_time)},
                        {"min_feasible_t2_s", fin(min_feasible_t2)}}},
            {"runs", runs_json}};
  }
};

inline nlohmann::json weights_to_json(const WeightBank& b) {
  return {{"actions", b.actions()}, {"dim", b.dim()}, {"a", b.raw(Half::A)}, {"b", b.raw(Half::B)}};
}

inline WeightBank weights_from_json(const nlohmann::json& j) {
  try {
    WeightBank b(j.at("actions").get<std::size_t>(), j.at("dim").get<std::size_t>());
    const auto a = j.at("a").get<std::vector<double>>();
    const auto bb = j.at("b").get<std::vector<double>>();
    if (a.size() != b.raw(Half::A).size() || bb.size() != b.raw(Half::B).size())
      throw std::invalid_argument("weights: array length does not match actions * dim");
    b.raw(Half::A) = a;
    b.raw(Half::B) = bb;
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("weights: ") + e.what());
  }
}

/// Learner settings for one seed: the configured learner with its seed replaced.
inline LearnerConfig learner_for_seed(const ExperimentConfig& cfg, std::uint64_t seed) {
  LearnerConfig l = cfg.learner;
  l.seed = seed;
  return l;
}

/// Trains, rolls out, verifies and scores one seed. Tables are returned as
/// text so callers decide where (and whether) to write them.
struct SeedOutput {
  RunRecord record;
  std::string trajectory_csv;
  std::string curve_csv;
  WeightBank bank;
};

inline SeedOutput run_seed(const ExperimentConfig& cfg, std::uint64_t seed, const OracleResult& opt) {
  SeedOutput out;
  RunRecord& r = out.record;
  r.seed = seed;
  const LearnerConfig l = learner_for_seed(cfg, seed);
  NavigationEnv<SpecEncoder> env(cfg.map, cfg.channel, cfg.scenario, SpecEncoder(cfg.encoder), seed);
  TrainResult tr{WeightBank(env.num_actions(), env.feature_dim()), {}};
  try {
    tr.curve = train(env, tr.bank, l);
  } catch (const DivergenceError& e) {
    r.status = "diverged";
    r.message = e.what();
    return out;
  }
  out.curve_csv = curve_table(tr.curve);

  NavigationEnv<SpecEncoder> eval_env(cfg.map, cfg.channel, cfg.scenario, SpecEncoder(cfg.encoder), seed);
  const EpisodeTrace t = extract_trajectory(tr.bank, eval_env, l.gamma);
  verify_trace(t, cfg.map, cfg.channel, cfg.scenario);
  out.trajectory_csv = trajectory_table(t, cfg.scenario.dt);
  out.bank = std::move(tr.bank);

  r.feasible = t.feasible;
  r.goal_reached = t.goal_reached;
  r.steps = t.steps.size();
  r.travel_time = t.travel_time;
  if (!opt.feasible) {
    r.status = "oracle_infeasible";
    r.message = "no feasible path exists for this scenario";
  } else if (!t.feasible) {
    r.status = "learned_infeasible";
    r.message = t.goal_reached ? "goal reached but the connectivity constraint is violated"
                               : "greedy rollout truncated before the goal";
  } else {
    r.status = "ok";
    r.gap_pct = gap(t, opt);
  }
  return out;
}

inline ExperimentSummary summarize(const ExperimentConfig& cfg, const OracleResult& opt, double min_t2,
                                   std::vector<RunRecord> runs) {
  ExperimentSummary s;
  s.scenario = to_string(cfg.scenario.kind);
  s.encoder = to_string(cfg.encoder.kind);
  s.seed_count = runs.size();
  s.oracle_feasible = opt.feasible;
  s.oracle_travel_time = opt.travel_time;
  s.min_feasible_t2 = min_t2;
  std::size_t feasible = 0;
  double sum = 0.0;
  std::size_t n = 0;
  for (const RunRecord& r : runs) {
    feasible += r.feasible ? 1 : 0;
    if (!r.gap_pct) continue;
    sum += *r.gap_pct;
    ++n;
    s.min_gap_pct = s.min_gap_pct ? std::min(*s.min_gap_pct, *r.gap_pct) : *r.gap_pct;
    s.max_gap_pct = s.max_gap_pct ? std::max(*s.max_gap_pct, *r.gap_pct) : *r.gap_pct;
  }
  if (n > 0) s.mean_gap_pct = sum / static_cast<double>(n);
  s.feasibility_rate = runs.empty() ? 0.0 : static_cast<double>(feasible) / static_cast<double>(runs.size());
  s.runs = std::move(runs);
  return s;
}

/// Runs every seed and writes, under cfg.output_dir:
///   coverage.csv, oracle_path.csv, summary.json, and per seed
///   seed_<s>/{curve.csv, trajectory.csv, weights.json}
inline ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  namespace fs = std::filesystem;
  const fs::path dir(cfg.output_dir);
  const GridGraph g = GridGraph::build(cfg.map, cfg.channel, cfg.scenario.dt);
  const OracleResult opt = solve_oracle(g, cfg.scenario);
  const double min_t2 = min_feasible_t2(g, cfg.scenario.strict_budget);
  detail::write_file(dir / "coverage.csv", coverage_table(g));
  detail::write_file(dir / "oracle_path.csv", oracle_path_table(g, opt));

  std::vector<RunRecord> runs;
  for (std::uint64_t seed : cfg.seeds) {
    SeedOutput o = run_seed(cfg, seed, opt);
    const fs::path sd = dir / ("seed_" + std::to_string(seed));
    if (!o.curve_csv.empty()) detail::write_file(sd / "curve.csv", o.curve_csv);
    if (!o.trajectory_csv.empty()) {
      detail::write_file(sd / "trajectory.csv", o.trajectory_csv);
      detail::write_file(sd / "weights.json", weights_to_json(o.bank).dump() + "\n");
    }
    runs.push_back(std::move(o.record));
  }
  ExperimentSummary s = summarize(cfg, opt, min_t2, std::move(runs));
  detail::write_file(dir / "summary.json", s.to_json().dump(2) + "\n");
  return s;
}

}  // namespace uavnav

#endif  // UAVNAV_EXPERIMENT_HPP
