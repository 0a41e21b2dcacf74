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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "uavnav/benchmark.hpp"
#include "uavnav/config.hpp"
#include "uavnav/experiment.hpp"

namespace uavnav {
namespace {

namespace fs = std::filesystem;

// 100 x 100 m, one station in the middle covering everything.
const char* kSmallConfig = R"({
  "map": {
    "area": {"x_min": 0, "x_max": 100, "y_min": 0, "y_max": 100},
    "start": [2.5, 2.5],
    "goal": [47.5, 32.5],
    "goal_radius": 2.5,
    "gbs": [{"x": 50, "y": 50}]
  },
  "channel": {"coverage_radius": 1000},
  "scenario": {},
  "encoder": {"kind": "fsr", "n_x": 20, "n_y": 20},
  "learner": {"episodes": 300, "alpha": 0.1},
  "seeds": [3, 4]
})";

json small_json() { return json::parse(kSmallConfig); }

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("uavnav_harness_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string error_of(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(Config, EmptyScenarioBlockUsesBudgetDefaults) {
  const ExperimentConfig c = parse_config(small_json());
  EXPECT_EQ(c.scenario.kind, ScenarioKind::OutageBudget);
  EXPECT_EQ(c.scenario.dt, 0.5);
  EXPECT_EQ(c.scenario.t2, 15.0);
  EXPECT_EQ(c.scenario.lambda, 20.0);
}

TEST(Config, ReferenceDefaults) {
  const ExperimentConfig c = parse_config(small_json());
  EXPECT_EQ(c.channel.a, 5.0);
  EXPECT_EQ(c.channel.b, 0.5);
  EXPECT_EQ(c.channel.eta_los, 1.0);
  EXPECT_EQ(c.channel.eta_nlos, 20.0);
  EXPECT_EQ(c.channel.fc, 2e9);
  EXPECT_EQ(c.channel.r_min, 30.0);
  EXPECT_EQ(c.map.gbs[0].tx_power, 0.2);
  EXPECT_EQ(c.map.altitude, 100.0);
  EXPECT_EQ(c.map.start.z, 100.0);
  EXPECT_EQ(c.map.v_max, 10.0);
  EXPECT_EQ(c.map.goal_radius, 2.5);
  json j = small_json();
  j["map"].erase("goal_radius");
  j["scenario"] = {{"kind", "max_outage"}, {"t1", 1.0}};
  j["encoder"]["n_x"] = j["encoder"]["n_y"] = 10;
  EXPECT_EQ(parse_config(j).map.goal_radius, 5.0);
  EXPECT_EQ(c.learner.gamma, 0.9);
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{3, 4}));
}

TEST(Config, CoverageRadiusSetsNoise) {
  json j = small_json();
  j["channel"] = {{"coverage_radius", 30.0}};
  const ExperimentConfig c = parse_config(j);
  EXPECT_TRUE(link_report({79.0, 50.0, 100.0}, c.map, c.channel).connected);
  EXPECT_FALSE(link_report({81.0, 50.0, 100.0}, c.map, c.channel).connected);
  j.erase("channel");
  const ExperimentConfig d = parse_config(j);
  EXPECT_DOUBLE_EQ(d.channel.noise_power,
                   noise_for_coverage_radius(kDefaultCoverageRadius, d.map.gbs[0], 100.0, d.channel));
}

TEST(Config, MaxOutageNeedsDtEqualT1) {
  json j = small_json();
  j["scenario"] = {{"kind", "max_outage"}, {"t1", 1.0}, {"dt", 0.5}};
  EXPECT_NE(error_of(j).find("scenario.dt"), std::string::npos);
  j["scenario"] = {{"kind", "max_outage"}, {"t1", 1.0}};
  j["encoder"]["n_x"] = 10;
  j["encoder"]["n_y"] = 10;
  EXPECT_EQ(parse_config(j).scenario.dt, 1.0);
}

TEST(Config, MissingMapIsAnError) {
  json j = small_json();
  j.erase("map");
  EXPECT_EQ(error_of(j).rfind("map", 0), 0u);
  j = small_json();
  j["map"].erase("goal");
  EXPECT_NE(error_of(j).find("map.goal"), std::string::npos);
}

TEST(Config, DiagnosticsNameTheField) {
  json j = small_json();
  j["learner"]["alhpa"] = 0.1;
  EXPECT_NE(error_of(j).find("learner.alhpa"), std::string::npos);
  j = small_json();
  j["channel"]["a"] = "five";
  EXPECT_NE(error_of(j).find("channel.a"), std::string::npos);
  j = small_json();
  j["learner"]["gamma"] = 1.5;
  EXPECT_NE(error_of(j).find("learner.gamma"), std::string::npos);
  j = small_json();
  j["map"]["start"] = {-5, 2};
  EXPECT_NE(error_of(j).find("map.start"), std::string::npos);
  j = small_json();
  j["encoder"]["n_x"] = 200;
  EXPECT_NE(error_of(j).find("encoder.n_x"), std::string::npos);
  j = small_json();
  j["scenario"]["dt"] = 8.0;
  EXPECT_NE(error_of(j).find("scenario.dt"), std::string::npos);
  EXPECT_THROW(parse_config(std::string("{ not json")), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, RoundTripIsExact) {
  json j = small_json();
  j["map"]["no_fly"] = {{{"x_min", 60}, {"x_max", 70}, {"y_min", 10}, {"y_max", 20}}};
  j["encoder"] = {{"kind", "rbf"}, {"n_x", 20}, {"n_y", 20}};
  const ExperimentConfig a = parse_config(j);
  const ExperimentConfig b = parse_config(config_to_json(a));
  EXPECT_EQ(a.map, b.map);
  EXPECT_EQ(a.channel, b.channel);
  EXPECT_EQ(a.scenario, b.scenario);
  EXPECT_EQ(a.encoder, b.encoder);
  EXPECT_EQ(a.learner, b.learner);
  EXPECT_EQ(a.seeds, b.seeds);
  EXPECT_EQ(a.output_dir, b.output_dir);
}

TEST(Config, BenchmarkMapBlock) {
  json j = small_json();
  j["map"] = {{"benchmark", {{"style", "islands"}, {"seed", 7}}}};
  j.erase("channel");
  j.erase("scenario");
  j.erase("encoder");
  j.erase("learner");
  const ExperimentConfig c = parse_config(j);
  const BenchmarkMap b = make_benchmark_map(7, MapStyle::Islands);
  EXPECT_EQ(c.map, b.map);
  EXPECT_EQ(c.channel, b.channel);
  EXPECT_EQ(c.scenario, b.scenario);
  EXPECT_EQ(c.encoder, benchmark_encoder(b, EncoderKind::FSR));
  EXPECT_EQ(c.learner, benchmark_learner(EncoderKind::FSR));
  j["encoder"] = {{"kind", "rbf"}};
  j["learner"] = {{"episodes", 10}};
  LearnerConfig expected = benchmark_learner(EncoderKind::RBF);
  expected.episodes = 10;
  EXPECT_EQ(parse_config(j).learner, expected);
  j["map"]["benchmark"]["style"] = "mountains";
  EXPECT_NE(error_of(j).find("map.benchmark.style"), std::string::npos);
}

TEST(Benchmark, IslandsNeedOutageBudget) {
  for (std::uint64_t seed : {7u, 1u, 2u, 3u}) {
    const BenchmarkMap b = make_benchmark_map(seed, MapStyle::Islands);
    const GridGraph g = GridGraph::build(b.map, b.channel, b.scenario.dt);
    EXPECT_FALSE(solve_scenario1(g).feasible);
    EXPECT_GT(min_feasible_t2(g), 0.0);
    EXPECT_TRUE(solve_scenario2(g, b.scenario.t2).feasible);
    EXPECT_EQ(b.scenario.kind, ScenarioKind::OutageBudget);
    EXPECT_EQ(b.scenario.dt, 0.5);
    EXPECT_EQ(b.scenario.t2, 15.0);
  }
}

TEST(Benchmark, CorridorIsMaxOutageFeasible) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const BenchmarkMap b = make_benchmark_map(seed, MapStyle::Corridor);
    EXPECT_EQ(b.scenario.kind, ScenarioKind::MaxOutage);
    EXPECT_EQ(b.scenario.dt, b.scenario.t1);
    const GridGraph g = GridGraph::build(b.map, b.channel, b.scenario.dt);
    EXPECT_TRUE(solve_scenario1(g).feasible);
  }
}

TEST(Benchmark, RandomStationCountAndPlacement) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const BenchmarkMap b = make_benchmark_map(seed, MapStyle::Random);
    EXPECT_GE(b.map.gbs.size(), 6u);
    EXPECT_LE(b.map.gbs.size(), 12u);
    for (const GroundStation& g : b.map.gbs)
      for (const Rect& r : b.map.no_fly) EXPECT_FALSE(r.contains_closed(g.position.x, g.position.y));
    EXPECT_TRUE(is_admissible(b.map.start, b.map));
    EXPECT_TRUE(is_admissible(b.map.goal, b.map));
  }
}

TEST(Benchmark, Deterministic) {
  for (MapStyle s : {MapStyle::Corridor, MapStyle::Islands, MapStyle::Random}) {
    const BenchmarkMap a = make_benchmark_map(5, s);
    const BenchmarkMap b = make_benchmark_map(5, s);
    EXPECT_EQ(a.map, b.map);
    EXPECT_EQ(a.channel, b.channel);
    EXPECT_EQ(a.scenario, b.scenario);
    EXPECT_FALSE(a.map == make_benchmark_map(6, s).map);
  }
  EXPECT_THROW(parse_map_style("nope"), std::invalid_argument);
}

TEST(Benchmark, EpisodeCapScalesWithSeparation) {
  for (MapStyle s : {MapStyle::Corridor, MapStyle::Islands, MapStyle::Random}) {
    const BenchmarkMap b = make_benchmark_map(4, s);
    const double cell = b.map.v_max * b.scenario.dt;
    const double cheb = std::max(std::abs(b.map.goal.x - b.map.start.x), std::abs(b.map.goal.y - b.map.start.y)) / cell;
    EXPECT_EQ(b.scenario.max_steps, static_cast<std::size_t>(std::floor(kBenchmarkHorizon * std::round(cheb))));
    const GridGraph g = GridGraph::build(b.map, b.channel, b.scenario.dt);
    EXPECT_LE(solve_oracle(g, b.scenario).steps(), b.scenario.max_steps);
  }
}

TEST(Benchmark, EncoderBinsMatchLattice) {
  const BenchmarkMap b = make_benchmark_map(2, MapStyle::Islands);
  const EncoderSpec e = benchmark_encoder(b, EncoderKind::FSR);
  const double cell = b.map.v_max * b.scenario.dt;
  EXPECT_DOUBLE_EQ(e.area.width() / e.n_x, cell);
  const GridGraph g = GridGraph::build(b.map, b.channel, b.scenario.dt);
  // Every lattice point sits in the middle of its own bin.
  for (std::size_t id = 0; id < g.size(); ++id) {
    const Position p = g.position(id);
    const double fx = (p.x - e.area.x_min) / cell;
    EXPECT_NEAR(fx - std::floor(fx), 0.5, 1e-9);
  }
}

TEST(Experiment, TwoSeedsWriteTwoTrajectoriesAndOneSummary) {
  ExperimentConfig c = parse_config(small_json());
  c.output_dir = scratch("two_seeds").string();
  const ExperimentSummary s = run_experiment(c);
  EXPECT_EQ(s.seed_count, 2u);
  for (const char* seed : {"seed_3", "seed_4"}) {
    EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / seed / "trajectory.csv"));
    EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / seed / "curve.csv"));
  }
  EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / "summary.json"));
  EXPECT_TRUE(fs::exists(fs::path(c.output_dir) / "coverage.csv"));

  const json sj = json::parse(slurp(fs::path(c.output_dir) / "summary.json"));
  for (const char* key : {"scenario", "encoder", "seed_count", "mean_gap_pct", "min_gap_pct",
                          "max_gap_pct", "feasibility_rate"})
    EXPECT_TRUE(sj.contains(key)) << key;
  EXPECT_EQ(sj["scenario"], "outage_budget");
  EXPECT_EQ(sj["encoder"], "fsr");
  EXPECT_EQ(sj["runs"].size(), 2u);
}

TEST(Experiment, TablesHaveDocumentedColumns) {
  ExperimentConfig c = parse_config(small_json());
  c.seeds = {9};
  c.output_dir = scratch("columns").string();
  const ExperimentSummary s = run_experiment(c);
  const std::string traj = slurp(fs::path(c.output_dir) / "seed_9" / "trajectory.csv");
  EXPECT_EQ(traj.substr(0, traj.find('\n')),
            "step,t_seconds,x_m,y_m,serving_gbs,rate_bps_hz,connected,c_term,p_term,reward");
  EXPECT_EQ(static_cast<std::size_t>(std::count(traj.begin(), traj.end(), '\n')), s.runs[0].steps + 2);
  const std::string curve = slurp(fs::path(c.output_dir) / "seed_9" / "curve.csv");
  EXPECT_EQ(curve.substr(0, curve.find('\n')), "episode,steps,return,feasible");
  EXPECT_EQ(static_cast<std::size_t>(std::count(curve.begin(), curve.end(), '\n')), 301u);
  const std::string cov = slurp(fs::path(c.output_dir) / "coverage.csv");
  EXPECT_EQ(cov.substr(0, cov.find('\n')), "i,j,x_m,y_m,admissible,connected");
  const GridGraph g = GridGraph::build(c.map, c.channel, c.scenario.dt);
  EXPECT_EQ(static_cast<std::size_t>(std::count(cov.begin(), cov.end(), '\n')), g.size() + 1);
}

TEST(Experiment, ByteIdenticalRerun) {
  ExperimentConfig c = parse_config(small_json());
  c.output_dir = scratch("rerun_a").string();
  run_experiment(c);
  const std::string a_dir = c.output_dir;
  c.output_dir = scratch("rerun_b").string();
  run_experiment(c);
  for (const char* f : {"seed_3/trajectory.csv", "seed_3/curve.csv", "seed_4/trajectory.csv",
                        "seed_4/curve.csv", "summary.json", "coverage.csv"})
    EXPECT_EQ(slurp(fs::path(a_dir) / f), slurp(fs::path(c.output_dir) / f)) << f;
}

TEST(Experiment, InfeasibleMapReportsNoGap) {
  json j = small_json();
  j["channel"] = {{"coverage_radius", 10.0}};
  j["scenario"] = {{"t2", 0.0}};
  ExperimentConfig c = parse_config(j);
  c.output_dir = scratch("infeasible").string();
  const ExperimentSummary s = run_experiment(c);
  EXPECT_FALSE(s.oracle_feasible);
  EXPECT_FALSE(s.mean_gap_pct.has_value());
  for (const RunRecord& r : s.runs) {
    EXPECT_EQ(r.status, "oracle_infeasible");
    EXPECT_FALSE(r.gap_pct.has_value());
  }
  const json sj = json::parse(slurp(fs::path(c.output_dir) / "summary.json"));
  EXPECT_TRUE(sj["mean_gap_pct"].is_null());
  EXPECT_FALSE(sj["oracle"]["feasible"].get<bool>());
}

TEST(Experiment, DivergenceIsRecordedNotThrown) {
  json j = small_json();
  j["map"]["start"] = {97.5, 2.5};
  j["scenario"] = {{"penalty_out_of_bounds", 1e308}};
  j["learner"] = {{"alpha", 1.0}, {"eps_start", 0.0}, {"eps_end", 0.0}, {"episodes", 5}};
  ExperimentConfig c = parse_config(j);
  c.output_dir = scratch("diverge").string();
  const ExperimentSummary s = run_experiment(c);
  for (const RunRecord& r : s.runs) EXPECT_EQ(r.status, "diverged");
  EXPECT_EQ(s.feasibility_rate, 0.0);
}

TEST(Experiment, VerifyTraceCatchesTampering) {
  const ExperimentConfig c = parse_config(small_json());
  LearnerConfig l = c.learner;
  const TrainResult r = train(c.map, c.channel, c.scenario, c.encoder, l);
  EpisodeTrace t = extract_trajectory(r.bank, c.map, c.channel, c.scenario, c.encoder);
  EXPECT_NO_THROW(verify_trace(t, c.map, c.channel, c.scenario));
  EpisodeTrace bad = t;
  bad.steps[0].reward -= 1.0;
  EXPECT_THROW(verify_trace(bad, c.map, c.channel, c.scenario), std::logic_error);
  bad = t;
  bad.steps[0].connected = !bad.steps[0].connected;
  EXPECT_THROW(verify_trace(bad, c.map, c.channel, c.scenario), std::logic_error);
  bad = t;
  bad.feasible = !bad.feasible;
  EXPECT_THROW(verify_trace(bad, c.map, c.channel, c.scenario), std::logic_error);
}

TEST(Experiment, WeightsRoundTrip) {
  WeightBank b(8, 3);
  b.row(Half::A, 2)[1] = -0.1234567890123456789;
  b.row(Half::B, 7)[2] = 1e-300;
  EXPECT_EQ(weights_from_json(json::parse(weights_to_json(b).dump())), b);
  json bad = weights_to_json(b);
  bad["a"].erase(0);
  EXPECT_THROW(weights_from_json(bad), std::invalid_argument);
}

}  // namespace
}  // namespace uavnav
