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

#ifndef UAVNAV_CONFIG_HPP
#define UAVNAV_CONFIG_HPP

// JSON experiment configuration. The schema is documented in README.md.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "uavnav/benchmark.hpp"
#include "uavnav/features.hpp"
#include "uavnav/learner.hpp"
#include "uavnav/mdp.hpp"
#include "uavnav/radio.hpp"
#include "uavnav/world.hpp"

namespace uavnav {

using json = nlohmann::json;

/// Bad or inconsistent configuration. what() starts with the offending field.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  MapSpec map;
  ChannelParams channel;
  ScenarioSpec scenario;
  EncoderSpec encoder;
  LearnerConfig learner;
  std::string output_dir = "out";
  std::vector<std::uint64_t> seeds{1};
};

inline constexpr double kDefaultCoverageRadius = 150.0;  // m

namespace detail {

// Reads one JSON object, remembering which keys were consumed so that
// leftovers can be reported as unknown fields.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string field(const std::string& key) const { return path_ + "." + key; }

  template <class T>
  T get(const std::string& key, const T& fallback) {
    if (!j_.contains(key)) return fallback;
    return required<T>(key);
  }

  template <class T>
  T required(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key)) throw ConfigError(field(key) + ": missing required field");
    try {
      return j_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(field(key) + ": wrong type");
    }
  }

  Section child(const std::string& key) {
    used_.insert(key);
    return Section(j_.at(key), field(key));
  }

  const json& raw(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key)) throw ConfigError(field(key) + ": missing required field");
    return j_.at(key);
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!used_.contains(key)) throw ConfigError(field(key) + ": unknown field");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

inline Position read_xy(const json& j, const std::string& path, double z) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError(path + ": expected [x, y]");
  return {j[0].get<double>(), j[1].get<double>(), z};
}

inline Rect read_rect(const json& j, const std::string& path) {
  Section s(j, path);
  Rect r{s.required<double>("x_min"), s.required<double>("x_max"), s.required<double>("y_min"),
         s.required<double>("y_max")};
  s.finish();
  return r;
}

inline FadingModel parse_fading(const std::string& s, const std::string& path) {
  if (s == "unit") return FadingModel::UnitDeterministic;
  if (s == "rayleigh") return FadingModel::RayleighUnitMean;
  throw ConfigError(path + ": expected \"unit\" or \"rayleigh\"");
}

inline InterferenceModel parse_interference(const std::string& s, const std::string& path) {
  if (s == "none") return InterferenceModel::None;
  if (s == "all_other_gbs") return InterferenceModel::AllOtherGbs;
  throw ConfigError(path + ": expected \"none\" or \"all_other_gbs\"");
}

// Runs a validate() and prefixes its message as a ConfigError.
template <class F>
void checked(F&& f) {
  try {
    f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace detail

inline ScenarioKind parse_scenario_kind(const std::string& s) {
  if (s == "max_outage") return ScenarioKind::MaxOutage;
  if (s == "outage_budget") return ScenarioKind::OutageBudget;
  throw ConfigError("scenario.kind: expected \"max_outage\" or \"outage_budget\"");
}

inline std::string to_string(ScenarioKind k) {
  return k == ScenarioKind::MaxOutage ? "max_outage" : "outage_budget";
}

inline EncoderKind parse_encoder_kind(const std::string& s) {
  if (s == "fsr") return EncoderKind::FSR;
  if (s == "rbf") return EncoderKind::RBF;
  throw ConfigError("encoder.kind: expected \"fsr\" or \"rbf\"");
}

inline std::string to_string(EncoderKind k) { return k == EncoderKind::FSR ? "fsr" : "rbf"; }

/// Cross-field checks that the individual validate() calls cannot see.
inline void validate_config(const ExperimentConfig& c) {
  detail::checked([&] { c.map.validate(); });
  detail::checked([&] { c.channel.validate(); });
  detail::checked([&] { c.scenario.validate(); });
  detail::checked([&] { c.encoder.validate(); });
  detail::checked([&] { c.learner.validate(); });

  const double cell = cell_size(c.map, c.scenario);
  if (cell > 0.5 * std::min(c.map.area.width(), c.map.area.height()))
    throw ConfigError("scenario.dt: step length v_max*dt = " + std::to_string(cell) +
                      " m leaves fewer than two lattice cells across map.area");
  const double bin_x = c.encoder.area.width() / static_cast<double>(c.encoder.n_x);
  const double bin_y = c.encoder.area.height() / static_cast<double>(c.encoder.n_y);
  if (bin_x < 0.5 * cell || bin_y < 0.5 * cell)
    throw ConfigError("encoder.n_x: bins of " + std::to_string(std::min(bin_x, bin_y)) +
                      " m are finer than half the " + std::to_string(cell) +
                      " m step; most features would never be visited");
  if (c.seeds.empty()) throw ConfigError("seeds: at least one seed is required");
}

inline ExperimentConfig parse_config(const json& root) {
  detail::Section top(root, "config");
  ExperimentConfig c;

  if (!top.has("map")) throw ConfigError("map: missing required field");
  std::optional<BenchmarkMap> bench;
  double radius = 0.0;  // 0: none requested
  bool explicit_noise = false;
  bool explicit_goal_radius = false;
  {
    detail::Section m = top.child("map");
    if (m.has("benchmark")) {
      detail::Section b = m.child("benchmark");
      const auto style = b.required<std::string>("style");
      const auto seed = b.required<std::uint64_t>("seed");
      b.finish();
      m.finish();
      try {
        bench = make_benchmark_map(seed, parse_map_style(style));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("map.benchmark.style: ") + e.what());
      }
      c.map = bench->map;
      c.channel = bench->channel;
      c.scenario = bench->scenario;
    } else {
      MapSpec& mp = c.map;
      mp.area = detail::read_rect(m.raw("area"), "map.area");
      mp.h_max = m.get("h_max", mp.h_max);
      mp.altitude = m.get("altitude", mp.altitude);
      mp.v_max = m.get("v_max", mp.v_max);
      explicit_goal_radius = m.has("goal_radius");
      mp.goal_radius = m.get("goal_radius", mp.goal_radius);
      mp.start = detail::read_xy(m.raw("start"), "map.start", mp.altitude);
      mp.goal = detail::read_xy(m.raw("goal"), "map.goal", mp.altitude);
      if (m.has("no_fly")) {
        const json& nf = m.raw("no_fly");
        if (!nf.is_array()) throw ConfigError("map.no_fly: expected an array");
        for (std::size_t i = 0; i < nf.size(); ++i)
          mp.no_fly.push_back(detail::read_rect(nf[i], "map.no_fly[" + std::to_string(i) + "]"));
      }
      const json& gs = m.raw("gbs");
      if (!gs.is_array()) throw ConfigError("map.gbs: expected an array");
      for (std::size_t i = 0; i < gs.size(); ++i) {
        detail::Section g(gs[i], "map.gbs[" + std::to_string(i) + "]");
        GroundStation st;
        st.position = {g.required<double>("x"), g.required<double>("y"), g.get("z", 25.0)};
        st.tx_power = g.get("tx_power", st.tx_power);
        g.finish();
        mp.gbs.push_back(st);
      }
      m.finish();
    }
  }

  if (top.has("channel")) {
    detail::Section ch = top.child("channel");
    ChannelParams& cp = c.channel;
    cp.a = ch.get("a", cp.a);
    cp.b = ch.get("b", cp.b);
    cp.eta_los = ch.get("eta_los", cp.eta_los);
    cp.eta_nlos = ch.get("eta_nlos", cp.eta_nlos);
    cp.fc = ch.get("fc", cp.fc);
    cp.r_min = ch.get("r_min", cp.r_min);
    if (ch.has("fading"))
      cp.fading_model = detail::parse_fading(ch.required<std::string>("fading"), "channel.fading");
    if (ch.has("interference"))
      cp.interference_model =
          detail::parse_interference(ch.required<std::string>("interference"), "channel.interference");
    if (ch.has("noise_power") && ch.has("coverage_radius"))
      throw ConfigError("channel.noise_power: give either noise_power or coverage_radius, not both");
    if (ch.has("noise_power")) {
      cp.noise_power = ch.required<double>("noise_power");
      explicit_noise = true;
    } else if (ch.has("coverage_radius")) {
      radius = ch.required<double>("coverage_radius");
      if (!(radius > 0.0)) throw ConfigError("channel.coverage_radius: must be positive");
    }
    ch.finish();
  }
  if (radius == 0.0 && !bench && !explicit_noise)
    radius = kDefaultCoverageRadius;
  if (radius > 0.0) {
    if (c.map.gbs.empty()) throw ConfigError("map.gbs: coverage_radius needs at least one station");
    detail::checked([&] {
      c.channel.noise_power = noise_for_coverage_radius(radius, c.map.gbs.front(), c.map.altitude, c.channel);
    });
  }

  if (top.has("scenario")) {
    detail::Section s = top.child("scenario");
    ScenarioSpec& sc = c.scenario;
    if (s.has("kind")) sc.kind = parse_scenario_kind(s.required<std::string>("kind"));
    sc.t1 = s.get("t1", sc.t1);
    sc.t2 = s.get("t2", sc.t2);
    if (s.has("dt"))
      sc.dt = s.required<double>("dt");
    else if (sc.kind == ScenarioKind::MaxOutage && !bench)
      sc.dt = sc.t1;
    sc.lambda = s.get("lambda", sc.lambda);
    sc.penalty_out_of_bounds = s.get("penalty_out_of_bounds", sc.penalty_out_of_bounds);
    sc.max_steps = s.get("max_steps", sc.max_steps);
    sc.strict_budget = s.get("strict_budget", sc.strict_budget);
    s.finish();
  }

  if (!bench && !explicit_goal_radius) c.map.goal_radius = c.map.v_max * c.scenario.dt / 2.0;

  {
    EncoderSpec& e = c.encoder;
    if (bench) e = benchmark_encoder(*bench, EncoderKind::FSR);
    e.area = c.map.area;
    if (top.has("encoder")) {
      detail::Section s = top.child("encoder");
      if (s.has("kind")) e.kind = parse_encoder_kind(s.required<std::string>("kind"));
      e.n_x = s.get("n_x", e.n_x);
      e.n_y = s.get("n_y", e.n_y);
      e.rbf_variance = s.get("rbf_variance", e.rbf_variance);
      s.finish();
    }
  }

  if (bench) c.learner = benchmark_learner(c.encoder.kind);
  if (top.has("learner")) {
    detail::Section s = top.child("learner");
    LearnerConfig& l = c.learner;
    if (s.has("algorithm")) {
      const auto a = s.required<std::string>("algorithm");
      if (a == "double_q")
        l.algorithm = Algorithm::DoubleQ;
      else if (a == "single_q")
        l.algorithm = Algorithm::SingleQ;
      else
        throw ConfigError("learner.algorithm: expected \"double_q\" or \"single_q\"");
    }
    l.alpha = s.get("alpha", l.alpha);
    l.gamma = s.get("gamma", l.gamma);
    l.eps_start = s.get("eps_start", l.eps_start);
    l.eps_end = s.get("eps_end", l.eps_end);
    l.decay_episodes = s.get("decay_episodes", l.decay_episodes);
    l.episodes = s.get("episodes", l.episodes);
    s.finish();
  }

  c.output_dir = top.get("output_dir", c.output_dir);
  c.seeds = top.get("seeds", c.seeds);
  top.finish();

  validate_config(c);
  return c;
}

/// Benchmark map with its matched encoder and learner; trained once, seeded
/// like the map.
inline ExperimentConfig benchmark_config(std::uint64_t seed, MapStyle style, EncoderKind kind) {
  const BenchmarkMap b = make_benchmark_map(seed, style);
  ExperimentConfig c;
  c.map = b.map;
  c.channel = b.channel;
  c.scenario = b.scenario;
  c.encoder = benchmark_encoder(b, kind);
  c.learner = benchmark_learner(kind);
  c.seeds = {seed};
  return c;
}

inline ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }
  return parse_config(root);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

/// Fully explicit JSON form; parse_config(config_to_json(c)) == c.
inline json config_to_json(const ExperimentConfig& c) {
  auto rect = [](const Rect& r) {
    return json{{"x_min", r.x_min}, {"x_max", r.x_max}, {"y_min", r.y_min}, {"y_max", r.y_max}};
  };
  json m{{"area", rect(c.map.area)},
         {"h_max", c.map.h_max},
         {"altitude", c.map.altitude},
         {"v_max", c.map.v_max},
         {"goal_radius", c.map.goal_radius},
         {"start", {c.map.start.x, c.map.start.y}},
         {"goal", {c.map.goal.x, c.map.goal.y}},
         {"no_fly", json::array()},
         {"gbs", json::array()}};
  for (const Rect& r : c.map.no_fly) m["no_fly"].push_back(rect(r));
  for (const GroundStation& g : c.map.gbs)
    m["gbs"].push_back({{"x", g.position.x}, {"y", g.position.y}, {"z", g.position.z}, {"tx_power", g.tx_power}});

  const ChannelParams& cp = c.channel;
  json ch{{"a", cp.a},
          {"b", cp.b},
          {"eta_los", cp.eta_los},
          {"eta_nlos", cp.eta_nlos},
          {"fc", cp.fc},
          {"noise_power", cp.noise_power},
          {"r_min", cp.r_min},
          {"fading", cp.fading_model == FadingModel::UnitDeterministic ? "unit" : "rayleigh"},
          {"interference", cp.interference_model == InterferenceModel::None ? "none" : "all_other_gbs"}};

  const ScenarioSpec& sc = c.scenario;
  json s{{"kind", to_string(sc.kind)},
         {"t1", sc.t1},
         {"t2", sc.t2},
         {"dt", sc.dt},
         {"lambda", sc.lambda},
         {"penalty_out_of_bounds", sc.penalty_out_of_bounds},
         {"max_steps", sc.max_steps},
         {"strict_budget", sc.strict_budget}};

  json e{{"kind", to_string(c.encoder.kind)}, {"n_x", c.encoder.n_x}, {"n_y", c.encoder.n_y}};
  if (!c.encoder.rbf_variance.empty()) e["rbf_variance"] = c.encoder.rbf_variance;

  const LearnerConfig& l = c.learner;
  json lj{{"algorithm", l.algorithm == Algorithm::DoubleQ ? "double_q" : "single_q"},
          {"alpha", l.alpha},
          {"gamma", l.gamma},
          {"eps_start", l.eps_start},
          {"eps_end", l.eps_end},
          {"decay_episodes", l.decay_episodes},
          {"episodes", l.episodes}};

  return json{{"map", m},          {"channel", ch}, {"scenario", s},           {"encoder", e},
              {"learner", lj},     {"output_dir", c.output_dir}, {"seeds", c.seeds}};
}

}  // namespace uavnav

#endif  // UAVNAV_CONFIG_HPP
