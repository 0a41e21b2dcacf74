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

#ifndef UAVNAV_BENCHMARK_HPP
#define UAVNAV_BENCHMARK_HPP

// Seeded benchmark maps. Every generated map is checked against the oracle
// before it is returned, so the advertised property always holds.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

#include "uavnav/features.hpp"
#include "uavnav/learner.hpp"
#include "uavnav/mdp.hpp"
#include "uavnav/oracle.hpp"
#include "uavnav/radio.hpp"
#include "uavnav/world.hpp"

namespace uavnav {

enum class MapStyle {
  Corridor,  // chain of overlapping cells from start to goal; max-outage scenario feasible
  Islands,   // start and goal coverage separated by an outage gap
  Random,    // 6..12 stations anywhere
};

inline std::string_view to_string(MapStyle s) {
  switch (s) {
    case MapStyle::Corridor: return "corridor";
    case MapStyle::Islands: return "islands";
    case MapStyle::Random: return "random";
  }
  return "?";
}

inline MapStyle parse_map_style(std::string_view s) {
  if (s == "corridor") return MapStyle::Corridor;
  if (s == "islands") return MapStyle::Islands;
  if (s == "random") return MapStyle::Random;
  throw std::invalid_argument("unknown map style '" + std::string(s) + "'");
}

/// A map together with the channel and scenario its guarantees refer to.
struct BenchmarkMap {
  MapSpec map;
  ChannelParams channel;
  ScenarioSpec scenario;
  double coverage_radius = 0.0;  // m, horizontal, per station
};

/// Episode cap on benchmark maps, as a multiple of the start-goal Chebyshev
/// step count. Long caps let exploration burn through the outage budget.
inline constexpr double kBenchmarkHorizon = 1.5;

namespace detail {

struct StyleParams {
  double side;      // m, square area
  double dt;        // s
  double radius;    // m, coverage radius
  double min_sep;   // m, min start-goal Chebyshev separation
  double max_sep;   // m
};

inline StyleParams style_params(MapStyle s) {
  switch (s) {
    case MapStyle::Corridor: return {300.0, 1.0, 45.0, 180.0, 240.0};
    case MapStyle::Islands: return {200.0, 0.5, 40.0, 110.0, 140.0};
    case MapStyle::Random: return {300.0, 0.5, 50.0, 120.0, 200.0};
  }
  throw std::logic_error("style_params");
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Cell centers of a side/c lattice; positions land on FSR bin centers.
inline Position lattice_point(std::mt19937_64& rng, double side, double cell, double altitude) {
  const int n = static_cast<int>(std::round(side / cell));
  std::uniform_int_distribution<int> u(1, n - 2);
  return {(u(rng) + 0.5) * cell, (u(rng) + 0.5) * cell, altitude};
}

inline void add_no_fly(std::mt19937_64& rng, MapSpec& m, int count, double clearance) {
  const double side = m.area.width();
  for (int k = 0; k < count; ++k) {
    for (int attempt = 0; attempt < 50; ++attempt) {
      const double w = uniform(rng, 0.06, 0.15) * side;
      const double h = uniform(rng, 0.06, 0.15) * side;
      const double x = uniform(rng, 0.0, side - w);
      const double y = uniform(rng, 0.0, side - h);
      const Rect r{x, x + w, y, y + h};
      auto near = [&](const Position& p) {
        return p.x >= r.x_min - clearance && p.x <= r.x_max + clearance &&
               p.y >= r.y_min - clearance && p.y <= r.y_max + clearance;
      };
      if (near(m.start) || near(m.goal)) continue;
      m.no_fly.push_back(r);
      break;
    }
  }
}

inline bool acceptable(const BenchmarkMap& b, MapStyle style) {
  const GridGraph g = GridGraph::build(b.map, b.channel, b.scenario.dt);
  switch (style) {
    case MapStyle::Corridor:
      return solve_scenario1(g).feasible;
    case MapStyle::Islands: {
      if (solve_scenario1(g).feasible) return false;
      const double t2 = min_feasible_t2(g);
      return t2 > 0.0 && t2 <= 0.8 * b.scenario.t2;
    }
    case MapStyle::Random:
      return std::isfinite(min_feasible_t2(g));
  }
  return false;
}

inline BenchmarkMap draw_map(std::mt19937_64& rng, MapStyle style) {
  const StyleParams sp = style_params(style);
  BenchmarkMap b;
  MapSpec& m = b.map;
  m.area = {0, sp.side, 0, sp.side};
  const double cell = m.v_max * sp.dt;
  m.goal_radius = cell / 2;

  do {
    m.start = lattice_point(rng, sp.side, cell, m.altitude);
    m.goal = lattice_point(rng, sp.side, cell, m.altitude);
  } while (std::max(std::abs(m.start.x - m.goal.x), std::abs(m.start.y - m.goal.y)) < sp.min_sep ||
           std::max(std::abs(m.start.x - m.goal.x), std::abs(m.start.y - m.goal.y)) > sp.max_sep);

  auto station = [&](double x, double y) {
    x = std::clamp(x, 0.0, sp.side);
    y = std::clamp(y, 0.0, sp.side);
    m.gbs.push_back({{x, y, 25.0}, 0.2});
  };
  const double dx = m.goal.x - m.start.x, dy = m.goal.y - m.start.y;
  const double len = std::hypot(dx, dy);
  const double nx = -dy / len, ny = dx / len;

  switch (style) {
    case MapStyle::Corridor: {
      // Bent chain start -> bend -> goal with spacing 1.2 R.
      const double bend = uniform(rng, -0.3, 0.3) * len;
      const double bx = m.start.x + dx / 2 + nx * bend, by = m.start.y + dy / 2 + ny * bend;
      auto chain = [&](double x0, double y0, double x1, double y1, bool first) {
        const double seg = std::hypot(x1 - x0, y1 - y0);
        const int n = std::max(1, static_cast<int>(std::ceil(seg / (1.2 * sp.radius))));
        for (int k = first ? 0 : 1; k <= n; ++k)
          station(x0 + (x1 - x0) * k / n, y0 + (y1 - y0) * k / n);
      };
      chain(m.start.x, m.start.y, bx, by, true);
      chain(bx, by, m.goal.x, m.goal.y, false);
      detail::add_no_fly(rng, m, 2, 3 * cell);
      b.scenario.kind = ScenarioKind::MaxOutage;
      b.scenario.t1 = sp.dt;
      break;
    }
    case MapStyle::Islands: {
      // One station over each endpoint plus a satellite; the gap between the
      // two islands is left uncovered.
      for (const Position* p : {&m.start, &m.goal}) {
        station(p->x, p->y);
        const double ang = uniform(rng, 0.0, 2 * std::numbers::pi);
        station(p->x + 0.9 * sp.radius * std::cos(ang), p->y + 0.9 * sp.radius * std::sin(ang));
      }
      detail::add_no_fly(rng, m, 1, 3 * cell);
      b.scenario.kind = ScenarioKind::OutageBudget;
      b.scenario.t2 = 15.0;
      break;
    }
    case MapStyle::Random: {
      const int j = std::uniform_int_distribution<int>(6, 12)(rng);
      detail::add_no_fly(rng, m, 3, 2 * cell);
      while (static_cast<int>(m.gbs.size()) < j) {
        const double x = uniform(rng, 0, sp.side), y = uniform(rng, 0, sp.side);
        const bool inside = std::any_of(m.no_fly.begin(), m.no_fly.end(),
                                        [&](const Rect& r) { return r.contains_closed(x, y); });
        if (!inside) station(x, y);
      }
      b.scenario.kind = ScenarioKind::OutageBudget;
      b.scenario.t2 = 15.0;
      break;
    }
  }
  b.scenario.dt = sp.dt;
  b.scenario.max_steps =
      static_cast<std::size_t>(kBenchmarkHorizon * static_cast<double>(chebyshev_steps(m.start, m.goal, cell)));
  b.coverage_radius = sp.radius;
  b.channel.noise_power = noise_for_coverage_radius(sp.radius, m.gbs.front(), m.altitude, b.channel);
  return b;
}

}  // namespace detail

/// Deterministic map for (seed, style). Draws are repeated until the oracle
/// confirms the style's property.
inline BenchmarkMap make_benchmark_map(std::uint64_t seed, MapStyle style) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(style) + 1);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    BenchmarkMap b = detail::draw_map(rng, style);
    if (detail::acceptable(b, style)) return b;
  }
  throw std::runtime_error("make_benchmark_map: no acceptable map after 1000 draws");
}

/// Encoder matched to a benchmark map: one bin (or kernel) per lattice column/row.
inline EncoderSpec benchmark_encoder(const BenchmarkMap& b, EncoderKind kind) {
  EncoderSpec e;
  e.kind = kind;
  e.area = b.map.area;
  const double cell = b.map.v_max * b.scenario.dt;
  e.n_x = static_cast<std::size_t>(std::round(b.map.area.width() / cell));
  e.n_y = static_cast<std::size_t>(std::round(b.map.area.height() / cell));
  return e;
}

/// Learner settings used on benchmark maps. RBF features overlap, so their
/// step size is halved.
inline LearnerConfig benchmark_learner(EncoderKind kind) {
  LearnerConfig l;
  l.gamma = 0.99;
  l.alpha = kind == EncoderKind::FSR ? 0.03 : 0.015;
  l.eps_start = 0.3;
  l.eps_end = 0.01;
  l.episodes = 20000;
  return l;
}

}  // namespace uavnav

#endif  // UAVNAV_BENCHMARK_HPP
