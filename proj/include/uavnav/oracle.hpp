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

#ifndef UAVNAV_ORACLE_HPP
#define UAVNAV_ORACLE_HPP

// Exact minimum-time baselines on the start-anchored lattice the vehicle
// moves on. Every move costs one time step of dt seconds.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <limits>
#include <stdexcept>
#include <vector>

#include "uavnav/mdp.hpp"
#include "uavnav/radio.hpp"
#include "uavnav/world.hpp"

namespace uavnav {

struct Cell {
  int i = 0;
  int j = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

class GridGraph {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  GridGraph() = default;

  /// Samples the lattice {start + (i, j) * v_max * dt} inside the area.
  /// Connectivity is evaluated once per admissible cell with the mean channel.
  static GridGraph build(const MapSpec& m, const ChannelParams& cp, double dt) {
    m.validate();
    if (!(dt > 0.0)) throw std::invalid_argument("GridGraph: dt must be positive");
    ChannelParams mean = cp;
    mean.fading_model = FadingModel::UnitDeterministic;

    GridGraph g;
    g.dt_ = dt;
    g.cell_size_ = m.v_max * dt;
    g.origin_ = m.start;
    const double c = g.cell_size_;
    g.i_min_ = static_cast<int>(std::ceil((m.area.x_min - m.start.x) / c - 1e-9));
    g.j_min_ = static_cast<int>(std::ceil((m.area.y_min - m.start.y) / c - 1e-9));
    const int i_max = static_cast<int>(std::floor((m.area.x_max - m.start.x) / c + 1e-9));
    const int j_max = static_cast<int>(std::floor((m.area.y_max - m.start.y) / c + 1e-9));
    g.nx_ = static_cast<std::size_t>(i_max - g.i_min_ + 1);
    g.ny_ = static_cast<std::size_t>(j_max - g.j_min_ + 1);

    const std::size_t n = g.nx_ * g.ny_;
    g.admissible_.assign(n, 0);
    g.connected_.assign(n, 0);
    g.goal_.assign(n, 0);
    for (std::size_t id = 0; id < n; ++id) {
      const Position p = g.position(id);
      if (!is_admissible(p, m)) continue;
      g.admissible_[id] = 1;
      g.connected_[id] = link_report(p, m, mean).connected ? 1 : 0;
      if (goal_reached(p, m)) g.goal_[id] = 1;
    }
    g.start_ = g.id_of({0, 0});
    return g;
  }

  double dt() const { return dt_; }
  double cell_size() const { return cell_size_; }
  std::size_t nx() const { return nx_; }
  std::size_t ny() const { return ny_; }
  std::size_t size() const { return nx_ * ny_; }
  std::size_t start() const { return start_; }

  Cell cell(std::size_t id) const {
    return {static_cast<int>(id % nx_) + i_min_, static_cast<int>(id / nx_) + j_min_};
  }

  std::size_t id_of(Cell c) const {
    const int ci = c.i - i_min_;
    const int cj = c.j - j_min_;
    if (ci < 0 || cj < 0 || ci >= static_cast<int>(nx_) || cj >= static_cast<int>(ny_)) return npos;
    return static_cast<std::size_t>(cj) * nx_ + static_cast<std::size_t>(ci);
  }

  Position position(std::size_t id) const {
    const Cell c = cell(id);
    return {origin_.x + c.i * cell_size_, origin_.y + c.j * cell_size_, origin_.z};
  }

  /// Lattice cell holding p, or npos when p is off the lattice.
  std::size_t locate(const Position& p) const {
    const double fi = (p.x - origin_.x) / cell_size_;
    const double fj = (p.y - origin_.y) / cell_size_;
    const double ri = std::round(fi);
    const double rj = std::round(fj);
    if (std::abs(fi - ri) > 1e-6 || std::abs(fj - rj) > 1e-6) return npos;
    return id_of({static_cast<int>(ri), static_cast<int>(rj)});
  }

  bool admissible(std::size_t id) const { return admissible_[id] != 0; }
  bool connected(std::size_t id) const { return connected_[id] != 0; }
  bool goal(std::size_t id) const { return goal_[id] != 0; }

  /// Admissible 8-neighbours of an admissible cell, in action order.
  template <class F>
  void for_each_neighbor(std::size_t id, F&& f) const {
    const Cell c = cell(id);
    for (const auto& o : kLatticeOffsets) {
      const std::size_t nb = id_of({c.i + o[0], c.j + o[1]});
      if (nb != npos && admissible(nb)) f(nb);
    }
  }

 private:
  double dt_ = 0.0;
  double cell_size_ = 0.0;
  Position origin_;
  int i_min_ = 0;
  int j_min_ = 0;
  std::size_t nx_ = 0;
  std::size_t ny_ = 0;
  std::size_t start_ = npos;
  std::vector<std::uint8_t> admissible_;
  std::vector<std::uint8_t> connected_;
  std::vector<std::uint8_t> goal_;
};

struct OracleResult {
  bool feasible = false;
  double travel_time = std::numeric_limits<double>::infinity();
  std::vector<Cell> path;  // start cell first
  double outage_used = 0.0;

  std::size_t steps() const { return path.empty() ? 0 : path.size() - 1; }
};

namespace detail {

inline OracleResult layered_bfs(const GridGraph& g, std::size_t budget_units) {
  OracleResult out;
  const std::size_t layers = budget_units + 1;
  const std::size_t n = g.size();
  constexpr std::size_t unseen = static_cast<std::size_t>(-1);
  std::vector<std::size_t> parent(n * layers, unseen);
  auto key = [&](std::size_t id, std::size_t used) { return used * n + id; };

  std::deque<std::size_t> queue;
  const std::size_t s = key(g.start(), 0);
  parent[s] = s;
  queue.push_back(s);
  std::size_t found = unseen;
  while (!queue.empty()) {
    const std::size_t k = queue.front();
    queue.pop_front();
    const std::size_t id = k % n;
    const std::size_t used = k / n;
    if (g.goal(id)) {
      found = k;
      break;
    }
    g.for_each_neighbor(id, [&](std::size_t nb) {
      const std::size_t next_used = used + (g.connected(nb) ? 0 : 1);
      if (next_used > budget_units) return;
      const std::size_t nk = key(nb, next_used);
      if (parent[nk] != unseen) return;
      parent[nk] = k;
      queue.push_back(nk);
    });
  }
  if (found == unseen) return out;

  std::vector<Cell> path;
  for (std::size_t k = found;; k = parent[k]) {
    path.push_back(g.cell(k % n));
    if (parent[k] == k) break;
  }
  std::reverse(path.begin(), path.end());
  out.feasible = true;
  out.path = std::move(path);
  out.travel_time = static_cast<double>(out.steps()) * g.dt();
  out.outage_used = static_cast<double>(found / n) * g.dt();
  return out;
}

}  // namespace detail

/// Shortest path through connected cells only (every sampled waypoint after
/// the start must be covered).
inline OracleResult solve_scenario1(const GridGraph& g) { return detail::layered_bfs(g, 0); }

/// Shortest path whose total outage time fits the budget t2.
inline OracleResult solve_scenario2(const GridGraph& g, double t2, bool strict = false) {
  const std::size_t units = budget_steps(t2, g.dt(), strict);
  if (units == static_cast<std::size_t>(-1)) return {};
  // More outage steps than cells can never be used by a shortest path.
  return detail::layered_bfs(g, std::min(units, g.size()));
}

/// Smallest outage budget (a multiple of dt) admitting any goal-reaching
/// path; +infinity when no admissible path exists.
inline double min_feasible_t2(const GridGraph& g, bool strict = false) {
  const std::size_t n = g.size();
  constexpr std::size_t inf = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> cost(n, inf);
  std::deque<std::size_t> dq;
  cost[g.start()] = 0;
  dq.push_back(g.start());
  while (!dq.empty()) {
    const std::size_t id = dq.front();
    dq.pop_front();
    g.for_each_neighbor(id, [&](std::size_t nb) {
      const std::size_t w = g.connected(nb) ? 0 : 1;
      if (cost[id] + w < cost[nb]) {
        cost[nb] = cost[id] + w;
        if (w == 0)
          dq.push_front(nb);
        else
          dq.push_back(nb);
      }
    });
  }
  std::size_t best = inf;
  for (std::size_t id = 0; id < n; ++id)
    if (g.goal(id)) best = std::min(best, cost[id]);
  if (best == inf) return std::numeric_limits<double>::infinity();
  return static_cast<double>(strict ? best + 1 : best) * g.dt();
}

/// Percentage by which the learned travel time exceeds the optimum.
inline double gap(const EpisodeTrace& learned, const OracleResult& opt) {
  if (!learned.feasible) throw std::invalid_argument("gap: learned trajectory is infeasible");
  if (!opt.feasible) throw std::invalid_argument("gap: oracle reports no feasible path");
  if (!(opt.travel_time > 0.0)) throw std::invalid_argument("gap: optimal travel time is zero");
  const double pct = 100.0 * (learned.travel_time - opt.travel_time) / opt.travel_time;
  if (pct < -1e-9)
    throw std::logic_error("gap: learned trajectory beats the optimum; oracle and environment disagree");
  return pct;
}

}  // namespace uavnav

#endif  // UAVNAV_ORACLE_HPP
