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

#ifndef UAVNAV_MDP_HPP
#define UAVNAV_MDP_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "uavnav/features.hpp"
#include "uavnav/radio.hpp"
#include "uavnav/world.hpp"

namespace uavnav {

enum class ScenarioKind {
  MaxOutage,     // no continuous outage longer than t1
  OutageBudget,  // total outage time bounded by t2
};

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::OutageBudget;
  double t1 = 15.0;  // s
  double t2 = 15.0;  // s
  double dt = 0.5;   // s
  double lambda = 20.0;
  double penalty_out_of_bounds = 10.0;
  /// Episode truncation; 0 selects 4x the Chebyshev step distance start->goal.
  std::size_t max_steps = 0;
  /// Budget feasibility: false accepts total outage == t2, true requires < t2.
  bool strict_budget = false;

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("scenario.dt must be positive");
    if (kind == ScenarioKind::MaxOutage) {
      if (!(t1 > 0.0)) throw std::invalid_argument("scenario.t1 must be positive");
      if (std::abs(dt - t1) > 1e-12 * std::max(1.0, t1))
        throw std::invalid_argument("scenario.dt must equal scenario.t1 for the max-outage scenario");
    } else if (!(t2 >= 0.0) || !std::isfinite(t2)) {
      throw std::invalid_argument("scenario.t2 must be non-negative");
    }
    if (!(lambda > 1.0) || !std::isfinite(lambda))
      throw std::invalid_argument("scenario.lambda must be > 1");
    if (!(penalty_out_of_bounds >= 0.0) || !std::isfinite(penalty_out_of_bounds))
      throw std::invalid_argument("scenario.penalty_out_of_bounds must be non-negative");
  }

  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

/// Outage bookkeeping carried through an episode. Times are kept as step
/// counts so that long episodes do not accumulate rounding error.
struct ConnectivityState {
  std::size_t streak_steps = 0;
  std::size_t outage_steps = 0;
  bool violated = false;

  double outage_streak(double dt) const { return static_cast<double>(streak_steps) * dt; }
  double outage_total(double dt) const { return static_cast<double>(outage_steps) * dt; }

  friend bool operator==(const ConnectivityState&, const ConnectivityState&) = default;
};

enum class DoneReason { None, GoalReached, Truncated };

struct StepOutcome {
  Position next_state;
  double reward = 0.0;
  bool connected = false;
  double c_term = 0.0;
  double p_term = 0.0;
  bool blocked = false;
  std::size_t serving_gbs = 0;
  double rate = 0.0;
  bool done = false;
  DoneReason done_reason = DoneReason::None;
};

/// A greedy rollout. positions[0] is the start; steps[k] produced positions[k+1].
struct EpisodeTrace {
  std::vector<Position> positions;
  std::vector<double> rewards;
  std::vector<StepOutcome> steps;
  double discounted_return = 0.0;
  double travel_time = 0.0;
  bool goal_reached = false;
  bool feasible = false;
  ConnectivityState final_conn;
};

inline constexpr std::size_t kActionCount = 8;

/// Headings in radians, action index order.
inline constexpr std::array<double, kActionCount> action_set() {
  constexpr double q = std::numbers::pi / 4.0;
  return {0.0, q, 2 * q, 3 * q, 4 * q, 5 * q, 6 * q, 7 * q};
}

/// Per-axis cell displacement of each action. Diagonal actions advance one
/// cell on both axes so that trajectories stay on the start-anchored lattice.
inline constexpr std::array<std::array<int, 2>, kActionCount> kLatticeOffsets{{
    {1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};

inline double cell_size(const MapSpec& m, const ScenarioSpec& sc) { return m.v_max * sc.dt; }

inline Position lattice_step(const Position& p, std::size_t action, double cell) {
  const auto& o = kLatticeOffsets.at(action);
  return {p.x + o[0] * cell, p.y + o[1] * cell, p.z};
}

inline int outage_indicator(bool connected) { return connected ? 0 : 1; }

inline bool budget_satisfied(std::size_t outage_steps, double dt, double t2, bool strict) {
  const double total = static_cast<double>(outage_steps) * dt;
  const double tol = 1e-9 * std::max(1.0, t2);
  return strict ? total < t2 - tol : total <= t2 + tol;
}

/// Largest number of outage steps the budget admits.
inline std::size_t budget_steps(double t2, double dt, bool strict) {
  std::size_t n = static_cast<std::size_t>(std::max(0.0, std::floor(t2 / dt + 1e-9)));
  while (n > 0 && !budget_satisfied(n, dt, t2, strict)) --n;
  if (n == 0 && !budget_satisfied(0, dt, t2, strict)) return static_cast<std::size_t>(-1);
  return n;
}

namespace detail {
inline bool budget_exhausted(std::size_t outage_steps, double dt, double t2) {
  return static_cast<double>(outage_steps) * dt >= t2 - 1e-9 * std::max(1.0, t2);
}
}  // namespace detail

/// Connectivity penalty c for the current step. `before` holds the state
/// prior to this step.
inline double compute_c(const ScenarioSpec& sc, bool connected, const ConnectivityState& before) {
  if (sc.kind == ScenarioKind::MaxOutage) return connected ? 0.0 : -1.0;
  const std::size_t total = before.outage_steps + static_cast<std::size_t>(outage_indicator(connected));
  if (!detail::budget_exhausted(total, sc.dt, sc.t2))
    return -static_cast<double>(outage_indicator(connected)) / sc.lambda;
  return -1.0;
}

inline ConnectivityState advance_connectivity(const ScenarioSpec& sc, bool connected,
                                              ConnectivityState s) {
  if (connected) {
    s.streak_steps = 0;
  } else {
    ++s.streak_steps;
    ++s.outage_steps;
  }
  if (sc.kind == ScenarioKind::MaxOutage) {
    // A disconnected waypoint leaves the vehicle without service for at least
    // one full sampling interval of length t1.
    if (s.outage_streak(sc.dt) >= sc.t1 - 1e-9 * std::max(1.0, sc.t1)) s.violated = true;
  } else if (detail::budget_exhausted(s.outage_steps, sc.dt, sc.t2)) {
    s.violated = true;
  }
  return s;
}

/// Whether an episode that ended in `s` honors the scenario constraint.
inline bool constraint_satisfied(const ScenarioSpec& sc, const ConnectivityState& s) {
  if (sc.kind == ScenarioKind::MaxOutage) return !s.violated;
  return budget_satisfied(s.outage_steps, sc.dt, sc.t2, sc.strict_budget);
}

inline std::size_t chebyshev_steps(const Position& a, const Position& b, double cell) {
  const double dx = std::abs(a.x - b.x) / cell;
  const double dy = std::abs(a.y - b.y) / cell;
  return static_cast<std::size_t>(std::ceil(std::max(dx, dy) - 1e-9));
}

inline std::size_t resolved_max_steps(const MapSpec& m, const ScenarioSpec& sc) {
  if (sc.max_steps > 0) return sc.max_steps;
  return std::max<std::size_t>(1, 4 * chebyshev_steps(m.start, m.goal, cell_size(m, sc)));
}

inline bool goal_reached(const Position& p, const MapSpec& m) {
  return horizontal_distance(p, m.goal) <= m.goal_radius + 1e-9;
}

struct LinkSample {
  std::size_t serving_gbs = 0;
  double rate = 0.0;
  bool connected = false;
};

/// One transition. `link` maps a position to its LinkSample; `step_index` is
/// the zero-based index of this step within the episode.
template <class LinkFn>
std::pair<StepOutcome, ConnectivityState> env_step(const Position& p, std::size_t action,
                                                   const ConnectivityState& conn,
                                                   const MapSpec& m, const ScenarioSpec& sc,
                                                   std::size_t step_index, LinkFn&& link) {
  if (action >= kActionCount) throw std::out_of_range("env_step: invalid action index");
  if (!is_admissible(p, m)) throw std::invalid_argument("env_step: current position is inadmissible");

  StepOutcome out;
  const Position candidate = lattice_step(p, action, cell_size(m, sc));
  if (is_admissible(candidate, m)) {
    out.next_state = candidate;
  } else {
    out.next_state = p;
    out.blocked = true;
    out.p_term = -sc.penalty_out_of_bounds;
  }

  const LinkSample s = link(out.next_state);
  out.connected = s.connected;
  out.serving_gbs = s.serving_gbs;
  out.rate = s.rate;
  out.c_term = compute_c(sc, s.connected, conn);
  out.reward = -1.0 + sc.lambda * out.c_term + out.p_term;

  ConnectivityState next = advance_connectivity(sc, s.connected, conn);
  if (goal_reached(out.next_state, m)) {
    out.done = true;
    out.done_reason = DoneReason::GoalReached;
  } else if (step_index + 1 >= resolved_max_steps(m, sc)) {
    out.done = true;
    out.done_reason = DoneReason::Truncated;
  }
  return {out, next};
}

/// env_step with a direct channel evaluation at every step.
template <class Rng = std::mt19937_64>
std::pair<StepOutcome, ConnectivityState> env_step(const Position& p, std::size_t action,
                                                   const ConnectivityState& conn,
                                                   const MapSpec& m, const ChannelParams& cp,
                                                   const ScenarioSpec& sc,
                                                   std::size_t step_index = 0,
                                                   Rng* rng = nullptr) {
  return env_step(p, action, conn, m, sc, step_index, [&](const Position& q) {
    const LinkReport r = link_report(q, m, cp, rng);
    return LinkSample{r.serving_gbs, r.rate, r.connected};
  });
}

/// What the learner sees after acting.
struct Transition {
  double reward = 0.0;
  bool terminal = false;   // goal reached: no bootstrap
  bool truncated = false;  // episode cut at max_steps: bootstrap continues
};

/// Stateful episode driver around env_step. Positions on the start-anchored
/// lattice are cached together with their link samples and feature vectors
/// when the channel is deterministic.
template <class Encoder = SpecEncoder>
class NavigationEnv {
 public:
  NavigationEnv(MapSpec map, ChannelParams channel, ScenarioSpec scenario, Encoder encoder,
                std::uint64_t channel_seed = 0)
      : map_(std::move(map)),
        channel_(std::move(channel)),
        scenario_(std::move(scenario)),
        encoder_(std::move(encoder)),
        rng_(channel_seed) {
    map_.validate();
    channel_.validate();
    scenario_.validate();
    cell_ = cell_size(map_, scenario_);
    max_steps_ = resolved_max_steps(map_, scenario_);
    reset();
  }

  std::size_t num_actions() const { return kActionCount; }
  std::size_t valid_actions() const { return kActionCount; }
  std::size_t feature_dim() const { return encoder_.dim(); }
  std::size_t max_steps() const { return max_steps_; }

  const MapSpec& map() const { return map_; }
  const ChannelParams& channel() const { return channel_; }
  const ScenarioSpec& scenario() const { return scenario_; }
  const Encoder& encoder() const { return encoder_; }

  void reset() { reset(map_.start); }

  void reset(const Position& p) {
    if (!is_admissible(p, map_)) throw std::invalid_argument("NavigationEnv::reset: inadmissible position");
    pos_ = p;
    conn_ = {};
    steps_ = 0;
    done_reason_ = DoneReason::None;
  }

  const Position& position() const { return pos_; }
  const ConnectivityState& connectivity() const { return conn_; }
  std::size_t steps() const { return steps_; }
  const StepOutcome& last_outcome() const { return last_; }
  DoneReason done_reason() const { return done_reason_; }

  void observe(FeatureVector& out) {
    if (const Entry* e = cached(pos_); e != nullptr && !e->phi.empty()) {
      out = e->phi;
      return;
    }
    encoder_(pos_, out);
    if (Entry* e = cached(pos_)) e->phi = out;
  }

  Transition step(std::size_t action) {
    auto [outcome, next] = env_step(pos_, action, conn_, map_, scenario_, steps_,
                                    [this](const Position& q) { return link(q); });
    pos_ = outcome.next_state;
    conn_ = next;
    ++steps_;
    last_ = outcome;
    done_reason_ = outcome.done_reason;
    return {outcome.reward, outcome.done_reason == DoneReason::GoalReached,
            outcome.done_reason == DoneReason::Truncated};
  }

  /// Goal reached without breaking the scenario constraint.
  bool feasible() const {
    return done_reason_ == DoneReason::GoalReached && constraint_satisfied(scenario_, conn_);
  }

  LinkSample link(const Position& q) {
    Entry* e = cached(q);
    if (e != nullptr && e->has_link) return e->link;
    const LinkReport r = link_report(q, map_, channel_, &rng_);
    LinkSample s{r.serving_gbs, r.rate, r.connected};
    if (e != nullptr) {
      e->link = s;
      e->has_link = true;
    }
    return s;
  }

 private:
  struct Entry {
    LinkSample link;
    bool has_link = false;
    FeatureVector phi;
  };

  // Returns nullptr for off-lattice points or a stochastic channel.
  Entry* cached(const Position& q) {
    if (channel_.fading_model != FadingModel::UnitDeterministic) return nullptr;
    const double fx = (q.x - map_.start.x) / cell_;
    const double fy = (q.y - map_.start.y) / cell_;
    const double ix = std::round(fx);
    const double iy = std::round(fy);
    if (std::abs(fx - ix) > 1e-9 || std::abs(fy - iy) > 1e-9) return nullptr;
    const std::int64_t key = (static_cast<std::int64_t>(ix) << 32) ^
                             (static_cast<std::int64_t>(iy) & 0xffffffffLL);
    return &cache_[key];
  }

  MapSpec map_;
  ChannelParams channel_;
  ScenarioSpec scenario_;
  Encoder encoder_;
  std::mt19937_64 rng_;
  double cell_ = 0.0;
  std::size_t max_steps_ = 0;

  Position pos_;
  ConnectivityState conn_;
  std::size_t steps_ = 0;
  StepOutcome last_;
  DoneReason done_reason_ = DoneReason::None;
  std::unordered_map<std::int64_t, Entry> cache_;
};

}  // namespace uavnav

#endif  // UAVNAV_MDP_HPP
