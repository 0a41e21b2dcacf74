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

#ifndef UAVNAV_WORLD_HPP
#define UAVNAV_WORLD_HPP

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavnav {

/// A point in the flight volume, in meters. z is altitude.
struct Position {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Position&, const Position&) = default;
};

inline bool is_finite(const Position& p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

/// Axis-aligned rectangle on the horizontal plane. Used both for the flight
/// area and for no-fly zones.
struct Rect {
  double x_min = 0.0;
  double x_max = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }

  /// Closed containment (boundary counts as inside).
  bool contains_closed(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }

  void validate(const std::string& what) const {
    if (!(std::isfinite(x_min) && std::isfinite(x_max) && std::isfinite(y_min) &&
          std::isfinite(y_max)))
      throw std::invalid_argument(what + ": non-finite bound");
    if (!(x_min < x_max) || !(y_min < y_max))
      throw std::invalid_argument(what + ": requires x_min < x_max and y_min < y_max");
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

struct GroundStation {
  Position position;
  double tx_power = 0.2;  // watts

  friend bool operator==(const GroundStation&, const GroundStation&) = default;
};

/// Static description of one mission: where the vehicle may fly, where the
/// base stations are, and where it starts and must arrive.
struct MapSpec {
  Rect area;
  double h_max = 200.0;
  double altitude = 100.0;
  std::vector<Rect> no_fly;
  std::vector<GroundStation> gbs;
  Position start;
  Position goal;
  double v_max = 10.0;
  double goal_radius = 0.0;

  void validate() const;

  friend bool operator==(const MapSpec&, const MapSpec&) = default;
};

/// Inside the area (boundary inclusive) and outside every no-fly zone
/// (no-fly boundary counts as excluded).
inline bool is_admissible(const Position& p, const MapSpec& m) {
  if (!m.area.contains_closed(p.x, p.y)) return false;
  for (const auto& r : m.no_fly)
    if (r.contains_closed(p.x, p.y)) return false;
  return true;
}

inline void MapSpec::validate() const {
  area.validate("map.area");
  for (std::size_t i = 0; i < no_fly.size(); ++i)
    no_fly[i].validate("map.no_fly[" + std::to_string(i) + "]");
  if (!(h_max > 0.0) || !std::isfinite(h_max))
    throw std::invalid_argument("map.h_max must be positive");
  if (!(altitude > 0.0) || !(altitude <= h_max))
    throw std::invalid_argument("map.altitude must satisfy 0 < altitude <= h_max");
  if (gbs.empty()) throw std::invalid_argument("map.gbs must contain at least one station");
  for (std::size_t i = 0; i < gbs.size(); ++i) {
    if (!is_finite(gbs[i].position))
      throw std::invalid_argument("map.gbs[" + std::to_string(i) + "]: non-finite position");
    if (!(gbs[i].tx_power > 0.0))
      throw std::invalid_argument("map.gbs[" + std::to_string(i) + "]: tx_power must be positive");
  }
  if (!is_finite(start) || !is_finite(goal))
    throw std::invalid_argument("map.start/map.goal must be finite");
  if (!is_admissible(start, *this))
    throw std::invalid_argument("map.start is outside the area or inside a no-fly zone");
  if (!is_admissible(goal, *this))
    throw std::invalid_argument("map.goal is outside the area or inside a no-fly zone");
  if (!(v_max > 0.0) || !std::isfinite(v_max))
    throw std::invalid_argument("map.v_max must be positive");
  if (!(goal_radius >= 0.0) || !std::isfinite(goal_radius))
    throw std::invalid_argument("map.goal_radius must be non-negative");
}

/// Moves p along `heading` for dt seconds at `speed`. Altitude is unchanged.
inline Position step_position(const Position& p, double heading, double speed, double dt) {
  if (speed < 0.0) throw std::invalid_argument("step_position: negative speed");
  if (!(dt > 0.0)) throw std::invalid_argument("step_position: dt must be positive");
  const double d = speed * dt;
  return {p.x + d * std::cos(heading), p.y + d * std::sin(heading), p.z};
}

inline double distance_to_gbs(const Position& p, const Position& g) {
  return std::hypot(p.x - g.x, p.y - g.y, p.z - g.z);
}

inline double horizontal_distance(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

/// Elevation angle of p seen from g, in degrees within [0, 90].
inline double elevation_angle(const Position& p, const Position& g) {
  if (p == g) throw std::domain_error("elevation_angle: coincident points");
  const double horizontal = horizontal_distance(p, g);
  const double vertical = std::abs(p.z - g.z);
  if (horizontal == 0.0) return 90.0;
  return std::atan2(vertical, horizontal) * 180.0 / std::numbers::pi;
}

}  // namespace uavnav

#endif  // UAVNAV_WORLD_HPP
