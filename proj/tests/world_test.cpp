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

#include <cmath>
#include <numbers>
#include <random>

#include "uavnav/world.hpp"

namespace uavnav {
namespace {

MapSpec simple_map() {
  MapSpec m;
  m.area = {0, 1000, 0, 1000};
  m.gbs = {{{500, 500, 25}, 0.2}};
  m.start = {100, 100, 100};
  m.goal = {900, 900, 100};
  m.goal_radius = 2.5;
  return m;
}

TEST(World, CenterOfOpenMapIsAdmissible) {
  const MapSpec m = simple_map();
  EXPECT_TRUE(is_admissible({500, 500, 100}, m));
}

TEST(World, InsideNoFlyIsInadmissible) {
  MapSpec m = simple_map();
  m.no_fly.push_back({200, 300, 200, 300});
  EXPECT_FALSE(is_admissible({250, 250, 100}, m));
  EXPECT_TRUE(is_admissible({199.9, 250, 100}, m));
}

TEST(World, BoundaryConventions) {
  MapSpec m = simple_map();
  m.no_fly.push_back({0, 100, 400, 500});
  // On the shared edge of the area and the no-fly rectangle.
  EXPECT_FALSE(is_admissible({0, 450, 100}, m));
  // Area boundary alone is admissible.
  EXPECT_TRUE(is_admissible({0, 600, 100}, m));
  EXPECT_TRUE(is_admissible({1000, 1000, 100}, m));
  // No-fly edge in the interior is excluded.
  EXPECT_FALSE(is_admissible({100, 450, 100}, m));
  EXPECT_FALSE(is_admissible({1000.001, 500, 100}, m));
}

TEST(World, StepPosition) {
  const Position p{0, 0, 100};
  const Position e = step_position(p, 0.0, 10.0, 0.5);
  EXPECT_DOUBLE_EQ(e.x, 5.0);
  EXPECT_DOUBLE_EQ(e.y, 0.0);
  EXPECT_EQ(e.z, 100.0);
  const Position n = step_position(p, std::numbers::pi / 2, 10.0, 0.5);
  EXPECT_NEAR(n.x, 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(n.y, 5.0);
  EXPECT_EQ(step_position(p, 1.234, 0.0, 0.5), p);
  EXPECT_THROW(step_position(p, 0.0, -1.0, 0.5), std::invalid_argument);
  EXPECT_THROW(step_position(p, 0.0, 1.0, 0.0), std::invalid_argument);
}

TEST(World, StepPositionProperties) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> coord(-1e4, 1e4), ang(-10, 10), spd(0, 50), dts(1e-3, 20);
  for (int i = 0; i < 2000; ++i) {
    const Position p{coord(rng), coord(rng), coord(rng)};
    const double v = spd(rng), dt = dts(rng);
    const Position q = step_position(p, ang(rng), v, dt);
    EXPECT_EQ(q.z, p.z);
    EXPECT_NEAR(std::hypot(q.x - p.x, q.y - p.y), v * dt, 1e-9 * (1 + v * dt));
  }
}

TEST(World, DistanceToGbs) {
  EXPECT_DOUBLE_EQ(distance_to_gbs({0, 0, 100}, {0, 0, 0}), 100.0);
  EXPECT_DOUBLE_EQ(distance_to_gbs({3, 4, 0}, {0, 0, 0}), 5.0);
  EXPECT_NEAR(distance_to_gbs({100, 0, 100}, {0, 0, 0}), 100.0 * std::sqrt(2.0), 1e-12);
}

TEST(World, ElevationAngle) {
  EXPECT_DOUBLE_EQ(elevation_angle({5, 5, 100}, {5, 5, 0}), 90.0);
  EXPECT_NEAR(elevation_angle({50, 0, 80}, {0, 0, 30}), 45.0, 1e-12);
  EXPECT_NEAR(elevation_angle({173.205, 0, 100}, {0, 0, 0}), 30.0, 0.01);
  EXPECT_THROW(elevation_angle({1, 2, 3}, {1, 2, 3}), std::domain_error);
}

TEST(World, ElevationDecreasesWithHorizontalDistance) {
  const Position g{0, 0, 25};
  double prev = 90.0;
  for (int k = 1; k <= 500; ++k) {
    const double e = elevation_angle({2.0 * k, 0, 100}, g);
    EXPECT_LT(e, prev);
    prev = e;
  }
}

TEST(World, ValidationAcceptsStartAndGoal) {
  MapSpec m = simple_map();
  EXPECT_NO_THROW(m.validate());
  EXPECT_TRUE(is_admissible(m.start, m));
  EXPECT_TRUE(is_admissible(m.goal, m));
}

TEST(World, ValidationRejectsBadMaps) {
  MapSpec m = simple_map();
  m.no_fly.push_back({50, 150, 50, 150});
  EXPECT_THROW(m.validate(), std::invalid_argument);

  m = simple_map();
  m.gbs.clear();
  EXPECT_THROW(m.validate(), std::invalid_argument);

  m = simple_map();
  m.altitude = 300;
  EXPECT_THROW(m.validate(), std::invalid_argument);

  m = simple_map();
  m.v_max = 0;
  EXPECT_THROW(m.validate(), std::invalid_argument);

  m = simple_map();
  m.area = {10, 5, 0, 100};
  EXPECT_THROW(m.validate(), std::invalid_argument);

  m = simple_map();
  m.goal = {2000, 0, 100};
  EXPECT_THROW(m.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace uavnav
