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

#include "uavnav/mdp.hpp"

namespace uavnav {
namespace {

// 100 x 100 m area with lattice cells of 5 m anchored at (2.5, 2.5).
MapSpec small_map() {
  MapSpec m;
  m.area = {0, 100, 0, 100};
  m.gbs = {{{50, 50, 25}, 0.2}};
  m.start = {2.5, 2.5, 100};
  m.goal = {52.5, 2.5, 100};
  m.goal_radius = 2.5;
  return m;
}

ChannelParams covered_everywhere() {
  ChannelParams cp;
  cp.r_min = 1.0;
  cp.noise_power = 1e-13;
  return cp;
}

ChannelParams never_covered() {
  ChannelParams cp;
  cp.r_min = 200.0;
  return cp;
}

ScenarioSpec budget(double t2 = 15.0) {
  ScenarioSpec s;
  s.kind = ScenarioKind::OutageBudget;
  s.t2 = t2;
  s.dt = 0.5;
  return s;
}

ScenarioSpec max_outage() {
  ScenarioSpec s;
  s.kind = ScenarioKind::MaxOutage;
  s.t1 = 0.5;
  s.dt = 0.5;
  return s;
}

TEST(Mdp, ActionSet) {
  const auto a = action_set();
  ASSERT_EQ(a.size(), 8u);
  EXPECT_EQ(a[0], 0.0);
  EXPECT_DOUBLE_EQ(a[2], std::numbers::pi / 2);
  for (std::size_t k = 0; k < 8; ++k) EXPECT_DOUBLE_EQ(a[k], k * std::numbers::pi / 4);
}

TEST(Mdp, LatticeOffsetsPointAlongHeadings) {
  const auto a = action_set();
  for (std::size_t k = 0; k < 8; ++k) {
    const auto& o = kLatticeOffsets[k];
    EXPECT_NEAR(std::atan2(o[1], o[0]), std::remainder(a[k], 2 * std::numbers::pi), 1e-12);
  }
}

TEST(Mdp, OutageIndicator) {
  EXPECT_EQ(outage_indicator(true), 0);
  EXPECT_EQ(outage_indicator(false), 1);
  int sum = 0;
  for (int i = 0; i < 20; ++i) sum += outage_indicator(true);
  EXPECT_EQ(sum, 0);
}

TEST(Mdp, ComputeCScenarioI) {
  const auto sc = max_outage();
  EXPECT_EQ(compute_c(sc, true, {}), 0.0);
  EXPECT_EQ(compute_c(sc, false, {}), -1.0);
}

TEST(Mdp, ComputeCScenarioII) {
  const auto sc = budget(15.0);
  EXPECT_DOUBLE_EQ(compute_c(sc, false, {}), -0.05);
  EXPECT_EQ(compute_c(sc, true, {}), 0.0);
  ConnectivityState s;
  s.outage_steps = 29;  // 14.5 s so far; this outage reaches 15 s
  EXPECT_EQ(compute_c(sc, false, s), -1.0);
  EXPECT_DOUBLE_EQ(compute_c(sc, true, s), -0.0);
  s.outage_steps = 30;
  EXPECT_EQ(compute_c(sc, true, s), -1.0);
}

TEST(Mdp, ConnectedMoveRewardIsMinusOne) {
  const auto m = small_map();
  const auto [out, conn] = env_step(m.start, 0, {}, m, covered_everywhere(), max_outage());
  EXPECT_EQ(out.reward, -1.0);
  EXPECT_TRUE(out.connected);
  EXPECT_EQ(out.next_state, (Position{7.5, 2.5, 100}));
  EXPECT_EQ(conn.streak_steps, 0u);
  EXPECT_FALSE(out.done);
}

TEST(Mdp, BlockedMoveStaysAndPays) {
  auto m = small_map();
  m.no_fly.push_back({5, 20, 0, 20});
  auto sc = max_outage();
  sc.penalty_out_of_bounds = 10;
  const auto [out, conn] = env_step(m.start, 0, {}, m, covered_everywhere(), sc);
  EXPECT_EQ(out.reward, -11.0);
  EXPECT_TRUE(out.blocked);
  EXPECT_EQ(out.next_state, m.start);
  // Leaving the area is blocked the same way.
  const auto [out2, conn2] = env_step(m.start, 4, {}, m, covered_everywhere(), sc);
  EXPECT_EQ(out2.reward, -11.0);
  EXPECT_EQ(out2.next_state, m.start);
}

TEST(Mdp, OutageWithinBudgetCostsTwo) {
  const auto m = small_map();
  const auto [out, conn] = env_step(m.start, 1, {}, m, never_covered(), budget(15.0));
  EXPECT_DOUBLE_EQ(out.reward, -2.0);
  EXPECT_EQ(conn.outage_steps, 1u);
  EXPECT_DOUBLE_EQ(conn.outage_total(0.5), 0.5);
  EXPECT_FALSE(conn.violated);
}

TEST(Mdp, RewardDecompositionIdentity) {
  auto m = small_map();
  m.no_fly.push_back({30, 40, 30, 40});
  ChannelParams cp;
  cp.noise_power = noise_for_coverage_radius(30.0, m.gbs[0], 100.0, cp);
  std::mt19937_64 rng(9);
  for (const auto& sc : {budget(3.0), max_outage()}) {
    Position p = m.start;
    ConnectivityState conn;
    for (std::size_t k = 0; k < 400; ++k) {
      const auto [out, next] = env_step(p, rng() % 8, conn, m, cp, sc, k % 50);
      EXPECT_DOUBLE_EQ(out.reward, -1.0 + sc.lambda * out.c_term + out.p_term);
      EXPECT_TRUE(is_admissible(out.next_state, m));
      EXPECT_EQ(out.connected, link_report(out.next_state, m, cp).connected);
      if (out.blocked) {
        EXPECT_EQ(out.next_state, p);
      }
      p = out.next_state;
      conn = next;
    }
  }
}

TEST(Mdp, ScenarioIStreakTracking) {
  const auto sc = max_outage();
  ConnectivityState s;
  s = advance_connectivity(sc, true, s);
  EXPECT_EQ(s.streak_steps, 0u);
  EXPECT_FALSE(s.violated);
  s = advance_connectivity(sc, false, s);
  EXPECT_DOUBLE_EQ(s.outage_streak(sc.dt), 0.5);
  EXPECT_TRUE(s.violated);
  s = advance_connectivity(sc, true, s);
  EXPECT_EQ(s.streak_steps, 0u);
  EXPECT_TRUE(s.violated);
}

TEST(Mdp, FullyCoveredScenarioIKeepsStreakZero) {
  const auto m = small_map();
  const auto sc = max_outage();
  Position p = m.start;
  ConnectivityState conn;
  for (std::size_t k = 0; k < 10; ++k) {
    const auto [out, next] = env_step(p, 0, conn, m, covered_everywhere(), sc, k);
    EXPECT_EQ(next.streak_steps, 0u);
    p = out.next_state;
    conn = next;
  }
  EXPECT_TRUE(constraint_satisfied(sc, conn));
}

TEST(Mdp, BudgetViolatedAfterCeilSteps) {
  const auto m = small_map();
  for (double t2 : {15.0, 1.2, 0.5, 3.3}) {
    const auto sc = budget(t2);
    const auto expected = static_cast<std::size_t>(std::ceil(t2 / sc.dt));
    Position p = m.start;
    ConnectivityState conn;
    std::size_t k = 0;
    double prev_total = 0.0;
    while (!conn.violated) {
      const auto [out, next] = env_step(p, k % 2 == 0 ? 2 : 6, conn, m, never_covered(), sc, 0);
      EXPECT_DOUBLE_EQ(next.outage_total(sc.dt) - prev_total, sc.dt);
      prev_total = next.outage_total(sc.dt);
      p = out.next_state;
      conn = next;
      ++k;
    }
    EXPECT_EQ(k, expected) << "t2=" << t2;
  }
}

TEST(Mdp, BudgetFeasibilityConvention) {
  EXPECT_TRUE(budget_satisfied(30, 0.5, 15.0, false));
  EXPECT_FALSE(budget_satisfied(30, 0.5, 15.0, true));
  EXPECT_TRUE(budget_satisfied(29, 0.5, 15.0, true));
  EXPECT_EQ(budget_steps(15.0, 0.5, false), 30u);
  EXPECT_EQ(budget_steps(15.0, 0.5, true), 29u);
  EXPECT_EQ(budget_steps(0.0, 0.5, false), 0u);
  EXPECT_EQ(budget_steps(0.0, 0.5, true), static_cast<std::size_t>(-1));
}

TEST(Mdp, GoalAndTruncation) {
  auto m = small_map();
  m.goal = {12.5, 2.5, 100};
  auto sc = budget();
  const auto cp = covered_everywhere();
  auto [a, ca] = env_step(m.start, 0, {}, m, cp, sc, 0);
  EXPECT_FALSE(a.done);
  auto [b, cb] = env_step(a.next_state, 0, ca, m, cp, sc, 1);
  EXPECT_TRUE(b.done);
  EXPECT_EQ(b.done_reason, DoneReason::GoalReached);

  sc.max_steps = 3;
  auto [c, cc] = env_step(m.start, 2, {}, m, cp, sc, 2);
  EXPECT_TRUE(c.done);
  EXPECT_EQ(c.done_reason, DoneReason::Truncated);
  EXPECT_EQ(resolved_max_steps(m, budget()), 8u);
}

TEST(Mdp, InvalidInputs) {
  auto m = small_map();
  EXPECT_THROW(env_step(m.start, 8, {}, m, covered_everywhere(), budget()), std::out_of_range);
  EXPECT_THROW(env_step({-5, 0, 100}, 0, {}, m, covered_everywhere(), budget()),
               std::invalid_argument);
}

TEST(Mdp, ScenarioValidation) {
  auto sc = max_outage();
  EXPECT_NO_THROW(sc.validate());
  sc.dt = 1.0;
  EXPECT_THROW(sc.validate(), std::invalid_argument);
  sc = budget();
  sc.lambda = 1.0;
  EXPECT_THROW(sc.validate(), std::invalid_argument);
  sc = budget();
  sc.t2 = -1;
  EXPECT_THROW(sc.validate(), std::invalid_argument);
}

TEST(Mdp, NavigationEnvMatchesFreeFunction) {
  auto m = small_map();
  m.no_fly.push_back({30, 40, 0, 40});
  ChannelParams cp;
  cp.noise_power = noise_for_coverage_radius(25.0, m.gbs[0], 100.0, cp);
  EncoderSpec enc;
  enc.area = m.area;
  enc.n_x = enc.n_y = 20;
  NavigationEnv<SpecEncoder> env(m, cp, budget(2.0), SpecEncoder(enc));
  std::mt19937_64 rng(4);
  Position p = m.start;
  ConnectivityState conn;
  FeatureVector phi;
  for (std::size_t k = 0; k < 200 && env.done_reason() == DoneReason::None; ++k) {
    const std::size_t a = rng() % 8;
    const auto [out, next] = env_step(p, a, conn, m, cp, env.scenario(), k);
    const Transition tr = env.step(a);
    EXPECT_EQ(tr.reward, out.reward);
    EXPECT_EQ(env.position(), out.next_state);
    EXPECT_EQ(env.connectivity(), next);
    env.observe(phi);
    EXPECT_EQ(phi, encode_fsr(out.next_state, enc));
    p = out.next_state;
    conn = next;
  }
}

}  // namespace
}  // namespace uavnav
