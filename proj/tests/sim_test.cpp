// Copyright 2026 The Merge Planner Authors
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

#include "merge_planner/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gtest/gtest.h"

namespace merge_planner {
namespace {

IdmParams reference_idm() {
  IdmParams p;
  p.v0 = 8.33;
  p.T = 1.5;
  p.s0 = 2.0;
  p.a = 1.4;
  p.b = 2.0;
  p.delta = 4.0;
  return p;
}

Vehicle vehicle(int id, double s, double v) {
  Vehicle out;
  out.id = id;
  out.s = s;
  out.v = v;
  return out;
}

void expect_same_traffic(const World& a, const World& b) {
  ASSERT_EQ(a.others.size(), b.others.size());
  EXPECT_EQ(a.t, b.t);
  for (std::size_t i = 0; i < a.others.size(); ++i) {
    EXPECT_EQ(a.others[i].s, b.others[i].s);
    EXPECT_EQ(a.others[i].v, b.others[i].v);
    EXPECT_EQ(a.others[i].a, b.others[i].a);
  }
}

TEST(IdmAccel, FixedPointAndStandstill) {
  const IdmParams p = reference_idm();
  EXPECT_NEAR(idm_accel(p.v0, kFreeRoad, 0.0, p), 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(idm_accel(0.0, kFreeRoad, 0.0, p), p.a);
}

TEST(IdmAccel, MatchesHandEvaluation) {
  const IdmParams p = reference_idm();
  // s* = 2 + 8.33 * 1.5 = 14.495; a = 1.4 (1 - 1 - (14.495 / 30)^2)
  const double s_star = 2.0 + 8.33 * 1.5;
  const double expected = 1.4 * (1.0 - 1.0 - (s_star / 30.0) * (s_star / 30.0));
  EXPECT_NEAR(idm_accel(8.33, 30.0, 0.0, p), expected, 1e-9);
  // Closing in adds the dynamic term v dv / (2 sqrt(a b)).
  const double s_star2 = s_star + 8.33 * 2.0 / (2.0 * std::sqrt(1.4 * 2.0));
  const double expected2 =
      1.4 * (1.0 - std::pow(8.33 / 8.33, 4) - std::pow(s_star2 / 30.0, 2));
  EXPECT_NEAR(idm_accel(8.33, 30.0, 2.0, p), expected2, 1e-9);
}

TEST(IdmAccel, NonPositiveGapBrakesFully) {
  const IdmParams p = reference_idm();
  EXPECT_EQ(idm_accel(5.0, 0.0, 0.0, p), -p.max_decel);
  EXPECT_EQ(idm_accel(5.0, -1.0, 0.0, p), -p.max_decel);
  EXPECT_GE(idm_accel(15.0, 0.5, 10.0, p), -p.max_decel);
}

TEST(StepWorld, ExactKinematicsWithoutNoise) {
  const IdmParams p = reference_idm();
  World w;
  w.others = {vehicle(0, 10.0, 5.0)};
  Rng rng(1);
  const double a = idm_accel(5.0, kFreeRoad, 0.0, p);
  const World next = step_world(w, 0.08, rng, p, 0.0);
  EXPECT_DOUBLE_EQ(next.others[0].s, 10.0 + 5.0 * 0.08 + 0.5 * a * 0.0064);
  EXPECT_DOUBLE_EQ(next.others[0].v, 5.0 + a * 0.08);
  EXPECT_DOUBLE_EQ(next.t, 0.08);
}

TEST(StepWorld, FreeVehicleAtDesiredSpeedStaysThere) {
  const IdmParams p = reference_idm();
  World w;
  w.others = {vehicle(0, 0.0, p.v0)};
  Rng rng(2);
  for (int k = 0; k < 100; ++k) w = step_world(w, 0.08, rng, p, 0.0);
  EXPECT_NEAR(w.others[0].v, p.v0, 1e-12);
  EXPECT_NEAR(w.others[0].s, 100 * 0.08 * p.v0, 1e-9);
}

TEST(StepWorld, SeededNoiseIsReproducible) {
  World w;
  w.others = {vehicle(0, 50.0, 8.0), vehicle(1, 20.0, 8.5)};
  Rng r1(7), r2(7);
  World a = w, b = w;
  for (int k = 0; k < 200; ++k) {
    a = step_world(a, 0.08, r1, IdmParams{}, 0.25);
    b = step_world(b, 0.08, r2, IdmParams{}, 0.25);
  }
  expect_same_traffic(a, b);
  EXPECT_THROW(step_world(w, 0.0, r1, IdmParams{}, 0.25), std::invalid_argument);
}

TEST(StepWorld, SpeedNeverNegative) {
  World w;
  w.others = {vehicle(0, 10.0, 0.2), vehicle(1, 5.5, 3.0)};
  Rng rng(3);
  for (int k = 0; k < 500; ++k) {
    w = step_world(w, 0.08, rng, IdmParams{}, 1.0);
    for (const auto& v : w.others) ASSERT_GE(v.v, 0.0);
  }
}

TEST(Measure, NoiseFreeIsExact) {
  World w;
  w.others = {vehicle(0, 12.5, 8.0), vehicle(1, -3.0, 8.0)};
  Rng rng(4);
  const auto m = measure(w, rng, 0.0);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].s, 12.5);
  EXPECT_EQ(m[1].s, -3.0);
  EXPECT_EQ(m[1].id, 1);
}

TEST(Measure, SampleVarianceMatches) {
  World w;
  w.others = {vehicle(0, 0.0, 8.0)};
  Rng rng(5);
  const double sigma = 0.25;
  const int n = 100000;
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = measure(w, rng, sigma)[0].s;
    sum += x;
    sum_sq += x * x;
  }
  const double mean = sum / n;
  const double var = (sum_sq - n * mean * mean) / (n - 1);
  EXPECT_NEAR(var, sigma * sigma, 0.03 * sigma * sigma);

  Rng a(6), b(6);
  EXPECT_EQ(measure(w, a, sigma)[0].s, measure(w, b, sigma)[0].s);
}

TEST(GenerateScenario, ArrivalWindowAndGap) {
  ScenarioConfig cfg;
  const LocalMap map;
  for (int seed = 0; seed < 10000; ++seed) {
    Rng rng(seed);
    const World w = generate_scenario(cfg, map, rng);
    ASSERT_EQ(w.others.size(), 2u);
    const Vehicle& lead = w.others[0];
    const Vehicle& follower = w.others[1];
    const double t_arrival = (map.s_merge - lead.s) / lead.v;
    ASSERT_GE(t_arrival, 5.0 - 1e-9);
    ASSERT_LE(t_arrival, 13.0 + 1e-9);
    ASSERT_NEAR(lead.s - follower.s - 0.5 * (lead.length + follower.length),
                cfg.gap_size, 1e-9);
    ASSERT_GE(w.ego.v, cfg.ego_v_min);
    ASSERT_LE(w.ego.v, cfg.ego_v_max);
    ASSERT_EQ(w.ego.s, map.s_merge - cfg.ego_start_offset);
  }
}

TEST(GenerateScenario, DeterministicInSeed) {
  const ScenarioConfig cfg;
  const LocalMap map;
  Rng a(99), b(99);
  const World wa = generate_scenario(cfg, map, a);
  const World wb = generate_scenario(cfg, map, b);
  expect_same_traffic(wa, wb);
  EXPECT_EQ(wa.ego, wb.ego);
}

TEST(Collision, CenterDistanceRule) {
  World w;
  w.ego = {110.0, 8.0, 0.0};
  w.others = {vehicle(0, 120.0, 8.0)};
  EXPECT_FALSE(in_collision(w, 100.0));
  w.others[0].s = 113.9;
  EXPECT_TRUE(in_collision(w, 100.0));
  w.others[0].s = 114.0;
  EXPECT_FALSE(in_collision(w, 100.0));
  // Before the merge the ego is on its own path.
  w.ego.s = 90.0;
  w.others[0].s = 91.0;
  EXPECT_FALSE(in_collision(w, 100.0));
  World hit = w;
  hit.ego.s = 101.0;
  hit.others[0].s = 102.0;
  EXPECT_TRUE(collision_check({w, hit}, 100.0));
  EXPECT_FALSE(collision_check({w}, 100.0));
}

TEST(RunEpisode, NoTrafficMergesBeforeFirst) {
  SimConfig cfg;
  cfg.scenario.seed = 3;
  const EpisodeResult r = run_episode_without_traffic(cfg);
  EXPECT_EQ(r.decision_class, DecisionClass::kMergeBeforeFirst);
  EXPECT_FALSE(r.collided);
  EXPECT_TRUE(r.reached_pga);
  EXPECT_NEAR(r.final_ego.v, cfg.map.v_max, 1e-9);
}

TEST(RunEpisode, LateWideGapCompletesAtTargetSpeed) {
  SimConfig cfg;
  cfg.scenario.gap_size = 65.0;
  cfg.scenario.arrival_min = cfg.scenario.arrival_max = 12.0;
  cfg.scenario.ego_v_min = cfg.scenario.ego_v_max = 35.0 / 3.6;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    cfg.scenario.seed = seed;
    const EpisodeResult r = run_episode(cfg);
    ASSERT_TRUE(r.reached_pga) << "seed " << seed;
    EXPECT_FALSE(r.collided);
    EXPECT_NEAR(r.final_ego.v, r.pga_target_speed, 0.1);
    EXPECT_NEAR(r.final_ego.s, cfg.map.s_merge, 1e-9);
  }
}

TEST(RunEpisode, SameSeedSameResult) {
  SimConfig cfg;
  cfg.record_history = true;
  cfg.record_decisions = true;
  cfg.scenario.seed = 12345;
  const EpisodeResult a = run_episode(cfg);
  const EpisodeResult b = run_episode(cfg);
  EXPECT_EQ(a.decision_class, b.decision_class);
  EXPECT_EQ(a.collided, b.collided);
  EXPECT_EQ(a.max_decel_applied, b.max_decel_applied);
  EXPECT_EQ(a.executed_jerk_energy, b.executed_jerk_energy);
  EXPECT_EQ(a.final_ego, b.final_ego);
  EXPECT_EQ(a.decision_log, b.decision_log);
  ASSERT_EQ(a.history.size(), b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    expect_same_traffic(a.history[i], b.history[i]);
    EXPECT_EQ(a.history[i].ego, b.history[i].ego);
  }
  EXPECT_EQ(a.cycle_times.size(), b.cycle_times.size());
}

TEST(RunEpisode, TrafficIndependentOfWeight) {
  SimConfig cfg;
  cfg.record_history = true;
  cfg.scenario.gap_size = 50.0;
  for (int run = 0; run < 10; ++run) {
    cfg.scenario.seed = episode_seed(1, run);
    cfg.planner.w_t = 1.0;
    const EpisodeResult a = run_episode(cfg);
    cfg.planner.w_t = 25.0;
    const EpisodeResult b = run_episode(cfg);
    const std::size_t n = std::min(a.history.size(), b.history.size());
    ASSERT_GT(n, 1u);
    for (std::size_t i = 0; i < n; ++i) expect_same_traffic(a.history[i], b.history[i]);
  }
}

TEST(RunEpisode, FailSafeWithinLimitUnlessEmergency) {
  SimConfig cfg;
  for (int run = 0; run < 60; ++run) {
    cfg.scenario.seed = episode_seed(2, run);
    cfg.scenario.gap_size = 30.0 + 5.0 * (run % 8);
    const EpisodeResult r = run_episode(cfg);
    if (!r.emergency) {
      EXPECT_LE(r.max_decel_applied, cfg.planner.limits.b_max);
    }
    EXPECT_FALSE(r.collided) << "seed " << r.seed;
  }
}

TEST(EpisodeSeed, IndependentOfCell) {
  EXPECT_EQ(episode_seed(1, 4), episode_seed(1, 4));
  EXPECT_NE(episode_seed(1, 4), episode_seed(1, 5));
  EXPECT_NE(episode_seed(1, 4), episode_seed(2, 4));
}

TEST(MonteCarlo, FractionsSumToOne) {
  SweepConfig sweep;
  sweep.gaps = {40.0, 60.0};
  sweep.w_ts = {1.0, 12.5};
  sweep.runs = 6;
  const auto rows = monte_carlo(sweep, SimConfig{});
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& r : rows) {
    EXPECT_NEAR(r.p_gap + r.p_before + r.p_gentle + r.p_failsafe, 1.0, 1e-12);
    EXPECT_EQ(r.runs, 6);
  }
  EXPECT_EQ(rows[0].gap, 40.0);
  EXPECT_EQ(rows[1].w_t, 12.5);
  EXPECT_EQ(rows[2].gap, 60.0);
}

TEST(MonteCarlo, SingleRunHasOneClass) {
  SweepConfig sweep;
  sweep.gaps = {45.0};
  sweep.w_ts = {1.0};
  sweep.runs = 1;
  const auto rows = monte_carlo(sweep, SimConfig{});
  ASSERT_EQ(rows.size(), 1u);
  const auto& r = rows[0];
  const double largest = std::max({r.p_gap, r.p_before, r.p_gentle, r.p_failsafe});
  EXPECT_EQ(largest, 1.0);
}

TEST(MonteCarlo, ThreadCountDoesNotChangeResults) {
  SweepConfig sweep;
  sweep.gaps = {35.0, 55.0};
  sweep.w_ts = {1.0, 25.0};
  sweep.runs = 8;
  sweep.threads = 1;
  const std::string serial = stats_csv(monte_carlo(sweep, SimConfig{}), false);
  sweep.threads = 4;
  const std::string parallel = stats_csv(monte_carlo(sweep, SimConfig{}), false);
  EXPECT_EQ(serial, parallel);
  EXPECT_EQ(serial.substr(0, serial.find('\n')),
            "gap_m,w_t,runs,p_gap,p_before,p_gentle,p_failsafe,collisions,"
            "mean_failsafe_decel,max_failsafe_decel,mean_cycle_ms");
}

TEST(MonteCarlo, RejectsZeroRuns) {
  SweepConfig sweep;
  sweep.runs = 0;
  EXPECT_THROW(monte_carlo(sweep, SimConfig{}), std::invalid_argument);
}

TEST(SimConfig, Validate) {
  SimConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.dt_cycle = 0.1;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg = SimConfig{};
  cfg.scenario.gap_size = 0.0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace merge_planner
