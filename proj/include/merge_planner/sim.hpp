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

// Monte-Carlo merge simulation: IDM main-road traffic with acceleration and
// measurement noise, a Kalman-filtered ego view, the planner in the loop and a
// collision audit.

#ifndef MERGE_PLANNER_SIM_HPP_
#define MERGE_PLANNER_SIM_HPP_

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "merge_planner/planner.hpp"
#include "merge_planner/predict.hpp"

namespace merge_planner {

using Rng = std::mt19937_64;

/// Counter-based seed derivation (splitmix64 over the tuple), so that any
/// episode's streams can be rebuilt from (master, cell, run) without running
/// the episodes before it.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                          std::uint64_t b = 0, std::uint64_t stream = 0);

struct IdmParams {
  double v0 = 35.0 / 3.6;  // desired speed, m/s (traffic starts at 30 km/h)
  double T = 1.5;          // time headway, s
  double s0 = 2.0;         // jam distance, m
  double a = 1.4;          // maximum acceleration, m/s^2
  double b = 2.0;          // comfortable deceleration, m/s^2
  double delta = 4.0;
  double max_decel = 9.0;  // output clamp, m/s^2
};

inline constexpr double kFreeRoad = std::numeric_limits<double>::infinity();

/// IDM acceleration for bumper gap `gap` (kFreeRoad without leader) and
/// closing speed dv = v - v_leader. A non-positive gap returns -max_decel.
double idm_accel(double v, double gap, double dv, const IdmParams& params);

struct Vehicle {
  int id = 0;
  double s = 0.0;  // center position on the main-road axis
  double v = 0.0;
  double a = 0.0;
  double length = 4.0;
};

struct World {
  double t = 0.0;
  std::vector<Vehicle> others;  // main-road vehicles, lead first
  State1D ego;
  double ego_length = 4.0;
};

/// Advances the main-road vehicles by dt: IDM plus N(0, sigma_a^2)
/// acceleration noise, exact double-integrator update, v clamped at 0.
/// Main-road vehicles follow each other only; the ego is not a leader for
/// them, so traffic is identical for every ego policy given the seed.
/// The ego is moved by the episode runner.
World step_world(const World& world, double dt, Rng& rng,
                 const IdmParams& idm, double sigma_a);

struct Measurement {
  int id = 0;
  double s = 0.0;
  double length = 4.0;
};

/// Position of every main-road vehicle with N(0, sigma_s^2) noise.
std::vector<Measurement> measure(const World& world, Rng& rng, double sigma_s);

struct ScenarioConfig {
  double gap_size = 50.0;  // initial bumper gap between lead and follower
  double arrival_min = 5.0;
  double arrival_max = 13.0;
  double v_init_others = 30.0 / 3.6;
  double sigma_v = 0.3;
  double sigma_a = 0.25;
  double sigma_s = 0.25;
  double ego_v_min = 25.0 / 3.6;
  double ego_v_max = 35.0 / 3.6;
  double ego_start_offset = 70.0;  // distance of the ego start to the merge
  double vehicle_length = 4.0;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Lead vehicle placed so that it reaches the merge point after a uniform
/// arrival time; follower gap_size behind it; ego at the fixed start.
World generate_scenario(const ScenarioConfig& cfg, const LocalMap& map,
                        Rng& rng);

/// True if any main-road vehicle overlaps the ego, i.e. their center
/// distance is strictly below the mean length, once the ego front has
/// crossed the merge point.
bool in_collision(const World& world, double s_merge);
bool collision_check(const std::vector<World>& history, double s_merge);

struct SimConfig {
  ScenarioConfig scenario;
  LocalMap map;
  PlannerConfig planner;
  IdmParams idm;
  KalmanConfig kalman;
  double dt_sim = 0.08;
  double dt_cycle = 0.08;       // must be a multiple of dt_sim
  double gentle_stop_hold = 2.0;
  double max_time = 60.0;
  double stop_speed = 1e-2;     // ego counts as stopped below this speed
  bool record_history = false;
  bool record_decisions = false;

  void validate() const;
};

struct CycleTiming {
  DecisionClass cls = DecisionClass::kFailSafe;
  double ms = 0.0;
};

struct EpisodeResult {
  DecisionClass decision_class = DecisionClass::kGentleStop;
  bool collided = false;
  bool emergency = false;
  bool used_fail_safe = false;
  bool reached_pga = false;
  double max_decel_applied = 0.0;     // largest fail-safe deceleration
  double executed_jerk_energy = 0.0;  // int u^2 dt of the driven trajectory
  double end_time = 0.0;
  State1D final_ego;
  double pga_target_speed = 0.0;
  std::uint64_t seed = 0;
  std::vector<CycleTiming> cycle_times;
  std::vector<World> history;           // when record_history
  std::vector<std::string> decision_log;  // when record_decisions
};

/// Runs one episode with the scenario seed in cfg.scenario.seed.
EpisodeResult run_episode(const SimConfig& cfg);

/// Same, with the ego placed in an empty world (no main-road traffic).
EpisodeResult run_episode_without_traffic(const SimConfig& cfg);

struct SweepConfig {
  std::vector<double> gaps = {30, 35, 40, 45, 50, 55, 60, 65};
  std::vector<double> w_ts = {1.0, 2.0, 5.0, 12.5, 25.0};
  int runs = 1000;
  std::uint64_t master_seed = 1;
  int threads = 1;
};

struct StatsRow {
  double gap = 0.0;
  double w_t = 1.0;
  int runs = 0;
  double p_gap = 0.0;
  double p_before = 0.0;
  double p_gentle = 0.0;
  double p_failsafe = 0.0;
  int collisions = 0;
  int emergencies = 0;
  double mean_failsafe_decel = 0.0;
  double max_failsafe_decel = 0.0;
  double mean_cycle_ms = 0.0;
  std::vector<std::uint64_t> collision_seeds;
  std::vector<CycleTiming> cycle_times;  // all cycles of the cell
};

/// Seed of run `run`. It depends on neither the gap nor w_t, so every cell of
/// a sweep replays the same arrival times, speeds and noise draws and only
/// the swept parameter differs between cells.
std::uint64_t episode_seed(std::uint64_t master, int run);

/// Runs every (gap, w_t) cell. Episodes are distributed over `threads`
/// workers; results are reduced in cell/run order and do not depend on the
/// thread count. `progress` (optional) is called once per finished cell.
std::vector<StatsRow> monte_carlo(
    const SweepConfig& sweep, const SimConfig& base,
    const std::function<void(const StatsRow&)>& progress = {});

/// gap_m,w_t,runs,p_gap,p_before,p_gentle,p_failsafe,collisions,
/// mean_failsafe_decel,max_failsafe_decel,mean_cycle_ms
/// With include_timing = false the wall-clock column is written as 0 so the
/// file is a pure function of the configuration.
std::string stats_csv(const std::vector<StatsRow>& rows, bool include_timing);

}  // namespace merge_planner

#endif  // MERGE_PLANNER_SIM_HPP_
