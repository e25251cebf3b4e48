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

// Replanning toward a noisy target: every cycle a new plan is solved from the
// executed state toward the perturbed target and only its first cycle is
// driven. After the lock time the target is frozen and the rest is a single
// jerk-optimal plan.

#ifndef MERGE_PLANNER_REPLAY_HPP_
#define MERGE_PLANNER_REPLAY_HPP_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <vector>

#include "merge_planner/csv.hpp"
#include "merge_planner/trajectory.hpp"

namespace merge_planner {

struct TargetNoise {
  double t = 0.0;
  double ds = 0.0;
  double dv = 0.0;
};

struct ReplayConfig {
  State1D x0{0.0, 30.0 / 3.6, 0.0};
  State1D nominal_target{85.0, 10.0, 0.0};
  double t_arrival = 9.5;   // absolute time of the target
  double dt_cycle = 0.08;
  double lock_time = 7.44;
  double sample_dt = 0.01;  // resolution of the exported executed trajectory

  void validate() const;
};

struct ReplayResult {
  std::vector<TrajectoryRow> executed;  // absolute time
  double jerk_energy = 0.0;             // int u^2 dt over the executed plan
  /// Plans in the order they were driven; plans[k] starts at plan_start[k].
  std::vector<Trajectory> plans;
  std::vector<double> plan_start;
  std::size_t lock_index = 0;  // index of the first locked plan
};

/// Noise value in effect at time t: the latest sample with sample.t <= t
/// (zero before the first sample).
TargetNoise noise_at(const std::vector<TargetNoise>& noise, double t);

ReplayResult replay_noisy_target(const ReplayConfig& cfg,
                                 const std::vector<TargetNoise>& noise,
                                 double w_t);

/// Random target noise on the replanning grid: an autoregressive offset
/// whose spread shrinks toward the arrival time (tens of meters early, about
/// a meter late) and which sometimes holds its previous value.
std::vector<TargetNoise> generate_target_noise(const ReplayConfig& cfg,
                                               std::uint64_t seed);

/// Reads `t,ds,dv` rows (header required). Throws std::runtime_error naming
/// the offending line.
std::vector<TargetNoise> read_noise_csv(std::istream& in);
std::vector<TargetNoise> read_noise_csv(const std::filesystem::path& path);

}  // namespace merge_planner

#endif  // MERGE_PLANNER_REPLAY_HPP_
