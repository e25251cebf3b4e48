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

// Merge planning cycle. Every option (before the first vehicle, into each gap,
// behind the last vehicle) is sampled over arrival times, connected to the ego
// state with a time-weighted jerk-optimal trajectory and scored by jerk plus
// weighted residual risk. Without a valid option the ego stops gently at the
// yield line, and failing that brakes with constant deceleration. Once the
// selected plan passes its point of no return it is locked.

#ifndef MERGE_PLANNER_PLANNER_HPP_
#define MERGE_PLANNER_PLANNER_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "merge_planner/predict.hpp"
#include "merge_planner/risk.hpp"
#include "merge_planner/trajgen.hpp"

namespace merge_planner {

/// Positions on the ego path and the main-road axis share one arc-length
/// coordinate: the ego path joins the main road at s_merge.
struct LocalMap {
  double s_yield = 95.0;           // m
  double s_merge = 100.0;          // m
  double v_max = 30.0 / 3.6;       // map target speed, m/s
  double sight_range = 200.0;      // m, measured from the merge point
  double passed_clearance = 50.0;  // objects further past the merge are dropped

  void validate() const;
};

struct PlannerConfig {
  DynamicLimits limits;
  double a_min_comfort = -2.5;  // gentle-stop deceleration bound
  SafetyParams safety;
  double w_t = 1.0;
  double dt_f = 0.2;       // arrival-time sampling step
  double horizon = 15.0;   // longest arrival time considered
  double dt_check = kDefaultConstraintCheckStep;
  double dt_pnr = kDefaultPnrStep;
  double dt_cycle = 0.08;  // replanning period
  double dt_pred = 0.08;
  double q = 0.0625;       // prediction process noise
  double gentle_stop_t_max = 20.0;
  double gentle_stop_dt = 0.25;
  double ego_length = 4.0;

  void validate() const;
};

enum class OptionKind { kBeforeFirst, kIntoGap, kBehindLast };
enum class DecisionClass {
  kMergeBeforeFirst,
  kMergeIntoGap,
  kGentleStop,
  kFailSafe,
  kLocked,
};

std::string_view to_string(OptionKind kind);
std::string_view to_string(DecisionClass cls);

/// Arrival-time sample of one merge option.
struct MergeTarget {
  double t_f = 0.0;
  State1D target;
  double p_a = 0.0;
  double p_b = 0.0;
};

struct MergeCandidate {
  double t_f = 0.0;
  State1D target;  // (s_PGA, v_f, 0)
  Trajectory trajectory;
  std::optional<PointOfNoReturn> pnr;
  double p_risk_a = 0.0;
  double p_risk_b = 0.0;
  double jerk_cost = 0.0;
  double cost = 0.0;
  OptionKind option_kind = OptionKind::kBeforeFirst;
  int gap_index = -1;  // index of the vehicle ahead, -1 before the first
};

struct Decision {
  DecisionClass cls = DecisionClass::kFailSafe;
  Trajectory trajectory;
  std::optional<MergeCandidate> candidate;
  bool lock_engaged = false;
  bool emergency = false;       // fail-safe needed more than b_max
  double fail_safe_decel = 0.0;  // b of an applied fail-safe
};

/// Plan held fixed after the point of no return.
struct LockState {
  bool engaged = false;
  double t_lock = 0.0;
  Decision decision;
};

/// Objects worth considering, sorted by distance to the merge point (next
/// to arrive first). Objects beyond sight_range before the merge or more than
/// passed_clearance past it are removed.
std::vector<ObjectEstimate> preprocess(const std::vector<ObjectEstimate>& objects,
                                       const LocalMap& map);

/// Arrival-time samples for the gap behind `track_ahead`. Scanning forward
/// from dt_f, the first time with acceptable risk ahead opens the window and
/// the first time with unacceptable risk behind closes it. Without a vehicle
/// behind, p_b = 0 and the window runs to the horizon.
std::vector<MergeTarget> enumerate_gap_targets(
    const PredictionTrack& track_ahead,
    const std::optional<PredictionTrack>& track_behind, const LocalMap& map,
    const PlannerConfig& config);

/// Arrival-time samples for merging ahead of the first vehicle. The scan
/// starts from the latest time the first vehicle is far enough behind the PGA
/// and walks backward until the ego connection stops satisfying the dynamic
/// limits. Without any vehicle the scan starts at the horizon.
std::vector<MergeTarget> enumerate_before_first_targets(
    const std::optional<PredictionTrack>& track_first, const State1D& ego,
    const LocalMap& map, const PlannerConfig& config);

/// Connects ego to one target and scores it; empty if the trajectory cannot
/// be solved or violates the dynamic limits. On rejection `reason` (if
/// given) describes why.
std::optional<MergeCandidate> evaluate_option(
    const State1D& ego, const MergeTarget& target, OptionKind kind,
    int gap_index, const LocalMap& map, const PlannerConfig& config,
    std::string* reason = nullptr);

/// Minimal-jerk quintic to (s_yield, 0, 0) within comfort bounds, searched
/// over t_f from 1.5 v/|a_min_comfort| to gentle_stop_t_max. Empty when the
/// ego is past the yield line or no grid horizon is feasible.
std::optional<Trajectory> plan_gentle_stop(const State1D& ego,
                                           const LocalMap& map,
                                           const PlannerConfig& config);

struct FailSafePlan {
  Trajectory trajectory;
  bool emergency = false;
  double b = 0.0;
};

/// Constant deceleration to standstill at the yield line, capped at b_max.
FailSafePlan fail_safe(const State1D& ego, const LocalMap& map, double b_max);

struct PlanningInput {
  double t_now = 0.0;
  State1D ego;
  std::vector<ObjectEstimate> objects;
  /// Predictions matched to objects by id. Missing ones are computed.
  std::optional<std::vector<PredictionTrack>> predictions;
};

struct PlanningResult {
  Decision decision;
  LockState lock;
  /// All merge candidates that were constructed this cycle, in evaluation
  /// order; empty for locked cycles.
  std::vector<MergeCandidate> candidates;
};

/// One cycle of the planning scheme.
PlanningResult plan_cycle(const PlanningInput& input, const LocalMap& map,
                          const PlannerConfig& config, const LockState& lock);

/// Decision log row: cycle,t_now,class,t_f,cost,p_a,p_b,lock
std::string decision_log_header();
std::string decision_log_row(int cycle, double t_now, const Decision& decision);

}  // namespace merge_planner

#endif  // MERGE_PLANNER_PLANNER_HPP_
