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

#include "merge_planner/planner.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>

#include "merge_planner/csv.hpp"

namespace merge_planner {
namespace {

std::size_t arrival_samples(const PlannerConfig& config) {
  return static_cast<std::size_t>(
      std::floor(config.horizon / config.dt_f + 1e-9));
}

double arrival_time(std::size_t k, const PlannerConfig& config) {
  return static_cast<double>(k) * config.dt_f;
}

// Strict improvement test for the argmin; equal cost prefers the earlier
// arrival, and otherwise the earlier evaluated candidate stays.
bool better(const MergeCandidate& lhs, const MergeCandidate& rhs) {
  if (lhs.cost != rhs.cost) return lhs.cost < rhs.cost;
  return lhs.t_f < rhs.t_f;
}

DecisionClass decision_class_for(OptionKind kind) {
  return kind == OptionKind::kBeforeFirst ? DecisionClass::kMergeBeforeFirst
                                          : DecisionClass::kMergeIntoGap;
}

}  // namespace

void LocalMap::validate() const {
  if (!(s_yield <= s_merge) || !(v_max > 0.0) || !(sight_range > 0.0) ||
      !(passed_clearance >= 0.0)) {
    throw std::invalid_argument(
        "local map needs s_yield <= s_merge, v_max > 0, sight_range > 0");
  }
}

void PlannerConfig::validate() const {
  limits.validate();
  safety.validate();
  if (!(w_t >= 1.0)) {
    throw std::invalid_argument("w_t must be >= 1");
  }
  if (!(a_min_comfort < 0.0) || !(dt_f > 0.0) || !(horizon > 0.0) ||
      !(dt_check > 0.0) || !(dt_pnr > 0.0) || !(dt_cycle > 0.0) ||
      !(dt_pred > 0.0) || !(q >= 0.0) || !(gentle_stop_t_max > 0.0) ||
      !(gentle_stop_dt > 0.0) || !(ego_length > 0.0)) {
    throw std::invalid_argument("planner config has a non-positive step");
  }
}

std::string_view to_string(OptionKind kind) {
  switch (kind) {
    case OptionKind::kBeforeFirst:
      return "BeforeFirst";
    case OptionKind::kIntoGap:
      return "IntoGap";
    case OptionKind::kBehindLast:
      return "BehindLast";
  }
  return "Unknown";
}

std::string_view to_string(DecisionClass cls) {
  switch (cls) {
    case DecisionClass::kMergeBeforeFirst:
      return "MergeBeforeFirst";
    case DecisionClass::kMergeIntoGap:
      return "MergeIntoGap";
    case DecisionClass::kGentleStop:
      return "GentleStop";
    case DecisionClass::kFailSafe:
      return "FailSafe";
    case DecisionClass::kLocked:
      return "Locked";
  }
  return "Unknown";
}

std::vector<ObjectEstimate> preprocess(const std::vector<ObjectEstimate>& objects,
                                       const LocalMap& map) {
  std::vector<ObjectEstimate> relevant;
  relevant.reserve(objects.size());
  for (const auto& obj : objects) {
    const double to_merge = map.s_merge - obj.s_hat;
    if (to_merge > map.sight_range) continue;
    if (-to_merge > map.passed_clearance) continue;
    relevant.push_back(obj);
  }
  std::stable_sort(relevant.begin(), relevant.end(),
                   [](const ObjectEstimate& a, const ObjectEstimate& b) {
                     if (a.s_hat != b.s_hat) return a.s_hat > b.s_hat;
                     return a.id < b.id;
                   });
  return relevant;
}

std::vector<MergeTarget> enumerate_gap_targets(
    const PredictionTrack& track_ahead,
    const std::optional<PredictionTrack>& track_behind, const LocalMap& map,
    const PlannerConfig& config) {
  std::vector<MergeTarget> targets;
  const double p_max = config.safety.p_residual_max;
  bool window_open = false;
  for (std::size_t k = 1; k <= arrival_samples(config); ++k) {
    const double t_f = arrival_time(k, config);
    const ObjectEstimate& xa = track_ahead.at(t_f);
    const ObjectEstimate* xb = track_behind ? &track_behind->at(t_f) : nullptr;
    const SafetyPositions corridor = safety_positions(
        map.s_merge, xa.v_hat, xb ? xb->v_hat : 0.0, xa.length,
        xb ? xb->length : 0.0, config.safety);
    const double p_a = risk_ahead(xa.s_hat, xa.cov(0, 0), corridor.ahead);
    if (!window_open) {
      if (p_a > p_max) continue;
      window_open = true;
    }
    const double p_b =
        xb ? risk_behind(xb->s_hat, xb->cov(0, 0), corridor.behind) : 0.0;
    if (p_b > p_max) break;
    if (p_a > p_max) continue;
    targets.push_back({t_f, {map.s_merge, std::max(0.0, xa.v_hat), 0.0}, p_a, p_b});
  }
  return targets;
}

std::vector<MergeTarget> enumerate_before_first_targets(
    const std::optional<PredictionTrack>& track_first, const State1D& ego,
    const LocalMap& map, const PlannerConfig& config) {
  const std::size_t n = arrival_samples(config);
  const double p_max = config.safety.p_residual_max;
  std::vector<double> p_b(n + 1, 0.0);
  std::size_t k_end = n;
  if (track_first) {
    bool any = false;
    for (std::size_t k = 1; k <= n; ++k) {
      const ObjectEstimate& xb = track_first->at(arrival_time(k, config));
      const SafetyPositions corridor = safety_positions(
          map.s_merge, 0.0, xb.v_hat, 0.0, xb.length, config.safety);
      p_b[k] = risk_behind(xb.s_hat, xb.cov(0, 0), corridor.behind);
      if (p_b[k] <= p_max) {
        k_end = k;
        any = true;
      }
    }
    if (!any) return {};
  }

  std::vector<MergeTarget> targets;
  const State1D target{map.s_merge, map.v_max, 0.0};
  bool found_valid = false;
  for (std::size_t k = k_end; k >= 1; --k) {
    if (p_b[k] > p_max) continue;
    const double t_f = arrival_time(k, config);
    bool valid = false;
    try {
      const Trajectory traj = solve_time_weighted(ego, target, t_f, config.w_t);
      valid = check_constraints(traj, config.limits, config.dt_check).valid;
    } catch (const std::exception&) {
      valid = false;
    }
    if (valid) {
      found_valid = true;
      targets.push_back({t_f, target, 0.0, p_b[k]});
    } else if (found_valid) {
      break;
    }
  }
  return targets;
}

std::optional<MergeCandidate> evaluate_option(
    const State1D& ego, const MergeTarget& target, OptionKind kind,
    int gap_index, const LocalMap& map, const PlannerConfig& config,
    std::string* reason) {
  if (!(target.t_f > 0.0)) {
    if (reason) *reason = "non-positive arrival time";
    return std::nullopt;
  }
  MergeCandidate cand;
  try {
    cand.trajectory =
        solve_time_weighted(ego, target.target, target.t_f, config.w_t);
  } catch (const std::exception& e) {
    if (reason) *reason = e.what();
    return std::nullopt;
  }
  const ConstraintReport report =
      check_constraints(cand.trajectory, config.limits, config.dt_check);
  if (!report.valid) {
    if (reason) {
      *reason = std::string(to_string(report.first_violation->kind)) +
                " at t=" + std::to_string(report.first_violation->t);
    }
    return std::nullopt;
  }
  cand.t_f = target.t_f;
  cand.target = target.target;
  cand.pnr = compute_pnr(cand.trajectory, map.s_yield, config.limits.b_max,
                         config.dt_pnr);
  cand.p_risk_a = target.p_a;
  cand.p_risk_b = target.p_b;
  cand.jerk_cost = jerk_cost(cand.trajectory);
  cand.cost = cand.jerk_cost + config.safety.w_risk_a * target.p_a +
              config.safety.w_risk_b * target.p_b;
  cand.option_kind = kind;
  cand.gap_index = gap_index;
  return cand;
}

std::optional<Trajectory> plan_gentle_stop(const State1D& ego,
                                           const LocalMap& map,
                                           const PlannerConfig& config) {
  if (ego.s > map.s_yield + 1e-9) return std::nullopt;
  const State1D target{map.s_yield, 0.0, 0.0};
  const double t_min = std::max(
      1.5 * std::max(0.0, ego.v) / std::abs(config.a_min_comfort),
      config.gentle_stop_dt);
  std::optional<Trajectory> best;
  double best_cost = 0.0;
  for (int k = 0;; ++k) {
    const double t_f = t_min + k * config.gentle_stop_dt;
    if (t_f > config.gentle_stop_t_max + 1e-9) break;
    Trajectory traj;
    try {
      traj = solve_quintic(ego, target, t_f);
    } catch (const std::exception&) {
      continue;
    }
    if (!check_constraints(traj, config.a_min_comfort, config.limits.a_max,
                           config.limits.v_max, config.dt_check)
             .valid) {
      continue;
    }
    const double cost = jerk_cost(traj);
    if (!best || cost < best_cost) {
      best = traj;
      best_cost = cost;
    }
  }
  return best;
}

FailSafePlan fail_safe(const State1D& ego, const LocalMap& map, double b_max) {
  FailSafePlan plan;
  if (!(ego.v > 0.0)) {
    plan.trajectory = Trajectory::constant_deceleration({ego.s, 0.0, 0.0}, 0.0);
    return plan;
  }
  const double distance = map.s_yield - ego.s;
  double b = b_max;
  if (distance > 0.0) {
    b = ego.v * ego.v / (2.0 * distance);
    if (b > b_max) {
      b = b_max;
      plan.emergency = true;
    }
  } else {
    plan.emergency = true;
  }
  plan.b = b;
  plan.trajectory = Trajectory::constant_deceleration(ego, b);
  return plan;
}

PlanningResult plan_cycle(const PlanningInput& input, const LocalMap& map,
                          const PlannerConfig& config, const LockState& lock) {
  PlanningResult result;
  if (lock.engaged) {
    const double elapsed = std::max(0.0, input.t_now - lock.t_lock);
    if (elapsed < lock.decision.trajectory.horizon()) {
      result.decision = lock.decision;
      result.decision.cls = DecisionClass::kLocked;
      result.decision.trajectory =
          lock.decision.trajectory.shifted(elapsed);
      result.decision.lock_engaged = true;
      result.lock = lock;
      return result;
    }
  }

  const std::vector<ObjectEstimate> objects = preprocess(input.objects, map);
  std::vector<PredictionTrack> tracks;
  tracks.reserve(objects.size());
  for (const auto& obj : objects) {
    const PredictionTrack* given = nullptr;
    if (input.predictions) {
      for (const auto& track : *input.predictions) {
        if (track.id() == obj.id) {
          given = &track;
          break;
        }
      }
    }
    tracks.push_back(given ? *given
                           : predict_horizon(obj, config.horizon,
                                             config.dt_pred, config.q));
  }

  auto evaluate_all = [&](const std::vector<MergeTarget>& targets,
                          OptionKind kind, int gap_index) {
    for (const auto& target : targets) {
      if (auto cand = evaluate_option(input.ego, target, kind, gap_index, map,
                                      config)) {
        result.candidates.push_back(std::move(*cand));
      }
    }
  };

  const std::optional<PredictionTrack> first =
      tracks.empty() ? std::nullopt : std::optional<PredictionTrack>(tracks[0]);
  evaluate_all(enumerate_before_first_targets(first, input.ego, map, config),
               OptionKind::kBeforeFirst, -1);
  for (std::size_t i = 0; i + 1 < tracks.size(); ++i) {
    evaluate_all(enumerate_gap_targets(tracks[i], tracks[i + 1], map, config),
                 OptionKind::kIntoGap, static_cast<int>(i));
  }
  if (!tracks.empty()) {
    evaluate_all(
        enumerate_gap_targets(tracks.back(), std::nullopt, map, config),
        OptionKind::kBehindLast, static_cast<int>(tracks.size()) - 1);
  }

  const MergeCandidate* best = nullptr;
  for (const auto& cand : result.candidates) {
    if (!best || better(cand, *best)) best = &cand;
  }

  Decision& decision = result.decision;
  if (best) {
    decision.cls = decision_class_for(best->option_kind);
    decision.trajectory = best->trajectory;
    decision.candidate = *best;
    // Lock when the next cycle would start past the point of no return.
    if (!best->pnr || best->pnr->t < config.dt_cycle) {
      decision.lock_engaged = true;
      result.lock.engaged = true;
      result.lock.t_lock = input.t_now;
      result.lock.decision = decision;
    }
    return result;
  }

  if (auto stop = plan_gentle_stop(input.ego, map, config)) {
    decision.cls = DecisionClass::kGentleStop;
    decision.trajectory = *stop;
    return result;
  }

  const FailSafePlan fs = fail_safe(input.ego, map, config.limits.b_max);
  decision.cls = DecisionClass::kFailSafe;
  decision.trajectory = fs.trajectory;
  decision.emergency = fs.emergency;
  decision.fail_safe_decel = fs.b;
  return result;
}

std::string decision_log_header() {
  return "cycle,t_now,class,t_f,cost,p_a,p_b,lock";
}

std::string decision_log_row(int cycle, double t_now, const Decision& decision) {
  double t_f = decision.trajectory.horizon();
  double cost = 0.0;
  double p_a = 0.0;
  double p_b = 0.0;
  if (decision.candidate) {
    t_f = decision.candidate->t_f;
    cost = decision.candidate->cost;
    p_a = decision.candidate->p_risk_a;
    p_b = decision.candidate->p_risk_b;
  } else if (decision.cls == DecisionClass::kGentleStop) {
    cost = jerk_cost(decision.trajectory);
  }
  return std::to_string(cycle) + "," + format_double(t_now) + "," +
         std::string(to_string(decision.cls)) + "," + format_double(t_f) +
         "," + format_double(cost) + "," + format_double(p_a) + "," +
         format_double(p_b) + "," + (decision.lock_engaged ? "1" : "0");
}

}  // namespace merge_planner
