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

// Closed-form jerk-optimal and time-weighted jerk-optimal trajectory
// generation for the triple integrator s''' = u, plus the cost, constraint
// and point-of-no-return queries the planner runs on every candidate.

#ifndef MERGE_PLANNER_TRAJGEN_HPP_
#define MERGE_PLANNER_TRAJGEN_HPP_

#include <optional>
#include <string_view>

#include "merge_planner/trajectory.hpp"

namespace merge_planner {

struct DynamicLimits {
  double a_min = -4.0;        // m/s^2, < 0
  double a_max = 2.5;         // m/s^2, > 0
  double v_max = 50.0 / 3.6;  // m/s
  double b_max = 4.0;         // maximum acceptable fail-safe deceleration

  void validate() const;
};

/// Default sampling step of check_constraints [s].
inline constexpr double kDefaultConstraintCheckStep = 0.2;
/// check_constraints never uses fewer sample intervals than this.
inline constexpr double kMinConstraintIntervals = 20.0;
/// Default sampling step of compute_pnr [s].
inline constexpr double kDefaultPnrStep = 0.08;

/// Unique quintic connecting x0 and xf in t_f seconds; it minimizes
/// the integral of u^2/2. Throws std::invalid_argument on non-finite input
/// or t_f <= 0.
Trajectory solve_quintic(const State1D& x0, const State1D& xf, double t_f);

/// Minimizer of  int_0^t_f 1/2 ((w_t - 1)/(1 + t) + 1) u(t)^2 dt  subject to
/// the six boundary conditions.
///
/// Optimality gives u = -(1+t)/(w_t+t) lambda3(t) with a quadratic costate
/// lambda3; dividing by (w_t + t) leaves a quadratic quotient plus
/// beta/(w_t + t), and the division is exact only if the numerator
/// (1 + t) lambda3 vanishes at t = -1, i.e. u(-1) = 0. In the basis of
/// TimeWeightedCoefficients this reads
/// (w_t - 1)(60 a1 - 24 a2 + 6 a3) + beta / w_t^3 = 0. That relation and the
/// six boundary rows form a 7x7 linear system in (alpha1..alpha6, beta),
/// which is equilibrated and solved with partial pivoting.
///
/// Throws std::invalid_argument for t_f <= 0, w_t < 1 or non-finite input and
/// std::domain_error if the system is numerically singular.
Trajectory solve_time_weighted(const State1D& x0, const State1D& xf,
                               double t_f, double w_t);

/// int_0^t_f 1/2 u^2 dt. Exact for quintics and constant deceleration,
/// adaptive Gauss-Kronrod (rel. tol. 1e-8) for time-weighted plans.
double jerk_cost(const Trajectory& traj);

/// int_0^t_f 1/2 ((w_t - 1)/(1 + t) + 1) u^2 dt over the remaining horizon.
/// Throws std::invalid_argument if w_t < 1.
double time_weighted_cost(const Trajectory& traj, double w_t);

/// int_t0^t1 u^2 dt (no 1/2) over a local time window; used to accumulate
/// the jerk energy of an executed trajectory.
double jerk_energy(const Trajectory& traj, double t0, double t1);

enum class ViolationKind {
  kAccelerationBelowMin,
  kAccelerationAboveMax,
  kVelocityNegative,
  kVelocityAboveMax,
};

std::string_view to_string(ViolationKind kind);

struct ConstraintViolation {
  double t = 0.0;
  ViolationKind kind = ViolationKind::kVelocityNegative;
  double value = 0.0;
};

struct ConstraintReport {
  bool valid = true;
  std::optional<ConstraintViolation> first_violation;
};

/// Samples t = 0, h, 2h, ... and t_f with h = min(dt_check,
/// t_f / kMinConstraintIntervals) and reports the first
/// sample outside a in [a_min, a_max] or v in [0, v_max]. Violations between
/// samples are not detected.
ConstraintReport check_constraints(const Trajectory& traj,
                                   const DynamicLimits& limits,
                                   double dt_check = kDefaultConstraintCheckStep);

/// Same test with explicit bounds; the planner uses this for comfort bounds.
ConstraintReport check_constraints(const Trajectory& traj, double a_min,
                                   double a_max, double v_max,
                                   double dt_check);

struct PointOfNoReturn {
  double t = 0.0;
  State1D state;  // trajectory state at t
};

/// Position of the braking envelope for speed v: the last position from which
/// braking at b_max still stops at s_yield.
double braking_envelope_position(double s_yield, double v, double b_max);

/// Largest grid time t (grid 0, dt, 2dt, ..., plus t_f) with
/// s(t) <= s_yield - v(t)^2 / (2 b_max). Empty if no grid point qualifies.
std::optional<PointOfNoReturn> compute_pnr(const Trajectory& traj,
                                           double s_yield, double b_max,
                                           double dt = kDefaultPnrStep);

}  // namespace merge_planner

#endif  // MERGE_PLANNER_TRAJGEN_HPP_
