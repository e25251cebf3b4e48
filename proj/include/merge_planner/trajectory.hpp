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

#ifndef MERGE_PLANNER_TRAJECTORY_HPP_
#define MERGE_PLANNER_TRAJECTORY_HPP_

#include <array>
#include <string_view>
#include <variant>

namespace merge_planner {

/// Longitudinal state along a path: position [m], velocity [m/s],
/// acceleration [m/s^2].
struct State1D {
  double s = 0.0;
  double v = 0.0;
  double a = 0.0;

  friend bool operator==(const State1D&, const State1D&) = default;
};

bool is_finite(const State1D& x);

/// Coefficients of the time-weighted jerk-optimal solution, whose jerk has
/// the long-division form u(t) = quadratic + beta / (w + t). With x = t / w,
///
///   beta / (w + t) = beta / w (1 - x + x^2) - beta / w  x^3 / (1 + x),
///
/// and the quadratic Taylor part is absorbed into the polynomial:
///
///   s(t) = a1 t^5 + a2 t^4 + a3 t^3 + a4 t^2 + a5 t + a6 + beta r(t),
///   r'''(t) = -x^3 / (w (1 + x)),   r(0) = r'(0) = r''(0) = 0.
///
/// Unlike the plain logarithmic basis this stays well conditioned when the
/// horizon is short compared to w.
struct TimeWeightedCoefficients {
  std::array<double, 6> alpha{};
  double beta = 0.0;
  double w_t = 1.0;
  double t_f = 0.0;
};

/// s(t) = c0 + c1 t + c2 t^2 + c3 t^3 + c4 t^4 + c5 t^5.
struct QuinticCoefficients {
  std::array<double, 6> c{};
  double t_f = 0.0;
};

/// Braking with constant deceleration b from s0 until standstill at s_stop.
struct ConstantDecelerationParams {
  double b = 0.0;
  double s_stop = 0.0;
  double t_stop = 0.0;
};

enum class TrajectoryKind { kTimeWeighted, kQuintic, kConstantDeceleration };

std::string_view to_string(TrajectoryKind kind);

/// Full state plus jerk at one instant.
struct TrajectorySample {
  State1D state;
  double jerk = 0.0;
};

/// The basis r(t) of TimeWeightedCoefficients with its first three
/// derivatives, returned as state (r, r', r'') and jerk r'''. Requires
/// t >= 0 and w_t >= 1.
TrajectorySample time_weight_basis(double t, double w_t);

/// Analytic longitudinal motion plan.
///
/// A trajectory may carry a time offset (see `shifted`): the coefficients are
/// never rewritten, evaluation at local time t reads the underlying plan at
/// t + offset. This keeps a locked plan bit-identical across cycles.
class Trajectory {
 public:
  using Coefficients = std::variant<TimeWeightedCoefficients,
                                    QuinticCoefficients,
                                    ConstantDecelerationParams>;

  Trajectory();  // stationary at the origin, zero horizon

  static Trajectory time_weighted(const TimeWeightedCoefficients& coeffs,
                                  const State1D& x0, const State1D& xf);
  static Trajectory quintic(const QuinticCoefficients& coeffs,
                            const State1D& x0, const State1D& xf);
  static Trajectory constant_deceleration(const State1D& x0, double b);

  TrajectoryKind kind() const;
  const Coefficients& coefficients() const { return coefficients_; }

  /// Remaining horizon, i.e. underlying t_f minus the time offset.
  double horizon() const;
  double time_offset() const { return offset_; }
  /// Horizon of the underlying (unshifted) plan.
  double full_horizon() const;

  /// State at local time 0 and at the end of the horizon.
  State1D start() const;
  State1D end() const;

  /// Evaluates at local time t in [0, horizon()]. ConstantDeceleration
  /// accepts any t >= 0 and holds the stop state afterwards.
  /// Throws std::out_of_range outside the admissible interval.
  TrajectorySample eval(double t) const;

  /// Same plan seen from `dt` seconds later.
  Trajectory shifted(double dt) const;

  friend bool operator==(const Trajectory&, const Trajectory&);

 private:
  TrajectorySample eval_underlying(double t) const;

  Coefficients coefficients_;
  State1D x0_;
  State1D xf_;
  double offset_ = 0.0;
};

bool operator==(const Trajectory& lhs, const Trajectory& rhs);

}  // namespace merge_planner

#endif  // MERGE_PLANNER_TRAJECTORY_HPP_
