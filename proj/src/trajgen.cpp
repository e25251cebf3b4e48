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

#include "merge_planner/trajgen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace merge_planner {
namespace {

constexpr double kQuadratureTolerance = 1e-8;
constexpr unsigned kQuadratureMaxDepth = 15;
// Feasibility checks compare sampled values against the bounds with this
// slack so that a trajectory ending exactly on a bound (v = 0 at a stop) is
// not rejected for rounding.
constexpr double kBoundSlack = 1e-9;

template <typename F>
double integrate(F&& f, double t0, double t1) {
  if (!(t1 > t0)) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, t0, t1, kQuadratureMaxDepth, kQuadratureTolerance);
}

void require_finite(const State1D& x, const char* what) {
  if (!is_finite(x)) {
    throw std::invalid_argument(std::string(what) + " state is not finite");
  }
}

// Antiderivative of (p0 + p1 t + p2 t^2)^2.
double quadratic_square_antiderivative(double p0, double p1, double p2,
                                       double t) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  return p0 * p0 * t + p0 * p1 * t2 + (p1 * p1 + 2.0 * p0 * p2) * t3 / 3.0 +
         0.5 * p1 * p2 * t3 * t + 0.2 * p2 * p2 * t3 * t2;
}

// Times 0, dt, 2dt, ... <= horizon, plus the horizon itself.
template <typename Visit>
void for_each_sample(double horizon, double dt, Visit&& visit) {
  const auto n = static_cast<long>(std::floor(horizon / dt + 1e-9));
  for (long k = 0; k <= n; ++k) {
    const double t = std::min(static_cast<double>(k) * dt, horizon);
    if (!visit(t)) return;
  }
  if (static_cast<double>(n) * dt < horizon - 1e-12) visit(horizon);
}

}  // namespace

void DynamicLimits::validate() const {
  if (!(a_min < 0.0) || !(a_max > 0.0) || !(v_max > 0.0) || !(b_max > 0.0)) {
    throw std::invalid_argument(
        "dynamic limits need a_min < 0 < a_max, v_max > 0 and b_max > 0");
  }
}

Trajectory solve_quintic(const State1D& x0, const State1D& xf, double t_f) {
  require_finite(x0, "initial");
  require_finite(xf, "final");
  if (!std::isfinite(t_f) || !(t_f > 0.0)) {
    throw std::invalid_argument("quintic horizon must be positive, got " +
                                std::to_string(t_f));
  }
  const double T = t_f;
  const double T2 = T * T;
  const double T3 = T2 * T;
  const double ds = xf.s - (x0.s + x0.v * T + 0.5 * x0.a * T2);
  const double dv = xf.v - (x0.v + x0.a * T);
  const double da = xf.a - x0.a;

  QuinticCoefficients q;
  q.t_f = t_f;
  q.c[0] = x0.s;
  q.c[1] = x0.v;
  q.c[2] = 0.5 * x0.a;
  q.c[3] = (10.0 * ds - 4.0 * dv * T + 0.5 * da * T2) / T3;
  q.c[4] = (-15.0 * ds + 7.0 * dv * T - da * T2) / (T3 * T);
  q.c[5] = (6.0 * ds - 3.0 * dv * T + 0.5 * da * T2) / (T3 * T2);
  return Trajectory::quintic(q, x0, xf);
}

Trajectory solve_time_weighted(const State1D& x0, const State1D& xf,
                               double t_f, double w_t) {
  require_finite(x0, "initial");
  require_finite(xf, "final");
  if (!std::isfinite(t_f) || !(t_f > 0.0)) {
    throw std::invalid_argument("time-weighted horizon must be positive, got " +
                                std::to_string(t_f));
  }
  if (!std::isfinite(w_t) || !(w_t >= 1.0)) {
    throw std::invalid_argument("time weight must satisfy w_t >= 1, got " +
                                std::to_string(w_t));
  }

  using Matrix7 = Eigen::Matrix<double, 7, 7>;
  using Vector7 = Eigen::Matrix<double, 7, 1>;

  const TrajectorySample gT = time_weight_basis(t_f, w_t);
  const double T = t_f;
  const double T2 = T * T;
  const double T3 = T2 * T;
  const double T4 = T3 * T;
  const double T5 = T4 * T;
  const double k = w_t - 1.0;

  Matrix7 A;
  // clang-format off
  A << 0.0,       0.0,       0.0,      0.0,     0.0, 1.0, 0.0,
       0.0,       0.0,       0.0,      0.0,     1.0, 0.0, 0.0,
       0.0,       0.0,       0.0,      2.0,     0.0, 0.0, 0.0,
       T5,        T4,        T3,       T2,      T,   1.0, gT.state.s,
       5.0 * T4,  4.0 * T3,  3.0 * T2, 2.0 * T, 1.0, 0.0, gT.state.v,
       20.0 * T3, 12.0 * T2, 6.0 * T,  2.0,     0.0, 0.0, gT.state.a,
       60.0 * k,  -24.0 * k, 6.0 * k,  0.0,     0.0, 0.0, 1.0 / (w_t * w_t * w_t);
  // clang-format on
  Vector7 b;
  b << x0.s, x0.v, x0.a, xf.s, xf.v, xf.a, 0.0;

  // Equilibrate rows then columns; the column scales play the role of the
  // powers of t_f in a nondimensional time.
  for (int r = 0; r < 7; ++r) {
    const double m = A.row(r).cwiseAbs().maxCoeff();
    A.row(r) /= m;
    b(r) /= m;
  }
  Vector7 col_scale;
  for (int c = 0; c < 7; ++c) {
    const double m = A.col(c).cwiseAbs().maxCoeff();
    col_scale(c) = m > 0.0 ? m : 1.0;
    A.col(c) /= col_scale(c);
  }

  const Eigen::PartialPivLU<Matrix7> lu(A);
  if (!(lu.rcond() > 1e-14)) {
    throw std::domain_error("time-weighted boundary system is singular");
  }
  const Vector7 y = lu.solve(b);
  const Vector7 x = y.cwiseQuotient(col_scale);
  if (!x.allFinite()) {
    throw std::domain_error("time-weighted boundary system is singular");
  }

  TimeWeightedCoefficients c;
  for (int i = 0; i < 6; ++i) c.alpha[static_cast<std::size_t>(i)] = x(i);
  c.beta = w_t == 1.0 ? 0.0 : x(6);
  c.w_t = w_t;
  c.t_f = t_f;
  return Trajectory::time_weighted(c, x0, xf);
}

double jerk_cost(const Trajectory& traj) {
  const double t0 = traj.time_offset();
  const double t1 = traj.full_horizon();
  switch (traj.kind()) {
    case TrajectoryKind::kConstantDeceleration:
      return 0.0;
    case TrajectoryKind::kQuintic: {
      const auto& c = std::get<QuinticCoefficients>(traj.coefficients()).c;
      const double p0 = 6.0 * c[3];
      const double p1 = 24.0 * c[4];
      const double p2 = 60.0 * c[5];
      return 0.5 * (quadratic_square_antiderivative(p0, p1, p2, t1) -
                    quadratic_square_antiderivative(p0, p1, p2, t0));
    }
    case TrajectoryKind::kTimeWeighted:
      break;
  }
  return 0.5 * jerk_energy(traj, 0.0, traj.horizon());
}

double time_weighted_cost(const Trajectory& traj, double w_t) {
  if (!std::isfinite(w_t) || !(w_t >= 1.0)) {
    throw std::invalid_argument("time weight must satisfy w_t >= 1, got " +
                                std::to_string(w_t));
  }
  if (traj.kind() == TrajectoryKind::kConstantDeceleration) return 0.0;
  if (w_t == 1.0) return jerk_cost(traj);
  return integrate(
      [&traj, w_t](double t) {
        const double u = traj.eval(t).jerk;
        return 0.5 * ((w_t - 1.0) / (1.0 + t) + 1.0) * u * u;
      },
      0.0, traj.horizon());
}

double jerk_energy(const Trajectory& traj, double t0, double t1) {
  if (traj.kind() == TrajectoryKind::kConstantDeceleration) return 0.0;
  t1 = std::min(t1, traj.horizon());
  t0 = std::max(t0, 0.0);
  if (!(t1 > t0)) return 0.0;
  if (traj.kind() == TrajectoryKind::kQuintic) {
    const auto& c = std::get<QuinticCoefficients>(traj.coefficients()).c;
    const double off = traj.time_offset();
    return quadratic_square_antiderivative(6.0 * c[3], 24.0 * c[4], 60.0 * c[5],
                                           t1 + off) -
           quadratic_square_antiderivative(6.0 * c[3], 24.0 * c[4], 60.0 * c[5],
                                           t0 + off);
  }
  return integrate(
      [&traj](double t) {
        const double u = traj.eval(t).jerk;
        return u * u;
      },
      t0, t1);
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kAccelerationBelowMin:
      return "acceleration_below_min";
    case ViolationKind::kAccelerationAboveMax:
      return "acceleration_above_max";
    case ViolationKind::kVelocityNegative:
      return "velocity_negative";
    case ViolationKind::kVelocityAboveMax:
      return "velocity_above_max";
  }
  return "unknown";
}

ConstraintReport check_constraints(const Trajectory& traj, double a_min,
                                   double a_max, double v_max,
                                   double dt_check) {
  if (!(dt_check > 0.0)) {
    throw std::invalid_argument("constraint check step must be positive");
  }
  ConstraintReport report;
  // Short plans still get interior samples.
  const double step = std::min(dt_check, traj.horizon() / kMinConstraintIntervals);
  for_each_sample(traj.horizon(), step > 0.0 ? step : dt_check, [&](double t) {
    const State1D x = traj.eval(t).state;
    std::optional<ViolationKind> kind;
    double value = 0.0;
    if (x.a < a_min - kBoundSlack) {
      kind = ViolationKind::kAccelerationBelowMin;
      value = x.a;
    } else if (x.a > a_max + kBoundSlack) {
      kind = ViolationKind::kAccelerationAboveMax;
      value = x.a;
    } else if (x.v < -kBoundSlack) {
      kind = ViolationKind::kVelocityNegative;
      value = x.v;
    } else if (x.v > v_max + kBoundSlack) {
      kind = ViolationKind::kVelocityAboveMax;
      value = x.v;
    }
    if (kind) {
      report.valid = false;
      report.first_violation = ConstraintViolation{t, *kind, value};
      return false;
    }
    return true;
  });
  return report;
}

ConstraintReport check_constraints(const Trajectory& traj,
                                   const DynamicLimits& limits,
                                   double dt_check) {
  return check_constraints(traj, limits.a_min, limits.a_max, limits.v_max,
                           dt_check);
}

double braking_envelope_position(double s_yield, double v, double b_max) {
  return s_yield - v * v / (2.0 * b_max);
}

std::optional<PointOfNoReturn> compute_pnr(const Trajectory& traj,
                                           double s_yield, double b_max,
                                           double dt) {
  if (!(dt > 0.0)) {
    throw std::invalid_argument("PNR sampling step must be positive");
  }
  if (!(b_max > 0.0)) {
    throw std::invalid_argument("b_max must be positive");
  }
  std::optional<PointOfNoReturn> pnr;
  for_each_sample(traj.horizon(), dt, [&](double t) {
    const State1D x = traj.eval(t).state;
    if (x.s <= braking_envelope_position(s_yield, x.v, b_max)) {
      pnr = PointOfNoReturn{t, x};
    }
    return true;
  });
  return pnr;
}

}  // namespace merge_planner
