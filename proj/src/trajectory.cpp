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

#include "merge_planner/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace merge_planner {
namespace {

// Slack accepted on the evaluation interval for accumulated rounding in
// callers that step time in increments.
constexpr double kTimeSlack = 1e-9;

// Below this x the closed forms lose digits to cancellation.
constexpr double kSeriesLimit = 0.5;

TrajectorySample eval_time_weighted(const TimeWeightedCoefficients& c,
                                    double t) {
  const auto& al = c.alpha;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double t4 = t3 * t;
  const double t5 = t4 * t;
  const TrajectorySample r = time_weight_basis(t, c.w_t);

  TrajectorySample out;
  out.state.s = al[0] * t5 + al[1] * t4 + al[2] * t3 + al[3] * t2 +
                al[4] * t + al[5] + c.beta * r.state.s;
  out.state.v = 5.0 * al[0] * t4 + 4.0 * al[1] * t3 + 3.0 * al[2] * t2 +
                2.0 * al[3] * t + al[4] + c.beta * r.state.v;
  out.state.a = 20.0 * al[0] * t3 + 12.0 * al[1] * t2 + 6.0 * al[2] * t +
                2.0 * al[3] + c.beta * r.state.a;
  out.jerk = 60.0 * al[0] * t2 + 24.0 * al[1] * t + 6.0 * al[2] +
             c.beta * r.jerk;
  return out;
}

TrajectorySample eval_quintic(const QuinticCoefficients& q, double t) {
  const auto& c = q.c;
  TrajectorySample out;
  out.state.s =
      c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * (c[4] + t * c[5]))));
  out.state.v = c[1] + t * (2.0 * c[2] +
                            t * (3.0 * c[3] + t * (4.0 * c[4] + t * 5.0 * c[5])));
  out.state.a = 2.0 * c[2] + t * (6.0 * c[3] + t * (12.0 * c[4] + t * 20.0 * c[5]));
  out.jerk = 6.0 * c[3] + t * (24.0 * c[4] + t * 60.0 * c[5]);
  return out;
}

TrajectorySample eval_constant_deceleration(const ConstantDecelerationParams& p,
                                            const State1D& x0, double t) {
  TrajectorySample out;
  if (p.b <= 0.0) {
    out.state = {x0.s, x0.v, 0.0};
    return out;
  }
  if (t > p.t_stop) {
    out.state = {p.s_stop, 0.0, 0.0};
    return out;
  }
  out.state.s = x0.s + x0.v * t - 0.5 * p.b * t * t;
  out.state.v = x0.v - p.b * t;
  out.state.a = -p.b;
  if (t == p.t_stop) {
    out.state.s = p.s_stop;
    out.state.v = 0.0;
  }
  return out;
}

}  // namespace

TrajectorySample time_weight_basis(double t, double w_t) {
  // With x = t / w, r''' = -rho(x) / w for rho = x^3 / (1 + x); I1..I3 are
  // the successive integrals of rho from 0 in x.
  const double x = t / w_t;
  double i1 = 0.0, i2 = 0.0, i3 = 0.0;
  if (x < kSeriesLimit) {
    // rho = sum_{n>=3} (-1)^(n-3) x^n
    double p = x * x * x * x;
    double sign = 1.0;
    for (int n = 3; n < 80; ++n) {
      const double d1 = n + 1.0, d2 = d1 * (n + 2.0), d3 = d2 * (n + 3.0);
      const double term1 = sign * p / d1;
      i1 += term1;
      i2 += sign * p * x / d2;
      i3 += sign * p * x * x / d3;
      if (std::abs(term1) <= 1e-18 * std::abs(i1)) break;
      p *= x;
      sign = -sign;
    }
  } else {
    const double l = std::log1p(x);
    const double x2 = x * x, x3 = x2 * x, x4 = x3 * x, x5 = x4 * x;
    const double y = 1.0 + x;
    i1 = x3 / 3.0 - x2 / 2.0 + x - l;
    i2 = x4 / 12.0 - x3 / 6.0 + x2 / 2.0 + x - y * l;
    i3 = x5 / 60.0 - x4 / 24.0 + x3 / 6.0 + x2 / 2.0 - 0.5 * y * y * l +
         0.25 * y * y - 0.25;
  }
  TrajectorySample out;
  out.jerk = -(x * x * x / (1.0 + x)) / w_t;
  out.state.a = -i1;
  out.state.v = -w_t * i2;
  out.state.s = -w_t * w_t * i3;
  return out;
}


bool is_finite(const State1D& x) {
  return std::isfinite(x.s) && std::isfinite(x.v) && std::isfinite(x.a);
}

std::string_view to_string(TrajectoryKind kind) {
  switch (kind) {
    case TrajectoryKind::kTimeWeighted:
      return "TimeWeighted";
    case TrajectoryKind::kQuintic:
      return "Quintic";
    case TrajectoryKind::kConstantDeceleration:
      return "ConstantDeceleration";
  }
  return "Unknown";
}

Trajectory::Trajectory()
    : coefficients_(ConstantDecelerationParams{}), x0_{}, xf_{} {}

Trajectory Trajectory::time_weighted(const TimeWeightedCoefficients& coeffs,
                                     const State1D& x0, const State1D& xf) {
  Trajectory traj;
  traj.coefficients_ = coeffs;
  traj.x0_ = x0;
  traj.xf_ = xf;
  return traj;
}

Trajectory Trajectory::quintic(const QuinticCoefficients& coeffs,
                               const State1D& x0, const State1D& xf) {
  Trajectory traj;
  traj.coefficients_ = coeffs;
  traj.x0_ = x0;
  traj.xf_ = xf;
  return traj;
}

Trajectory Trajectory::constant_deceleration(const State1D& x0, double b) {
  if (!is_finite(x0) || !std::isfinite(b) || b < 0.0 || x0.v < 0.0) {
    throw std::invalid_argument(
        "constant deceleration needs finite state, v >= 0 and b >= 0");
  }
  ConstantDecelerationParams p;
  Trajectory traj;
  if (x0.v == 0.0 || b == 0.0) {
    p.b = 0.0;
    p.s_stop = x0.s;
    p.t_stop = 0.0;
    traj.x0_ = {x0.s, x0.v, 0.0};
    traj.xf_ = traj.x0_;
  } else {
    p.b = b;
    p.t_stop = x0.v / b;
    p.s_stop = x0.s + 0.5 * x0.v * x0.v / b;
    traj.x0_ = {x0.s, x0.v, -b};
    traj.xf_ = {p.s_stop, 0.0, -b};
  }
  traj.coefficients_ = p;
  return traj;
}

TrajectoryKind Trajectory::kind() const {
  switch (coefficients_.index()) {
    case 0:
      return TrajectoryKind::kTimeWeighted;
    case 1:
      return TrajectoryKind::kQuintic;
    default:
      return TrajectoryKind::kConstantDeceleration;
  }
}

double Trajectory::full_horizon() const {
  return std::visit(
      [](const auto& c) -> double {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, ConstantDecelerationParams>) {
          return c.t_stop;
        } else {
          return c.t_f;
        }
      },
      coefficients_);
}

double Trajectory::horizon() const {
  return std::max(0.0, full_horizon() - offset_);
}

State1D Trajectory::start() const {
  return offset_ == 0.0 ? x0_ : eval(0.0).state;
}

State1D Trajectory::end() const {
  return offset_ == 0.0 ? xf_ : eval(horizon()).state;
}

TrajectorySample Trajectory::eval_underlying(double t) const {
  if (const auto* tw = std::get_if<TimeWeightedCoefficients>(&coefficients_)) {
    return eval_time_weighted(*tw, t);
  }
  if (const auto* q = std::get_if<QuinticCoefficients>(&coefficients_)) {
    return eval_quintic(*q, t);
  }
  return eval_constant_deceleration(
      std::get<ConstantDecelerationParams>(coefficients_), x0_, t);
}

TrajectorySample Trajectory::eval(double t) const {
  if (!std::isfinite(t) || t < -kTimeSlack) {
    throw std::out_of_range("trajectory evaluated at negative time " +
                            std::to_string(t));
  }
  double tu = std::max(0.0, t) + offset_;
  if (kind() != TrajectoryKind::kConstantDeceleration) {
    const double t_f = full_horizon();
    if (tu > t_f + kTimeSlack) {
      throw std::out_of_range("trajectory evaluated at t=" + std::to_string(t) +
                              " beyond horizon " + std::to_string(horizon()));
    }
    tu = std::min(tu, t_f);
  }
  return eval_underlying(tu);
}

Trajectory Trajectory::shifted(double dt) const {
  if (!(dt >= 0.0)) {
    throw std::invalid_argument("trajectory shift must be non-negative");
  }
  Trajectory out = *this;
  out.offset_ += dt;
  return out;
}

namespace {

bool coefficients_equal(const TimeWeightedCoefficients& a,
                        const TimeWeightedCoefficients& b) {
  return a.alpha == b.alpha && a.beta == b.beta && a.w_t == b.w_t &&
         a.t_f == b.t_f;
}
bool coefficients_equal(const QuinticCoefficients& a,
                        const QuinticCoefficients& b) {
  return a.c == b.c && a.t_f == b.t_f;
}
bool coefficients_equal(const ConstantDecelerationParams& a,
                        const ConstantDecelerationParams& b) {
  return a.b == b.b && a.s_stop == b.s_stop && a.t_stop == b.t_stop;
}

}  // namespace

bool operator==(const Trajectory& lhs, const Trajectory& rhs) {
  if (lhs.coefficients_.index() != rhs.coefficients_.index()) return false;
  const bool same = std::visit(
      [&rhs](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        return coefficients_equal(c, std::get<T>(rhs.coefficients_));
      },
      lhs.coefficients_);
  return same && lhs.x0_ == rhs.x0_ && lhs.xf_ == rhs.xf_ &&
         lhs.offset_ == rhs.offset_;
}

}  // namespace merge_planner
