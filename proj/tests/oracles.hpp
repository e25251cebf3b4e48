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

// Independent reference computations for the tests. None of them calls into
// the library's solvers.

#ifndef MERGE_PLANNER_TESTS_ORACLES_HPP_
#define MERGE_PLANNER_TESTS_ORACLES_HPP_

#include <Eigen/Dense>
#include <array>
#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "merge_planner/trajectory.hpp"

namespace merge_planner::oracle {

/// Weight of the time-weighted jerk functional.
inline double time_weight(double t, double w_t) {
  return (w_t - 1.0) / (1.0 + t) + 1.0;
}

struct CollocationResult {
  std::vector<double> u;  // jerk on each interval
  double cost = 0.0;      // sum 1/2 W_k u_k^2, W_k = exact weight integral
};

/// Direct collocation with n intervals of constant jerk. The terminal state
/// is linear in the jerks, so the constrained minimum of the weighted
/// quadratic cost is the weighted least-norm solution
///   u = W^-1 A^T (A W^-1 A^T)^-1 b.
inline CollocationResult collocation_minimizer(const State1D& x0,
                                               const State1D& xf, double t_f,
                                               double w_t, int n = 500) {
  const double h = t_f / n;
  Eigen::MatrixXd A(3, n);
  Eigen::VectorXd w_int(n);
  for (int k = 0; k < n; ++k) {
    const double t0 = k * h;
    const double tau = t_f - t0 - h;  // time after the interval
    A(0, k) = h * h * h / 6.0 + h * h / 2.0 * tau + h * tau * tau / 2.0;
    A(1, k) = h * h / 2.0 + h * tau;
    A(2, k) = h;
    // int_{t0}^{t0+h} ((w-1)/(1+t) + 1) dt
    w_int(k) = (w_t - 1.0) * std::log((1.0 + t0 + h) / (1.0 + t0)) + h;
  }
  // Free response of the triple integrator.
  const double T = t_f;
  Eigen::Vector3d free;
  free << x0.s + x0.v * T + 0.5 * x0.a * T * T, x0.v + x0.a * T, x0.a;
  Eigen::Vector3d b;
  b << xf.s, xf.v, xf.a;
  b -= free;

  const Eigen::VectorXd w_inv = w_int.cwiseInverse();
  const Eigen::MatrixXd AWinv = A * w_inv.asDiagonal();
  const Eigen::Matrix3d M = AWinv * A.transpose();
  const Eigen::Vector3d lambda = M.fullPivLu().solve(b);
  const Eigen::VectorXd u = AWinv.transpose() * lambda;

  CollocationResult out;
  out.u.assign(u.data(), u.data() + n);
  for (int k = 0; k < n; ++k) out.cost += 0.5 * w_int(k) * u(k) * u(k);
  return out;
}

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a,
                      double b, int n = 20000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return sum * h / 3.0;
}

/// Time-weighted cost of a trajectory by Simpson quadrature of its sampled
/// jerk (independent of the library's Gauss-Kronrod integration).
inline double weighted_cost_by_simpson(const Trajectory& traj, double w_t) {
  return simpson(
      [&](double t) {
        const double u = traj.eval(t).jerk;
        return 0.5 * time_weight(t, w_t) * u * u;
      },
      0.0, traj.horizon());
}

/// Exact int_0^T 1/2 u^2 for a polynomial jerk u(t) = sum p_i t^i by
/// multiplying coefficients and integrating term by term.
inline double polynomial_half_square_integral(const std::vector<double>& p,
                                              double T) {
  std::vector<double> sq(2 * p.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < p.size(); ++j) sq[i + j] += p[i] * p[j];
  double out = 0.0;
  for (std::size_t k = 0; k < sq.size(); ++k) {
    out += sq[k] * std::pow(T, static_cast<double>(k + 1)) / (k + 1);
  }
  return 0.5 * out;
}

struct FiniteDifferences {
  double ds = 0.0;  // central difference of s, compare with v
  double dv = 0.0;  // compare with a
  double da = 0.0;  // compare with jerk
};

/// Central differences at an interior time t.
inline FiniteDifferences central_differences(const Trajectory& traj, double t,
                                             double h = 1e-5) {
  const auto lo = traj.eval(t - h);
  const auto hi = traj.eval(t + h);
  return {(hi.state.s - lo.state.s) / (2 * h),
          (hi.state.v - lo.state.v) / (2 * h),
          (hi.state.a - lo.state.a) / (2 * h)};
}

/// Standard normal CDF at 50 decimal digits.
inline double high_precision_cdf(double z) {
  using boost::multiprecision::cpp_bin_float_50;
  const cpp_bin_float_50 x(z);
  const cpp_bin_float_50 r =
      boost::math::erfc(-x / boost::multiprecision::sqrt(cpp_bin_float_50(2))) /
      2;
  return static_cast<double>(r);
}

/// Random boundary-value instance in the acceptance ranges.
struct Instance {
  State1D x0;
  State1D xf;
  double t_f = 1.0;
  double w_t = 1.0;
};

inline Instance random_instance(std::mt19937_64& rng, double t_lo = 2.0,
                                double t_hi = 10.0) {
  std::uniform_real_distribution<double> tf(t_lo, t_hi);
  std::uniform_real_distribution<double> speed(0.0, 15.0);
  std::uniform_real_distribution<double> acc(-1.5, 1.5);
  Instance in;
  in.t_f = tf(rng);
  in.x0 = {0.0, speed(rng), acc(rng)};
  in.xf.v = speed(rng);
  in.xf.a = acc(rng);
  // Final position near the distance covered at the mean speed.
  std::uniform_real_distribution<double> spread(0.8, 1.2);
  in.xf.s = 0.5 * (in.x0.v + in.xf.v) * in.t_f * spread(rng);
  constexpr std::array<double, 5> kWeights{1.0, 2.0, 5.0, 12.5, 25.0};
  in.w_t = kWeights[std::uniform_int_distribution<int>(0, 4)(rng)];
  return in;
}

}  // namespace merge_planner::oracle

#endif  // MERGE_PLANNER_TESTS_ORACLES_HPP_
