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

#ifndef MERGE_PLANNER_PREDICT_HPP_
#define MERGE_PLANNER_PREDICT_HPP_

#include <vector>

#include <Eigen/Core>

namespace merge_planner {

/// Estimated 1D state of another road user along the main-road axis.
/// Positions refer to the vehicle center.
struct ObjectEstimate {
  int id = 0;
  double s_hat = 0.0;  // m
  double v_hat = 0.0;  // m/s
  // [[s11, s12], [s12, s22]] in m^2, m^2/s, m^2/s^2
  Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
  double length = 4.0;     // m
  double timestamp = 0.0;  // s
};

/// True if cov is symmetric positive semi-definite up to `tol`.
bool is_psd(const Eigen::Matrix2d& cov, double tol = 1e-12);

/// Discrete constant-velocity transition and process noise for one step of
/// piecewise-constant white acceleration with variance q.
Eigen::Matrix2d cv_transition(double dt);
Eigen::Matrix2d cv_process_noise(double q, double dt);

/// Filter settings. Defaults match the simulated measurement and
/// acceleration noise.
struct KalmanConfig {
  double r = 0.0625;              // measurement variance, m^2
  double q = 0.0625;              // acceleration variance, m^2/s^4
  double initial_speed = 30.0 / 3.6;
  double initial_speed_var = 4.0;  // (2 m/s)^2
};

/// Estimate after the first measurement of a new object.
ObjectEstimate initialize_estimate(int id, double z_s, double length,
                                   double timestamp, const KalmanConfig& cfg);

/// Constant-velocity predict-then-update with a position measurement.
/// The covariance update uses the Joseph form so it stays PSD.
/// Throws std::invalid_argument for a non-PSD prior, r <= 0 or dt <= 0.
ObjectEstimate kalman_update(const ObjectEstimate& prior, double z_s,
                             double r, double dt, double q);

/// Mean and covariance of an estimate on a uniform time grid t = k dt_pred,
/// k = 0..ceil(horizon/dt_pred). Times are relative to the estimate.
class PredictionTrack {
 public:
  PredictionTrack() = default;
  PredictionTrack(int id, double dt, std::vector<ObjectEstimate> states);

  int id() const { return id_; }
  double dt() const { return dt_; }
  std::size_t size() const { return states_.size(); }
  double time(std::size_t k) const { return static_cast<double>(k) * dt_; }
  double horizon() const;
  const std::vector<ObjectEstimate>& states() const { return states_; }
  const ObjectEstimate& operator[](std::size_t k) const { return states_[k]; }

  /// Nearest grid point to t, clamped to the grid.
  const ObjectEstimate& at(double t) const;

 private:
  int id_ = 0;
  double dt_ = 0.0;
  std::vector<ObjectEstimate> states_;
};

/// Open-loop CV propagation. The mean is evaluated in closed form at every
/// grid time; the covariance is F(t) P F(t)^T plus the accumulated process
/// noise of k steps.
PredictionTrack predict_horizon(const ObjectEstimate& est, double horizon,
                                double dt_pred, double q);

}  // namespace merge_planner

#endif  // MERGE_PLANNER_PREDICT_HPP_
