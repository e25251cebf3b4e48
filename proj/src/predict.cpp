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

#include "merge_planner/predict.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace merge_planner {

bool is_psd(const Eigen::Matrix2d& cov, double tol) {
  if (!cov.allFinite()) return false;
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  if (std::abs(cov(0, 1) - cov(1, 0)) > tol * scale) return false;
  const double s12 = 0.5 * (cov(0, 1) + cov(1, 0));
  return cov(0, 0) >= -tol * scale && cov(1, 1) >= -tol * scale &&
         cov(0, 0) * cov(1, 1) - s12 * s12 >= -tol * scale * scale;
}

Eigen::Matrix2d cv_transition(double dt) {
  Eigen::Matrix2d F;
  F << 1.0, dt, 0.0, 1.0;
  return F;
}

Eigen::Matrix2d cv_process_noise(double q, double dt) {
  const double dt2 = dt * dt;
  Eigen::Matrix2d Q;
  Q << 0.25 * dt2 * dt2, 0.5 * dt2 * dt, 0.5 * dt2 * dt, dt2;
  return q * Q;
}

ObjectEstimate initialize_estimate(int id, double z_s, double length,
                                   double timestamp, const KalmanConfig& cfg) {
  ObjectEstimate est;
  est.id = id;
  est.s_hat = z_s;
  est.v_hat = cfg.initial_speed;
  est.cov << cfg.r, 0.0, 0.0, cfg.initial_speed_var;
  est.length = length;
  est.timestamp = timestamp;
  return est;
}

ObjectEstimate kalman_update(const ObjectEstimate& prior, double z_s,
                             double r, double dt, double q) {
  if (!(r > 0.0) || !(dt > 0.0) || !(q >= 0.0)) {
    throw std::invalid_argument("kalman_update needs r > 0, dt > 0, q >= 0");
  }
  if (!is_psd(prior.cov)) {
    throw std::invalid_argument("prior covariance is not PSD");
  }
  const Eigen::Matrix2d F = cv_transition(dt);
  Eigen::Vector2d x(prior.s_hat, prior.v_hat);
  x = F * x;
  Eigen::Matrix2d P = F * prior.cov * F.transpose() + cv_process_noise(q, dt);

  const Eigen::RowVector2d H(1.0, 0.0);
  const double innovation_var = P(0, 0) + r;
  const Eigen::Vector2d K = P.col(0) / innovation_var;
  x += K * (z_s - x(0));
  const Eigen::Matrix2d I_KH = Eigen::Matrix2d::Identity() - K * H;
  P = I_KH * P * I_KH.transpose() + K * r * K.transpose();
  P = 0.5 * (P + P.transpose());

  ObjectEstimate post = prior;
  post.s_hat = x(0);
  post.v_hat = x(1);
  post.cov = P;
  post.timestamp = prior.timestamp + dt;
  return post;
}

PredictionTrack::PredictionTrack(int id, double dt,
                                 std::vector<ObjectEstimate> states)
    : id_(id), dt_(dt), states_(std::move(states)) {
  if (!(dt > 0.0) || states_.empty()) {
    throw std::invalid_argument("prediction track needs dt > 0 and states");
  }
}

double PredictionTrack::horizon() const {
  return states_.empty() ? 0.0 : time(states_.size() - 1);
}

const ObjectEstimate& PredictionTrack::at(double t) const {
  const double k = std::round(std::max(0.0, t) / dt_);
  const auto idx = std::min(static_cast<std::size_t>(k), states_.size() - 1);
  return states_[idx];
}

PredictionTrack predict_horizon(const ObjectEstimate& est, double horizon,
                                double dt_pred, double q) {
  if (!(horizon > 0.0) || !(dt_pred > 0.0)) {
    throw std::invalid_argument("prediction needs horizon > 0, dt_pred > 0");
  }
  const auto n = static_cast<std::size_t>(std::ceil(horizon / dt_pred - 1e-9));
  std::vector<ObjectEstimate> states;
  states.reserve(n + 1);

  const Eigen::Matrix2d F = cv_transition(dt_pred);
  const Eigen::Matrix2d Q = cv_process_noise(q, dt_pred);
  Eigen::Matrix2d accumulated = Eigen::Matrix2d::Zero();
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) * dt_pred;
    if (k > 0) accumulated = F * accumulated * F.transpose() + Q;
    const Eigen::Matrix2d Ft = cv_transition(t);
    ObjectEstimate x = est;
    x.s_hat = est.s_hat + est.v_hat * t;
    x.v_hat = est.v_hat;
    x.cov = Ft * est.cov * Ft.transpose() + accumulated;
    x.cov(1, 0) = x.cov(0, 1);
    x.timestamp = est.timestamp + t;
    states.push_back(x);
  }
  return PredictionTrack(est.id, dt_pred, std::move(states));
}

}  // namespace merge_planner
