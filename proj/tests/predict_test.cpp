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

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>
#include <stdexcept>

#include "gtest/gtest.h"

namespace merge_planner {
namespace {

ObjectEstimate make_estimate(double s, double v, double s11, double s12,
                             double s22) {
  ObjectEstimate e;
  e.s_hat = s;
  e.v_hat = v;
  e.cov << s11, s12, s12, s22;
  return e;
}

Eigen::Matrix2d random_psd(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 2.0);
  Eigen::Matrix2d L;
  L << n(rng), 0.0, n(rng), n(rng);
  return L * L.transpose();
}

bool eigenvalues_non_negative(const Eigen::Matrix2d& m) {
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(m);
  return es.eigenvalues().minCoeff() >= -1e-9 * std::max(1.0, m.norm());
}

TEST(KalmanUpdate, HugeMeasurementNoiseKeepsPrediction) {
  const ObjectEstimate prior = make_estimate(10.0, 5.0, 1.0, 0.1, 0.5);
  const double dt = 0.1;
  const ObjectEstimate post = kalman_update(prior, 500.0, 1e12, dt, 0.0625);
  EXPECT_NEAR(post.s_hat, 10.5, 1e-6);
  EXPECT_NEAR(post.v_hat, 5.0, 1e-6);
  const Eigen::Matrix2d F = cv_transition(dt);
  const Eigen::Matrix2d predicted =
      F * prior.cov * F.transpose() + cv_process_noise(0.0625, dt);
  EXPECT_TRUE(post.cov.isApprox(predicted, 1e-9));
}

TEST(KalmanUpdate, ConvergesToTrueVelocity) {
  KalmanConfig cfg;
  ObjectEstimate est = initialize_estimate(3, 0.0, 4.0, 0.0, cfg);
  const double v_true = 12.0;
  const double dt = 0.08;
  for (int k = 1; k <= 50; ++k) {
    est = kalman_update(est, v_true * k * dt, cfg.r, dt, 0.0);
  }
  EXPECT_NEAR(est.v_hat, v_true, 0.01);
  EXPECT_EQ(est.id, 3);
  EXPECT_NEAR(est.timestamp, 50 * dt, 1e-12);
}

TEST(KalmanUpdate, MeasurementDominatesUninformedPrior) {
  const ObjectEstimate prior = make_estimate(0.0, 0.0, 1e12, 0.0, 1.0);
  const ObjectEstimate post = kalman_update(prior, 42.0, 0.0625, 0.08, 0.0625);
  EXPECT_NEAR(post.s_hat, 42.0, 1e-6);
}

TEST(KalmanUpdate, RejectsBadInput) {
  const ObjectEstimate ok = make_estimate(0, 0, 1, 0, 1);
  EXPECT_THROW(kalman_update(ok, 0.0, 0.0, 0.1, 0.1), std::invalid_argument);
  EXPECT_THROW(kalman_update(ok, 0.0, 1.0, 0.0, 0.1), std::invalid_argument);
  const ObjectEstimate bad = make_estimate(0, 0, 1, 5, 1);
  EXPECT_THROW(kalman_update(bad, 0.0, 1.0, 0.1, 0.1), std::invalid_argument);
}

TEST(KalmanUpdate, PreservesPsd) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.01, 2.0);
  std::normal_distribution<double> z(0.0, 10.0);
  for (int i = 0; i < 10000; ++i) {
    ObjectEstimate prior;
    prior.cov = random_psd(rng);
    const ObjectEstimate post = kalman_update(prior, z(rng), u(rng), u(rng), u(rng));
    ASSERT_TRUE(eigenvalues_non_negative(post.cov)) << post.cov;
    ASSERT_TRUE(is_psd(post.cov));
  }
}

TEST(PredictHorizon, NoProcessNoiseIsQuadraticInTime) {
  const ObjectEstimate est = make_estimate(5.0, 8.33, 0.3, 0.05, 0.2);
  const PredictionTrack track = predict_horizon(est, 10.0, 0.08, 0.0);
  for (std::size_t k = 0; k < track.size(); ++k) {
    const double t = track.time(k);
    EXPECT_NEAR(track[k].cov(0, 0), 0.3 + 2 * 0.05 * t + 0.2 * t * t, 1e-10);
  }
}

TEST(PredictHorizon, MeanIsAffineOnTheGrid) {
  const ObjectEstimate est = make_estimate(0.0, 8.33, 0.0, 0.0, 0.0);
  const PredictionTrack track = predict_horizon(est, 10.0, 0.08, 0.0625);
  EXPECT_NEAR(track.at(10.0).s_hat, 83.3, 1e-9);
  for (std::size_t k = 0; k < track.size(); ++k) {
    EXPECT_DOUBLE_EQ(track[k].s_hat, 8.33 * track.time(k));
    EXPECT_DOUBLE_EQ(track[k].v_hat, 8.33);
  }
  EXPECT_GE(track.horizon(), 10.0 - 1e-9);
}

TEST(PredictHorizon, MatchesStepwiseRecursion) {
  const ObjectEstimate est = make_estimate(0.0, 9.0, 0.25, 0.02, 1.5);
  const double dt = 0.08;
  const double q = 0.0625;
  const PredictionTrack track = predict_horizon(est, 15.0, dt, q);
  // P_{k+1} = F P_k F^T + Q written out elementwise.
  double p11 = 0.25, p12 = 0.02, p22 = 1.5;
  for (std::size_t k = 0; k < track.size(); ++k) {
    EXPECT_NEAR(track[k].cov(0, 0), p11, 1e-10 * std::max(1.0, p11));
    EXPECT_NEAR(track[k].cov(0, 1), p12, 1e-10 * std::max(1.0, std::abs(p12)));
    EXPECT_NEAR(track[k].cov(1, 1), p22, 1e-10 * std::max(1.0, p22));
    const double n11 = p11 + 2 * dt * p12 + dt * dt * p22 + q * std::pow(dt, 4) / 4;
    const double n12 = p12 + dt * p22 + q * std::pow(dt, 3) / 2;
    const double n22 = p22 + q * dt * dt;
    p11 = n11;
    p12 = n12;
    p22 = n22;
  }
}

TEST(PredictHorizon, TraceNonDecreasingAndPsd) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    ObjectEstimate est;
    est.cov = random_psd(rng);
    const PredictionTrack track = predict_horizon(est, 5.0, 0.08, 0.0625);
    for (std::size_t k = 1; k < track.size(); ++k) {
      ASSERT_TRUE(eigenvalues_non_negative(track[k].cov));
    }
  }
  const ObjectEstimate est = make_estimate(0.0, 8.0, 0.5, 0.0, 1.0);
  const PredictionTrack track = predict_horizon(est, 15.0, 0.08, 0.0625);
  for (std::size_t k = 1; k < track.size(); ++k) {
    EXPECT_GE(track[k].cov.trace(), track[k - 1].cov.trace());
  }
}

TEST(PredictHorizon, RejectsBadInput) {
  const ObjectEstimate est;
  EXPECT_THROW(predict_horizon(est, 0.0, 0.08, 0.0), std::invalid_argument);
  EXPECT_THROW(predict_horizon(est, 1.0, 0.0, 0.0), std::invalid_argument);
}

TEST(PredictionTrack, AtClampsToGrid) {
  const PredictionTrack track =
      predict_horizon(make_estimate(0, 1, 0, 0, 0), 1.0, 0.1, 0.0);
  EXPECT_DOUBLE_EQ(track.at(-5.0).s_hat, 0.0);
  EXPECT_NEAR(track.at(0.31).s_hat, 0.3, 1e-12);
  EXPECT_NEAR(track.at(100.0).s_hat, 1.0, 1e-12);
}

TEST(InitializeEstimate, UsesFilterDefaults) {
  const KalmanConfig cfg;
  const ObjectEstimate e = initialize_estimate(7, 12.0, 4.5, 1.0, cfg);
  EXPECT_EQ(e.id, 7);
  EXPECT_DOUBLE_EQ(e.s_hat, 12.0);
  EXPECT_DOUBLE_EQ(e.v_hat, 30.0 / 3.6);
  EXPECT_DOUBLE_EQ(e.cov(0, 0), cfg.r);
  EXPECT_DOUBLE_EQ(e.cov(1, 1), 4.0);
  EXPECT_DOUBLE_EQ(e.length, 4.5);
}

}  // namespace
}  // namespace merge_planner
