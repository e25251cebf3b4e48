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

#ifndef MERGE_PLANNER_RISK_HPP_
#define MERGE_PLANNER_RISK_HPP_

#include "merge_planner/predict.hpp"

namespace merge_planner {

struct SafetyParams {
  double t_safety = 1.0;         // s
  double s_margin = 2.0;         // m
  double p_residual_max = 0.05;  // accepted residual risk per vehicle
  double w_risk_a = 20.0;        // cost weight, vehicle ahead
  double w_risk_b = 50.0;        // cost weight, vehicle behind

  void validate() const;
};

/// Standard normal CDF, evaluated through erfc for full double accuracy in
/// both tails.
double gaussian_cdf(double z);

struct SafetyPositions {
  double ahead = 0.0;   // the vehicle ahead's center must be beyond this
  double behind = 0.0;  // the vehicle behind's center must stay before this
};

/// Corridor around the PGA. Margin and half length widen the corridor on
/// both sides, so the behind threshold subtracts them.
SafetyPositions safety_positions(double s_pga, double v_hat_a, double v_hat_b,
                                 double l_a, double l_b,
                                 const SafetyParams& params);

/// P(ahead vehicle center < s_safety_a) for a Gaussian with the given mean
/// and variance. Zero variance gives the deterministic limit.
double risk_ahead(double s_hat, double variance, double s_safety_a);

/// P(behind vehicle center > s_safety_b).
double risk_behind(double s_hat, double variance, double s_safety_b);

/// Risk read from a prediction at the grid time nearest t_f.
double risk_ahead(const PredictionTrack& track_a, double s_safety_a,
                  double t_f);
double risk_behind(const PredictionTrack& track_b, double s_safety_b,
                   double t_f);

}  // namespace merge_planner

#endif  // MERGE_PLANNER_RISK_HPP_
