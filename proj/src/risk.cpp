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

#include "merge_planner/risk.hpp"

#include <cmath>
#include <stdexcept>

namespace merge_planner {
namespace {

// 1 - Phi(margin / sigma), with the sign limit for sigma = 0.
double exceedance(double margin, double variance) {
  if (!(variance > 0.0)) {
    if (margin > 0.0) return 0.0;
    if (margin < 0.0) return 1.0;
    return 0.5;
  }
  return gaussian_cdf(-margin / std::sqrt(variance));
}

}  // namespace

void SafetyParams::validate() const {
  if (!(t_safety > 0.0) || !(s_margin >= 0.0) || !(p_residual_max > 0.0) ||
      !(p_residual_max < 1.0) || !(w_risk_a >= 0.0) || !(w_risk_b >= 0.0)) {
    throw std::invalid_argument(
        "safety params need t_safety > 0, s_margin >= 0, 0 < p_residual_max "
        "< 1 and non-negative weights");
  }
}

double gaussian_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

SafetyPositions safety_positions(double s_pga, double v_hat_a, double v_hat_b,
                                 double l_a, double l_b,
                                 const SafetyParams& params) {
  SafetyPositions out;
  out.ahead = s_pga + v_hat_a * params.t_safety + params.s_margin + 0.5 * l_a;
  out.behind = s_pga - v_hat_b * params.t_safety - params.s_margin - 0.5 * l_b;
  return out;
}

double risk_ahead(double s_hat, double variance, double s_safety_a) {
  return exceedance(s_hat - s_safety_a, variance);
}

double risk_behind(double s_hat, double variance, double s_safety_b) {
  return exceedance(s_safety_b - s_hat, variance);
}

double risk_ahead(const PredictionTrack& track_a, double s_safety_a,
                  double t_f) {
  const ObjectEstimate& x = track_a.at(t_f);
  return risk_ahead(x.s_hat, x.cov(0, 0), s_safety_a);
}

double risk_behind(const PredictionTrack& track_b, double s_safety_b,
                   double t_f) {
  const ObjectEstimate& x = track_b.at(t_f);
  return risk_behind(x.s_hat, x.cov(0, 0), s_safety_b);
}

}  // namespace merge_planner
