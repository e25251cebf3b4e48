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

#include "merge_planner/replay.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>

#include "merge_planner/trajgen.hpp"

namespace merge_planner {
namespace {

constexpr double kTimeEps = 1e-9;

void append_piece(ReplayResult& out, const Trajectory& plan, double t_start,
                  double duration, double sample_dt) {
  const auto n = static_cast<long>(std::floor(duration / sample_dt - 1e-9));
  for (long k = 0; k <= n; ++k) {
    const double tau = static_cast<double>(k) * sample_dt;
    if (tau >= duration - kTimeEps && k > 0) break;
    const TrajectorySample x = plan.eval(tau);
    out.executed.push_back({t_start + tau, x.state, x.jerk});
  }
  out.jerk_energy += jerk_energy(plan, 0.0, duration);
  out.plans.push_back(plan);
  out.plan_start.push_back(t_start);
}

}  // namespace

void ReplayConfig::validate() const {
  if (!is_finite(x0) || !is_finite(nominal_target) || !(t_arrival > 0.0) ||
      !(dt_cycle > 0.0) || !(sample_dt > 0.0) || !(lock_time >= 0.0)) {
    throw std::invalid_argument("invalid replay configuration");
  }
}

TargetNoise noise_at(const std::vector<TargetNoise>& noise, double t) {
  TargetNoise current{t, 0.0, 0.0};
  for (const auto& n : noise) {
    if (n.t <= t + kTimeEps) {
      current.ds = n.ds;
      current.dv = n.dv;
    } else {
      break;
    }
  }
  return current;
}

ReplayResult replay_noisy_target(const ReplayConfig& cfg,
                                 const std::vector<TargetNoise>& noise,
                                 double w_t) {
  cfg.validate();
  ReplayResult out;
  State1D state = cfg.x0;
  for (long k = 0;; ++k) {
    const double t = static_cast<double>(k) * cfg.dt_cycle;
    const double remaining = cfg.t_arrival - t;
    if (remaining <= kTimeEps) break;
    const TargetNoise n = noise_at(noise, t);
    const State1D target{cfg.nominal_target.s + n.ds,
                         cfg.nominal_target.v + n.dv, cfg.nominal_target.a};
    if (t >= cfg.lock_time - kTimeEps) {
      const Trajectory plan = solve_quintic(state, target, remaining);
      out.lock_index = out.plans.size();
      append_piece(out, plan, t, remaining, cfg.sample_dt);
      state = plan.end();
      break;
    }
    const Trajectory plan = solve_time_weighted(state, target, remaining, w_t);
    const double step = std::min(cfg.dt_cycle, remaining);
    append_piece(out, plan, t, step, cfg.sample_dt);
    state = plan.eval(step).state;
    out.lock_index = out.plans.size();
  }
  out.executed.push_back({cfg.t_arrival, state, out.plans.empty()
                                                    ? 0.0
                                                    : out.plans.back()
                                                          .eval(out.plans.back().horizon())
                                                          .jerk});
  return out;
}

std::vector<TargetNoise> generate_target_noise(const ReplayConfig& cfg,
                                               std::uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::bernoulli_distribution hold(0.3);
  constexpr double kPersistence = 0.9;
  std::vector<TargetNoise> noise;
  double ds = 0.0;
  double dv = 0.0;
  for (long k = 0;; ++k) {
    const double t = static_cast<double>(k) * cfg.dt_cycle;
    if (t >= cfg.t_arrival - kTimeEps) break;
    if (k > 0 && !hold(rng)) {
      const double decay = std::exp(-t / 2.0);
      ds = kPersistence * ds + (6.0 * decay + 0.4) * normal(rng);
      dv = kPersistence * dv + (1.2 * decay + 0.05) * normal(rng);
    }
    noise.push_back({t, ds, dv});
  }
  return noise;
}

std::vector<TargetNoise> read_noise_csv(std::istream& in) {
  std::vector<TargetNoise> noise;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  std::vector<double> fields;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (!header_seen) {
      if (line != "t,ds,dv") {
        throw std::runtime_error("noise CSV line " + std::to_string(line_no) +
                                 ": expected header 't,ds,dv'");
      }
      header_seen = true;
      continue;
    }
    if (!parse_csv_doubles(line, fields) || fields.size() != 3) {
      throw std::runtime_error("noise CSV line " + std::to_string(line_no) +
                               ": expected three numbers, got '" + line + "'");
    }
    if (!noise.empty() && !(fields[0] > noise.back().t)) {
      throw std::runtime_error("noise CSV line " + std::to_string(line_no) +
                               ": times must be strictly increasing");
    }
    noise.push_back({fields[0], fields[1], fields[2]});
  }
  if (!header_seen) throw std::runtime_error("noise CSV is empty");
  return noise;
}

std::vector<TargetNoise> read_noise_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open noise CSV " + path.string());
  return read_noise_csv(in);
}

}  // namespace merge_planner
