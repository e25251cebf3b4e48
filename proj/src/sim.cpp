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

#include "merge_planner/sim.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "merge_planner/csv.hpp"

namespace merge_planner {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t kWorldStream = 1;
constexpr std::uint64_t kMeasurementStream = 2;

bool is_merge(DecisionClass cls) {
  return cls == DecisionClass::kMergeBeforeFirst ||
         cls == DecisionClass::kMergeIntoGap || cls == DecisionClass::kLocked;
}

EpisodeResult run_episode_impl(const SimConfig& cfg, bool with_traffic) {
  cfg.validate();
  const auto substeps =
      static_cast<int>(std::lround(cfg.dt_cycle / cfg.dt_sim));

  Rng world_rng(derive_seed(cfg.scenario.seed, 0, 0, kWorldStream));
  Rng meas_rng(derive_seed(cfg.scenario.seed, 0, 0, kMeasurementStream));
  World world = generate_scenario(cfg.scenario, cfg.map, world_rng);
  if (!with_traffic) world.others.clear();
  world.ego_length = cfg.planner.ego_length;

  EpisodeResult result;
  result.seed = cfg.scenario.seed;
  if (cfg.record_history) result.history.push_back(world);

  std::map<int, ObjectEstimate> estimates;
  LockState lock;
  DecisionClass last_moving = DecisionClass::kGentleStop;
  std::optional<double> stopped_since;
  bool stopped_by_fail_safe = false;
  int cycle = 0;

  auto audit = [&]() {
    if (in_collision(world, cfg.map.s_merge)) result.collided = true;
    if (cfg.record_history) result.history.push_back(world);
  };

  while (world.t < cfg.max_time - 1e-9) {
    // Perception and tracking.
    const std::vector<Measurement> meas =
        measure(world, meas_rng, cfg.scenario.sigma_s);
    for (const auto& m : meas) {
      auto it = estimates.find(m.id);
      if (it == estimates.end()) {
        estimates.emplace(m.id, initialize_estimate(m.id, m.s, m.length,
                                                    world.t, cfg.kalman));
      } else {
        it->second = kalman_update(it->second, m.s, cfg.kalman.r,
                                   cfg.dt_cycle, cfg.kalman.q);
      }
    }
    PlanningInput input;
    input.t_now = world.t;
    input.ego = world.ego;
    for (const auto& [id, est] : estimates) input.objects.push_back(est);

    const auto t0 = std::chrono::steady_clock::now();
    PlanningResult planned = plan_cycle(input, cfg.map, cfg.planner, lock);
    const auto t1 = std::chrono::steady_clock::now();
    const Decision& decision = planned.decision;
    result.cycle_times.push_back(
        {decision.cls,
         std::chrono::duration<double, std::milli>(t1 - t0).count()});
    if (cfg.record_decisions) {
      result.decision_log.push_back(decision_log_row(cycle, world.t, decision));
    }
    lock = planned.lock;
    ++cycle;

    if (decision.cls == DecisionClass::kFailSafe) {
      result.used_fail_safe = true;
      result.emergency = result.emergency || decision.emergency;
      result.max_decel_applied =
          std::max(result.max_decel_applied, decision.fail_safe_decel);
    }

    const Trajectory& traj = decision.trajectory;
    const bool merging = is_merge(decision.cls);
    const bool ego_moving = world.ego.v > cfg.stop_speed;
    if (ego_moving || merging) {
      last_moving = decision.cls == DecisionClass::kLocked
                        ? (decision.candidate &&
                                   decision.candidate->option_kind ==
                                       OptionKind::kBeforeFirst
                               ? DecisionClass::kMergeBeforeFirst
                               : DecisionClass::kMergeIntoGap)
                        : decision.cls;
    }

    // Execute one cycle of the decision.
    double prev_tau = 0.0;
    for (int j = 1; j <= substeps; ++j) {
      const double tau = j * cfg.dt_sim;
      world = step_world(world, cfg.dt_sim, world_rng, cfg.idm,
                         cfg.scenario.sigma_a);
      if (merging && tau >= traj.horizon() - 1e-9) {
        result.executed_jerk_energy += jerk_energy(traj, prev_tau, traj.horizon());
        world.ego = traj.end();
        result.reached_pga = true;
        result.pga_target_speed =
            decision.candidate ? decision.candidate->target.v : world.ego.v;
        audit();
        break;
      }
      world.ego = traj.eval(tau).state;
      result.executed_jerk_energy += jerk_energy(traj, prev_tau, tau);
      prev_tau = tau;
      audit();
    }
    if (result.reached_pga) break;

    if (world.ego.v <= cfg.stop_speed &&
        (decision.cls == DecisionClass::kGentleStop ||
         decision.cls == DecisionClass::kFailSafe)) {
      if (!stopped_since) stopped_since = world.t;
      stopped_by_fail_safe = decision.cls == DecisionClass::kFailSafe;
      if (stopped_by_fail_safe) break;
      if (world.t - *stopped_since >= cfg.gentle_stop_hold - 1e-9) break;
    } else {
      stopped_since.reset();
    }
  }

  result.end_time = world.t;
  result.final_ego = world.ego;
  if (result.reached_pga) {
    const auto lead = std::find_if(world.others.begin(), world.others.end(),
                                   [](const Vehicle& v) { return v.id == 0; });
    result.decision_class = (lead == world.others.end() || world.ego.s > lead->s)
                                ? DecisionClass::kMergeBeforeFirst
                                : DecisionClass::kMergeIntoGap;
  } else {
    result.decision_class = last_moving == DecisionClass::kFailSafe
                                ? DecisionClass::kFailSafe
                                : DecisionClass::kGentleStop;
  }
  return result;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                          std::uint64_t b, std::uint64_t stream) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ (b + 0x632be59bd9b4e019ULL));
  return splitmix64(h ^ (stream * 0x9e3779b97f4a7c15ULL));
}

double idm_accel(double v, double gap, double dv, const IdmParams& p) {
  const double free_term = 1.0 - std::pow(v / p.v0, p.delta);
  if (std::isinf(gap)) {
    return std::max(p.a * free_term, -p.max_decel);
  }
  if (!(gap > 0.0)) return -p.max_decel;
  const double s_star = std::max(
      0.0, p.s0 + v * p.T + v * dv / (2.0 * std::sqrt(p.a * p.b)));
  const double ratio = s_star / gap;
  return std::max(p.a * (free_term - ratio * ratio), -p.max_decel);
}

World step_world(const World& world, double dt, Rng& rng, const IdmParams& idm,
                 double sigma_a) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_world needs dt > 0");
  World next = world;
  std::normal_distribution<double> noise(0.0, 1.0);
  const std::size_t n = world.others.size();
  std::vector<double> accel(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vehicle& me = world.others[i];
    const Vehicle* leader = nullptr;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const Vehicle& other = world.others[j];
      const bool ahead = other.s > me.s || (other.s == me.s && other.id < me.id);
      if (ahead && (!leader || other.s < leader->s)) leader = &other;
    }
    double a = 0.0;
    if (leader) {
      const double gap = leader->s - me.s - 0.5 * (leader->length + me.length);
      a = idm_accel(me.v, gap, me.v - leader->v, idm);
    } else {
      a = idm_accel(me.v, kFreeRoad, 0.0, idm);
    }
    // One draw per vehicle and step, also with sigma_a = 0, so the stream
    // layout does not depend on the noise level.
    accel[i] = a + sigma_a * noise(rng);
  }
  for (std::size_t i = 0; i < n; ++i) {
    Vehicle& v = next.others[i];
    v.a = accel[i];
    v.s += v.v * dt + 0.5 * v.a * dt * dt;
    v.v = std::max(0.0, v.v + v.a * dt);
  }
  next.t = world.t + dt;
  return next;
}

std::vector<Measurement> measure(const World& world, Rng& rng, double sigma_s) {
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<Measurement> out;
  out.reserve(world.others.size());
  for (const auto& v : world.others) {
    out.push_back({v.id, v.s + sigma_s * noise(rng), v.length});
  }
  return out;
}

void ScenarioConfig::validate() const {
  if (!(gap_size > 0.0) || !(arrival_min <= arrival_max) ||
      !(ego_v_min <= ego_v_max) || !(arrival_min > 0.0) ||
      !(sigma_v >= 0.0) || !(sigma_a >= 0.0) || !(sigma_s >= 0.0) ||
      !(vehicle_length > 0.0) || !(ego_start_offset > 0.0)) {
    throw std::invalid_argument("invalid scenario configuration");
  }
}

World generate_scenario(const ScenarioConfig& cfg, const LocalMap& map,
                        Rng& rng) {
  cfg.validate();
  std::uniform_real_distribution<double> arrival(cfg.arrival_min,
                                                 cfg.arrival_max);
  std::uniform_real_distribution<double> ego_speed(cfg.ego_v_min,
                                                   cfg.ego_v_max);
  std::normal_distribution<double> noise(0.0, 1.0);

  const double t_arrival = arrival(rng);
  Vehicle lead;
  lead.id = 0;
  lead.v = std::max(0.1, cfg.v_init_others + cfg.sigma_v * noise(rng));
  lead.length = cfg.vehicle_length;
  lead.s = map.s_merge - lead.v * t_arrival;

  Vehicle follower;
  follower.id = 1;
  follower.v = std::max(0.1, cfg.v_init_others + cfg.sigma_v * noise(rng));
  follower.length = cfg.vehicle_length;
  follower.s = lead.s - 0.5 * (lead.length + follower.length) - cfg.gap_size;

  World world;
  world.t = 0.0;
  world.others = {lead, follower};
  world.ego = {map.s_merge - cfg.ego_start_offset, ego_speed(rng), 0.0};
  return world;
}

bool in_collision(const World& world, double s_merge) {
  if (world.ego.s + 0.5 * world.ego_length <= s_merge) return false;
  for (const auto& v : world.others) {
    if (std::abs(v.s - world.ego.s) < 0.5 * (world.ego_length + v.length)) {
      return true;
    }
  }
  return false;
}

bool collision_check(const std::vector<World>& history, double s_merge) {
  return std::any_of(history.begin(), history.end(), [s_merge](const World& w) {
    return in_collision(w, s_merge);
  });
}

void SimConfig::validate() const {
  scenario.validate();
  map.validate();
  planner.validate();
  if (!(dt_sim > 0.0) || !(dt_cycle >= dt_sim) || !(max_time > 0.0)) {
    throw std::invalid_argument("simulation needs 0 < dt_sim <= dt_cycle");
  }
  const double ratio = dt_cycle / dt_sim;
  if (std::abs(ratio - std::round(ratio)) > 1e-9) {
    throw std::invalid_argument("dt_cycle must be a multiple of dt_sim");
  }
}

EpisodeResult run_episode(const SimConfig& cfg) {
  return run_episode_impl(cfg, true);
}

EpisodeResult run_episode_without_traffic(const SimConfig& cfg) {
  return run_episode_impl(cfg, false);
}

std::uint64_t episode_seed(std::uint64_t master, int run) {
  return derive_seed(master, static_cast<std::uint64_t>(run));
}

std::vector<StatsRow> monte_carlo(
    const SweepConfig& sweep, const SimConfig& base,
    const std::function<void(const StatsRow&)>& progress) {
  if (sweep.runs < 1) throw std::invalid_argument("runs must be >= 1");
  const std::size_t n_cells = sweep.gaps.size() * sweep.w_ts.size();
  const std::size_t runs = static_cast<std::size_t>(sweep.runs);
  const std::size_t total = n_cells * runs;

  std::vector<EpisodeResult> results(total);
  std::vector<std::atomic<int>> remaining(n_cells);
  for (auto& r : remaining) r.store(static_cast<int>(runs));
  std::atomic<std::size_t> next{0};
  std::mutex progress_mutex;
  std::exception_ptr failure;

  auto reduce_cell = [&](std::size_t cell) {
    const std::size_t gi = cell / sweep.w_ts.size();
    const std::size_t wi = cell % sweep.w_ts.size();
    StatsRow row;
    row.gap = sweep.gaps[gi];
    row.w_t = sweep.w_ts[wi];
    row.runs = sweep.runs;
    int n_gap = 0, n_before = 0, n_gentle = 0, n_fs = 0;
    double fs_sum = 0.0, ms_sum = 0.0;
    std::size_t n_cycles = 0;
    for (std::size_t r = 0; r < runs; ++r) {
      const EpisodeResult& ep = results[cell * runs + r];
      switch (ep.decision_class) {
        case DecisionClass::kMergeBeforeFirst:
          ++n_before;
          break;
        case DecisionClass::kMergeIntoGap:
          ++n_gap;
          break;
        case DecisionClass::kFailSafe:
          ++n_fs;
          fs_sum += ep.max_decel_applied;
          row.max_failsafe_decel =
              std::max(row.max_failsafe_decel, ep.max_decel_applied);
          break;
        default:
          ++n_gentle;
          break;
      }
      if (ep.collided) {
        ++row.collisions;
        row.collision_seeds.push_back(ep.seed);
      }
      if (ep.emergency) ++row.emergencies;
      for (const auto& c : ep.cycle_times) {
        ms_sum += c.ms;
        ++n_cycles;
        row.cycle_times.push_back(c);
      }
    }
    const double n = static_cast<double>(runs);
    row.p_gap = n_gap / n;
    row.p_before = n_before / n;
    row.p_gentle = n_gentle / n;
    row.p_failsafe = n_fs / n;
    row.mean_failsafe_decel = n_fs > 0 ? fs_sum / n_fs : 0.0;
    row.mean_cycle_ms = n_cycles > 0 ? ms_sum / static_cast<double>(n_cycles) : 0.0;
    return row;
  };

  std::vector<StatsRow> rows(n_cells);
  auto worker = [&]() {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= total) return;
      const std::size_t cell = idx / runs;
      const std::size_t run = idx % runs;
      const std::size_t gi = cell / sweep.w_ts.size();
      const std::size_t wi = cell % sweep.w_ts.size();
      try {
        SimConfig cfg = base;
        cfg.scenario.gap_size = sweep.gaps[gi];
        cfg.scenario.seed =
            episode_seed(sweep.master_seed, static_cast<int>(run));
        cfg.planner.w_t = sweep.w_ts[wi];
        cfg.record_history = false;
        cfg.record_decisions = false;
        results[idx] = run_episode(cfg);
      } catch (...) {
        std::lock_guard<std::mutex> guard(progress_mutex);
        if (!failure) failure = std::current_exception();
      }
      if (remaining[cell].fetch_sub(1) == 1) {
        StatsRow row = reduce_cell(cell);
        std::lock_guard<std::mutex> guard(progress_mutex);
        if (progress) progress(row);
        rows[cell] = std::move(row);
      }
    }
  };

  const int n_threads = std::max(1, sweep.threads);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return rows;
}

std::string stats_csv(const std::vector<StatsRow>& rows, bool include_timing) {
  std::ostringstream out;
  out << "gap_m,w_t,runs,p_gap,p_before,p_gentle,p_failsafe,collisions,"
         "mean_failsafe_decel,max_failsafe_decel,mean_cycle_ms\n";
  for (const auto& r : rows) {
    out << format_double(r.gap) << ',' << format_double(r.w_t) << ','
        << r.runs << ',' << format_double(r.p_gap) << ','
        << format_double(r.p_before) << ',' << format_double(r.p_gentle)
        << ',' << format_double(r.p_failsafe) << ',' << r.collisions << ','
        << format_double(r.mean_failsafe_decel) << ','
        << format_double(r.max_failsafe_decel) << ','
        << format_double(include_timing ? r.mean_cycle_ms : 0.0) << '\n';
  }
  return out.str();
}

}  // namespace merge_planner
