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

#include "merge_planner/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>
#include <stdexcept>

#include "merge_planner/csv.hpp"
#include "merge_planner/replay.hpp"
#include "merge_planner/sim.hpp"

namespace merge_planner {
namespace {

constexpr double kTrajectorySampleDt = 0.02;
constexpr std::uint64_t kReplayStream = 7;

std::vector<double> split_numbers(const std::string& text) {
  std::vector<double> fields;
  if (!parse_csv_doubles(text, fields)) {
    throw ConfigError("expected comma separated numbers, got '" + text + "'");
  }
  return fields;
}

SimConfig synced(const RunConfig& cfg) {
  SimConfig sim = cfg.sim;
  sim.planner.dt_cycle = sim.dt_cycle;
  return sim;
}

std::string candidates_csv(const std::vector<MergeCandidate>& candidates) {
  std::ostringstream os;
  os << "option,gap_index,t_f,s_f,v_f,jerk_cost,p_a,p_b,cost,pnr\n";
  for (const auto& c : candidates) {
    os << to_string(c.option_kind) << ',' << c.gap_index << ','
       << format_double(c.t_f) << ',' << format_double(c.target.s) << ','
       << format_double(c.target.v) << ',' << format_double(c.jerk_cost) << ','
       << format_double(c.p_risk_a) << ',' << format_double(c.p_risk_b) << ','
       << format_double(c.cost) << ','
       << (c.pnr ? format_double(c.pnr->t) : std::string("")) << '\n';
  }
  return os.str();
}

std::string executed_csv(const std::vector<TrajectoryRow>& rows) {
  std::ostringstream os;
  write_trajectory_csv(os, rows);
  return os.str();
}

double percentile(std::vector<double> sorted, double p) {
  if (sorted.empty()) return 0.0;
  std::sort(sorted.begin(), sorted.end());
  const auto rank = static_cast<std::size_t>(
      std::ceil(p * static_cast<double>(sorted.size())));
  return sorted[std::clamp<std::size_t>(rank, 1, sorted.size()) - 1];
}

double median(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace

ObjectSpec parse_object_spec(const std::string& text) {
  const auto f = split_numbers(text);
  if (f.size() != 2 && f.size() != 3 && f.size() != 5) {
    throw ConfigError("object must be s,v[,length[,var_s,var_v]], got '" +
                      text + "'");
  }
  ObjectSpec o;
  o.s = f[0];
  o.v = f[1];
  if (f.size() >= 3) o.length = f[2];
  if (f.size() == 5) {
    o.var_s = f[3];
    o.var_v = f[4];
  }
  if (!(o.length > 0.0) || o.var_s < 0.0 || o.var_v < 0.0) {
    throw ConfigError("object needs length > 0 and variances >= 0: '" + text +
                      "'");
  }
  return o;
}

State1D parse_state_spec(const std::string& text) {
  const auto f = split_numbers(text);
  if (f.size() != 3) {
    throw ConfigError("state must be s,v,a, got '" + text + "'");
  }
  return {f[0], f[1], f[2]};
}

PlanningResult cmd_plan(const RunConfig& cfg, const State1D& ego,
                        const std::vector<ObjectSpec>& objects,
                        std::ostream& out) {
  cfg.validate();
  if (!is_finite(ego)) throw ConfigError("ego state must be finite");
  const SimConfig sim = synced(cfg);

  PlanningInput input;
  input.ego = ego;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    ObjectEstimate est;
    est.id = static_cast<int>(i);
    est.s_hat = objects[i].s;
    est.v_hat = objects[i].v;
    est.length = objects[i].length;
    est.cov << objects[i].var_s, 0.0, 0.0, objects[i].var_v;
    input.objects.push_back(est);
  }
  const PlanningResult result =
      plan_cycle(input, sim.map, sim.planner, LockState{});

  const std::filesystem::path dir(cfg.out);
  write_trajectory_csv(dir / "trajectory.csv",
                       sample_trajectory(result.decision.trajectory,
                                         kTrajectorySampleDt));
  write_text_file(dir / "decisions.csv",
                  decision_log_header() + "\n" +
                      decision_log_row(0, 0.0, result.decision) + "\n");
  write_text_file(dir / "candidates.csv", candidates_csv(result.candidates));

  out << "class " << to_string(result.decision.cls);
  if (result.decision.candidate) {
    out << " t_f " << format_double(result.decision.candidate->t_f) << " cost "
        << format_double(result.decision.candidate->cost);
  } else if (result.decision.cls == DecisionClass::kGentleStop) {
    out << " cost " << format_double(jerk_cost(result.decision.trajectory));
  } else {
    out << " decel " << format_double(result.decision.fail_safe_decel);
  }
  out << '\n';
  return result;
}

std::vector<StatsRow> cmd_sweep(const RunConfig& cfg, std::ostream& out,
                                std::ostream& progress) {
  cfg.validate();
  const SweepConfig sweep = cfg.sweep();
  const std::size_t cells = sweep.gaps.size() * sweep.w_ts.size();
  std::size_t done = 0;
  const auto rows = monte_carlo(sweep, synced(cfg), [&](const StatsRow& row) {
    ++done;
    progress << "cell " << done << "/" << cells << " gap "
             << format_double(row.gap) << " w_t " << format_double(row.w_t)
             << " p_gap " << format_double(row.p_gap) << '\n';
    progress.flush();
  });
  const std::filesystem::path path = std::filesystem::path(cfg.out) / "stats.csv";
  write_text_file(path, stats_csv(rows, cfg.timing));

  int collisions = 0;
  for (const auto& r : rows) {
    collisions += r.collisions;
    for (auto seed : r.collision_seeds) {
      out << "collision gap " << format_double(r.gap) << " w_t "
          << format_double(r.w_t) << " seed " << seed << '\n';
    }
  }
  out << "wrote " << path.string() << " (" << rows.size() << " cells, "
      << collisions << " collisions)\n";
  return rows;
}

double cmd_replay(const RunConfig& cfg, const std::optional<std::string>& noise_file,
                  std::ostream& out, std::vector<ReplaySummaryRow>* rows_out) {
  cfg.validate();
  std::vector<std::vector<TargetNoise>> sequences;
  std::vector<std::uint64_t> seeds;
  if (noise_file) {
    sequences.push_back(read_noise_csv(std::filesystem::path(*noise_file)));
    seeds.push_back(0);
  } else {
    for (int k = 0; k < cfg.replay_seeds; ++k) {
      const std::uint64_t s =
          derive_seed(cfg.seed, static_cast<std::uint64_t>(k), 0, kReplayStream);
      sequences.push_back(generate_target_noise(cfg.replay, s));
      seeds.push_back(s);
    }
  }

  std::vector<ReplaySummaryRow> rows;
  const std::filesystem::path dir(cfg.out);
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    const ReplayResult ref = replay_noisy_target(cfg.replay, sequences[i], 1.0);
    const ReplayResult wtd =
        replay_noisy_target(cfg.replay, sequences[i], cfg.replay_w_t);
    ReplaySummaryRow row;
    row.seed = seeds[i];
    row.energy_reference = ref.jerk_energy;
    row.energy_weighted = wtd.jerk_energy;
    row.ratio = wtd.jerk_energy / ref.jerk_energy;
    rows.push_back(row);
    if (i == 0) {
      write_text_file(dir / "replay_reference.csv", executed_csv(ref.executed));
      write_text_file(dir / "replay_weighted.csv", executed_csv(wtd.executed));
      std::ostringstream noise;
      noise << "t,ds,dv\n";
      for (const auto& n : sequences[i]) {
        noise << format_double(n.t) << ',' << format_double(n.ds) << ','
              << format_double(n.dv) << '\n';
      }
      write_text_file(dir / "replay_noise.csv", noise.str());
    }
  }

  std::ostringstream summary;
  summary << "seed,w_t,energy_w1,energy_wt,ratio\n";
  std::vector<double> ratios;
  for (const auto& r : rows) {
    summary << r.seed << ',' << format_double(cfg.replay_w_t) << ','
            << format_double(r.energy_reference) << ','
            << format_double(r.energy_weighted) << ',' << format_double(r.ratio)
            << '\n';
    ratios.push_back(r.ratio);
  }
  write_text_file(dir / "replay_summary.csv", summary.str());
  const double med = median(ratios);
  out << "replay w_t " << format_double(cfg.replay_w_t) << " sequences "
      << rows.size() << " median jerk-energy ratio " << format_double(med)
      << '\n';
  if (rows_out) *rows_out = std::move(rows);
  return med;
}

std::vector<BenchRow> cmd_bench(const RunConfig& cfg, std::ostream& out) {
  cfg.validate();
  SimConfig sim = synced(cfg);
  sim.record_history = false;
  sim.record_decisions = false;
  const auto gaps = cfg.gaps();

  std::map<DecisionClass, std::vector<double>> times;
  std::size_t total = 0;
  for (int run = 0; total < static_cast<std::size_t>(cfg.bench_cycles) ||
                    run < static_cast<int>(gaps.size());
       ++run) {
    const std::size_t gi = static_cast<std::size_t>(run) % gaps.size();
    sim.scenario.gap_size = gaps[gi];
    sim.scenario.seed = episode_seed(cfg.seed, run);
    const EpisodeResult ep = run_episode(sim);
    for (const auto& c : ep.cycle_times) {
      times[c.cls].push_back(c.ms);
      ++total;
    }
  }

  std::vector<BenchRow> rows;
  std::ostringstream csv;
  csv << "class,cycles,mean_ms,median_ms,p99_ms,max_ms\n";
  for (const auto& [cls, ms] : times) {
    BenchRow r;
    r.cls = cls;
    r.cycles = ms.size();
    double sum = 0.0;
    for (double m : ms) sum += m;
    r.mean_ms = sum / static_cast<double>(ms.size());
    r.median_ms = median(ms);
    r.p99_ms = percentile(ms, 0.99);
    r.max_ms = *std::max_element(ms.begin(), ms.end());
    rows.push_back(r);
    csv << to_string(cls) << ',' << r.cycles << ',' << format_double(r.mean_ms)
        << ',' << format_double(r.median_ms) << ',' << format_double(r.p99_ms)
        << ',' << format_double(r.max_ms) << '\n';
    out << to_string(cls) << ": " << r.cycles << " cycles, mean "
        << format_double(r.mean_ms) << " ms, median "
        << format_double(r.median_ms) << " ms, p99 "
        << format_double(r.p99_ms) << " ms\n";
  }
  write_text_file(std::filesystem::path(cfg.out) / "bench.csv", csv.str());
  return rows;
}

void cmd_defaults(const RunConfig& cfg, std::ostream& out) {
  out << dump_config(cfg);
}

}  // namespace merge_planner
