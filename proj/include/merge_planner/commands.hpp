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

// Subcommands of the merge_planner tool. Each validates the configuration,
// writes its CSV files below cfg.out and prints a short summary to `out`.
// Invalid input throws ConfigError or std::invalid_argument.

#ifndef MERGE_PLANNER_COMMANDS_HPP_
#define MERGE_PLANNER_COMMANDS_HPP_

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "merge_planner/planner.hpp"
#include "merge_planner/run_config.hpp"

namespace merge_planner {

struct ObjectSpec {
  double s = 0.0;
  double v = 0.0;
  double length = 4.0;
  double var_s = 0.0;
  double var_v = 0.0;
};

/// Parses "s,v[,length[,var_s,var_v]]".
ObjectSpec parse_object_spec(const std::string& text);
/// Parses "s,v,a".
State1D parse_state_spec(const std::string& text);

/// One planning cycle: trajectory.csv, decisions.csv and candidates.csv.
PlanningResult cmd_plan(const RunConfig& cfg, const State1D& ego,
                        const std::vector<ObjectSpec>& objects,
                        std::ostream& out);

/// Monte-Carlo sweep over the configured grid: stats.csv.
std::vector<StatsRow> cmd_sweep(const RunConfig& cfg, std::ostream& out,
                                std::ostream& progress);

struct ReplaySummaryRow {
  std::uint64_t seed = 0;
  double energy_reference = 0.0;  // w_t = 1
  double energy_weighted = 0.0;   // w_t = replay_w_t
  double ratio = 0.0;             // weighted / reference
};

/// Replanning under target noise for w_t = 1 and replay_w_t on shared noise.
/// With `noise_file` that sequence is used once, otherwise replay_seeds
/// random sequences. Writes replay_reference.csv and replay_weighted.csv
/// (first sequence), replay_noise.csv and replay_summary.csv. Returns the
/// median ratio.
double cmd_replay(const RunConfig& cfg, const std::optional<std::string>& noise_file,
                  std::ostream& out, std::vector<ReplaySummaryRow>* rows = nullptr);

struct BenchRow {
  DecisionClass cls = DecisionClass::kFailSafe;
  std::size_t cycles = 0;
  double mean_ms = 0.0;
  double median_ms = 0.0;
  double p99_ms = 0.0;
  double max_ms = 0.0;
};

/// Times planning cycles of simulated episodes over the gap grid until at
/// least bench_cycles cycles were measured: bench.csv.
std::vector<BenchRow> cmd_bench(const RunConfig& cfg, std::ostream& out);

/// Prints every key with its default value.
void cmd_defaults(const RunConfig& cfg, std::ostream& out);

}  // namespace merge_planner

#endif  // MERGE_PLANNER_COMMANDS_HPP_
