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

#ifndef MERGE_PLANNER_RUN_CONFIG_HPP_
#define MERGE_PLANNER_RUN_CONFIG_HPP_

#include <cstdint>
#include <functional>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

#include "merge_planner/replay.hpp"
#include "merge_planner/sim.hpp"

namespace merge_planner {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every tunable of the toolkit. The `key = value` names are listed by
/// `config_keys()`; `defaults` prints them all.
struct RunConfig {
  SimConfig sim;
  ReplayConfig replay;
  double gap_min = 30.0;
  double gap_max = 65.0;
  double gap_step = 5.0;
  std::vector<double> sweep_w_t = {1.0, 2.0, 5.0, 12.5, 25.0};
  int runs = 1000;
  double replay_w_t = 12.5;  // weight compared against w_t = 1 in replay
  int replay_seeds = 50;
  int bench_cycles = 1000;
  std::uint64_t seed = 1;
  int threads = 1;
  bool timing = true;
  std::string out = "out";

  RunConfig();

  /// Gap sizes gap_min, gap_min + gap_step, ..., gap_max.
  std::vector<double> gaps() const;
  SweepConfig sweep() const;

  /// Throws ConfigError if any value is out of its domain.
  void validate() const;
};

struct ConfigKey {
  std::string name;
  std::string help;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

const std::vector<ConfigKey>& config_keys();

/// Sets one key; throws ConfigError for unknown keys or unparsable values.
void set_config_value(RunConfig& cfg, const std::string& key,
                      const std::string& value);

/// Applies a `key = value` file; '#' starts a comment. Unknown keys and
/// malformed lines are errors naming the line.
void apply_config_stream(RunConfig& cfg, std::istream& in,
                         const std::string& source = "config");
void apply_config_file(RunConfig& cfg, const std::string& path);

/// All keys with their current values, one `key = value` line each.
std::string dump_config(const RunConfig& cfg);

}  // namespace merge_planner

#endif  // MERGE_PLANNER_RUN_CONFIG_HPP_
