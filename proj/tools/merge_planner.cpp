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

// merge_planner: single plans, Monte-Carlo sweeps, replanning replays and
// timing benchmarks. Every config key is also a flag: `w_t` is `--w-t`.

#include <algorithm>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "merge_planner/commands.hpp"

namespace mp = merge_planner;

namespace {

std::string flag_name(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return "--" + key;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Longitudinal merge planner toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  bool no_timing = false;
  app.add_option("--config", config_path, "key = value configuration file");
  app.add_flag("--no-timing", no_timing,
               "write 0 in wall-clock columns (byte-stable CSVs)");

  // Values of the generic key flags, applied after the config file.
  std::map<std::string, std::string> overrides;
  for (const auto& key : mp::config_keys()) {
    app.add_option_function<std::string>(
        flag_name(key.name),
        [&overrides, name = key.name](const std::string& v) {
          overrides[name] = v;
        },
        key.help);
  }

  auto* plan = app.add_subcommand("plan", "run one planning cycle");
  std::string ego_text = "20,8.333333333333334,0";
  std::vector<std::string> object_texts;
  plan->add_option("--ego", ego_text, "ego state s,v,a")->capture_default_str();
  plan->add_option("--object", object_texts,
                   "main-road object s,v[,length[,var_s,var_v]] (repeatable)");

  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo sweep over gap sizes and weights");
  auto* replay = app.add_subcommand("replay", "replanning under target noise");
  std::string noise_path;
  replay->add_option("--noise", noise_path, "noise CSV with header t,ds,dv");
  auto* bench = app.add_subcommand("bench", "time planning cycles by decision class");
  auto* defaults = app.add_subcommand("defaults", "print every key with its value");

  CLI11_PARSE(app, argc, argv);

  try {
    mp::RunConfig cfg;
    if (!config_path.empty()) mp::apply_config_file(cfg, config_path);
    for (const auto& key : mp::config_keys()) {
      const auto it = overrides.find(key.name);
      if (it != overrides.end()) mp::set_config_value(cfg, key.name, it->second);
    }
    if (no_timing) cfg.timing = false;

    if (plan->parsed()) {
      std::vector<mp::ObjectSpec> objects;
      for (const auto& o : object_texts) objects.push_back(mp::parse_object_spec(o));
      mp::cmd_plan(cfg, mp::parse_state_spec(ego_text), objects, std::cout);
    } else if (sweep->parsed()) {
      mp::cmd_sweep(cfg, std::cout, std::cerr);
    } else if (replay->parsed()) {
      // In replay the plain weight flag selects the compared weight.
      if (overrides.count("w_t")) mp::set_config_value(cfg, "replay_w_t", overrides["w_t"]);
      std::optional<std::string> noise;
      if (!noise_path.empty()) noise = noise_path;
      mp::cmd_replay(cfg, noise, std::cout);
    } else if (bench->parsed()) {
      mp::cmd_bench(cfg, std::cout);
    } else if (defaults->parsed()) {
      mp::cmd_defaults(cfg, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
