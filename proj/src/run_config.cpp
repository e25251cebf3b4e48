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

#include "merge_planner/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "merge_planner/csv.hpp"

namespace merge_planner {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size() ||
      !std::isfinite(out)) {
    throw ConfigError("invalid number '" + text + "' for key " + key);
  }
  return out;
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  Int out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw ConfigError("invalid integer '" + text + "' for key " + key);
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string v = trim(text);
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ConfigError("invalid boolean '" + text + "' for key " + key);
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
  if (out.empty()) throw ConfigError("empty list for key " + key);
  return out;
}

std::string list_to_string(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += format_double(xs[i]);
  }
  return out;
}

using Accessor = std::function<double&(RunConfig&)>;

ConfigKey real_key(std::string name, std::string help, Accessor field) {
  ConfigKey k;
  k.name = name;
  k.help = std::move(help);
  k.get = [field](const RunConfig& c) {
    return format_double(field(const_cast<RunConfig&>(c)));
  };
  k.set = [field, name](RunConfig& c, const std::string& v) {
    field(c) = parse_double(name, v);
  };
  return k;
}

template <typename Int>
ConfigKey int_key(std::string name, std::string help,
                  std::function<Int&(RunConfig&)> field) {
  ConfigKey k;
  k.name = name;
  k.help = std::move(help);
  k.get = [field](const RunConfig& c) {
    return std::to_string(field(const_cast<RunConfig&>(c)));
  };
  k.set = [field, name](RunConfig& c, const std::string& v) {
    field(c) = parse_int<Int>(name, v);
  };
  return k;
}

std::vector<ConfigKey> build_keys() {
  std::vector<ConfigKey> keys;
  auto real = [&keys](const char* name, const char* help, Accessor f) {
    keys.push_back(real_key(name, help, std::move(f)));
  };

  // Dynamic limits and comfort.
  real("a_min", "minimum acceleration of merge trajectories [m/s^2]",
       [](RunConfig& c) -> double& { return c.sim.planner.limits.a_min; });
  real("a_max", "maximum acceleration [m/s^2]",
       [](RunConfig& c) -> double& { return c.sim.planner.limits.a_max; });
  real("v_limit", "velocity bound of the constraint check [m/s]",
       [](RunConfig& c) -> double& { return c.sim.planner.limits.v_max; });
  real("b_max", "maximum fail-safe deceleration [m/s^2]",
       [](RunConfig& c) -> double& { return c.sim.planner.limits.b_max; });
  real("a_min_comfort", "gentle-stop deceleration bound [m/s^2]",
       [](RunConfig& c) -> double& { return c.sim.planner.a_min_comfort; });

  // Safety corridor and risk.
  real("t_safety", "safety time gap [s]",
       [](RunConfig& c) -> double& { return c.sim.planner.safety.t_safety; });
  real("s_margin", "safety margin [m]",
       [](RunConfig& c) -> double& { return c.sim.planner.safety.s_margin; });
  real("p_residual_max", "accepted residual risk per vehicle",
       [](RunConfig& c) -> double& {
         return c.sim.planner.safety.p_residual_max;
       });
  real("w_risk_a", "risk weight of the vehicle ahead",
       [](RunConfig& c) -> double& { return c.sim.planner.safety.w_risk_a; });
  real("w_risk_b", "risk weight of the vehicle behind",
       [](RunConfig& c) -> double& { return c.sim.planner.safety.w_risk_b; });

  // Planner sampling.
  real("w_t", "time weight of the trajectory generator (>= 1)",
       [](RunConfig& c) -> double& { return c.sim.planner.w_t; });
  real("dt_f", "arrival-time sampling step [s]",
       [](RunConfig& c) -> double& { return c.sim.planner.dt_f; });
  real("horizon", "longest arrival time [s]",
       [](RunConfig& c) -> double& { return c.sim.planner.horizon; });
  real("dt_check", "constraint check sampling step [s]",
       [](RunConfig& c) -> double& { return c.sim.planner.dt_check; });
  real("dt_pnr", "point-of-no-return sampling step [s]",
       [](RunConfig& c) -> double& { return c.sim.planner.dt_pnr; });
  real("dt_pred", "prediction grid step [s]",
       [](RunConfig& c) -> double& { return c.sim.planner.dt_pred; });
  real("q", "prediction process noise [m^2/s^4]",
       [](RunConfig& c) -> double& { return c.sim.planner.q; });
  real("gentle_stop_t_max", "longest gentle-stop horizon [s]",
       [](RunConfig& c) -> double& { return c.sim.planner.gentle_stop_t_max; });
  real("gentle_stop_dt", "gentle-stop horizon grid step [s]",
       [](RunConfig& c) -> double& { return c.sim.planner.gentle_stop_dt; });
  real("ego_length", "ego vehicle length [m]",
       [](RunConfig& c) -> double& { return c.sim.planner.ego_length; });

  // Map.
  real("s_yield", "yield line position [m]",
       [](RunConfig& c) -> double& { return c.sim.map.s_yield; });
  real("s_merge", "merge point position [m]",
       [](RunConfig& c) -> double& { return c.sim.map.s_merge; });
  real("v_max", "map target speed [m/s]",
       [](RunConfig& c) -> double& { return c.sim.map.v_max; });
  real("sight_range", "sight range before the merge point [m]",
       [](RunConfig& c) -> double& { return c.sim.map.sight_range; });
  real("passed_clearance", "objects further past the merge are ignored [m]",
       [](RunConfig& c) -> double& { return c.sim.map.passed_clearance; });

  // Tracking filter.
  real("filter_r", "measurement variance of the tracker [m^2]",
       [](RunConfig& c) -> double& { return c.sim.kalman.r; });
  real("filter_q", "process noise of the tracker [m^2/s^4]",
       [](RunConfig& c) -> double& { return c.sim.kalman.q; });
  real("filter_initial_speed", "speed assumed for new objects [m/s]",
       [](RunConfig& c) -> double& { return c.sim.kalman.initial_speed; });
  real("filter_initial_speed_var", "variance of that speed [m^2/s^2]",
       [](RunConfig& c) -> double& { return c.sim.kalman.initial_speed_var; });

  // IDM.
  real("idm_v0", "IDM desired speed [m/s]",
       [](RunConfig& c) -> double& { return c.sim.idm.v0; });
  real("idm_T", "IDM time headway [s]",
       [](RunConfig& c) -> double& { return c.sim.idm.T; });
  real("idm_s0", "IDM jam distance [m]",
       [](RunConfig& c) -> double& { return c.sim.idm.s0; });
  real("idm_a", "IDM maximum acceleration [m/s^2]",
       [](RunConfig& c) -> double& { return c.sim.idm.a; });
  real("idm_b", "IDM comfortable deceleration [m/s^2]",
       [](RunConfig& c) -> double& { return c.sim.idm.b; });
  real("idm_delta", "IDM acceleration exponent",
       [](RunConfig& c) -> double& { return c.sim.idm.delta; });
  real("idm_max_decel", "IDM output clamp [m/s^2]",
       [](RunConfig& c) -> double& { return c.sim.idm.max_decel; });

  // Scenario.
  real("gap_size", "gap for single episodes [m]",
       [](RunConfig& c) -> double& { return c.sim.scenario.gap_size; });
  real("arrival_min", "earliest lead arrival at the merge [s]",
       [](RunConfig& c) -> double& { return c.sim.scenario.arrival_min; });
  real("arrival_max", "latest lead arrival at the merge [s]",
       [](RunConfig& c) -> double& { return c.sim.scenario.arrival_max; });
  real("v_init_others", "initial main-road speed [m/s]",
       [](RunConfig& c) -> double& { return c.sim.scenario.v_init_others; });
  real("sigma_v", "initial speed noise [m/s]",
       [](RunConfig& c) -> double& { return c.sim.scenario.sigma_v; });
  real("sigma_a", "acceleration noise [m/s^2]",
       [](RunConfig& c) -> double& { return c.sim.scenario.sigma_a; });
  real("sigma_s", "position measurement noise [m]",
       [](RunConfig& c) -> double& { return c.sim.scenario.sigma_s; });
  real("ego_v_min", "lowest initial ego speed [m/s]",
       [](RunConfig& c) -> double& { return c.sim.scenario.ego_v_min; });
  real("ego_v_max", "highest initial ego speed [m/s]",
       [](RunConfig& c) -> double& { return c.sim.scenario.ego_v_max; });
  real("ego_start_offset", "ego start distance to the merge point [m]",
       [](RunConfig& c) -> double& { return c.sim.scenario.ego_start_offset; });
  real("vehicle_length", "main-road vehicle length [m]",
       [](RunConfig& c) -> double& { return c.sim.scenario.vehicle_length; });

  // Simulation loop.
  real("dt_sim", "simulation step [s]",
       [](RunConfig& c) -> double& { return c.sim.dt_sim; });
  real("dt_cycle", "planning cycle [s]",
       [](RunConfig& c) -> double& { return c.sim.dt_cycle; });
  real("gentle_stop_hold", "time held at the yield line [s]",
       [](RunConfig& c) -> double& { return c.sim.gentle_stop_hold; });
  real("max_time", "episode time limit [s]",
       [](RunConfig& c) -> double& { return c.sim.max_time; });

  // Sweep.
  real("gap_min", "smallest swept gap [m]",
       [](RunConfig& c) -> double& { return c.gap_min; });
  real("gap_max", "largest swept gap [m]",
       [](RunConfig& c) -> double& { return c.gap_max; });
  real("gap_step", "gap sweep step [m]",
       [](RunConfig& c) -> double& { return c.gap_step; });
  {
    ConfigKey k;
    k.name = "sweep_w_t";
    k.help = "comma separated time weights of the sweep";
    k.get = [](const RunConfig& c) { return list_to_string(c.sweep_w_t); };
    k.set = [](RunConfig& c, const std::string& v) {
      c.sweep_w_t = parse_list("sweep_w_t", v);
    };
    keys.push_back(k);
  }
  keys.push_back(int_key<int>("runs", "episodes per sweep cell",
                              [](RunConfig& c) -> int& { return c.runs; }));

  // Replay experiment.
  real("replay_s0", "replay initial position [m]",
       [](RunConfig& c) -> double& { return c.replay.x0.s; });
  real("replay_v0", "replay initial speed [m/s]",
       [](RunConfig& c) -> double& { return c.replay.x0.v; });
  real("replay_a0", "replay initial acceleration [m/s^2]",
       [](RunConfig& c) -> double& { return c.replay.x0.a; });
  real("replay_target_s", "nominal target position [m]",
       [](RunConfig& c) -> double& { return c.replay.nominal_target.s; });
  real("replay_target_v", "nominal target speed [m/s]",
       [](RunConfig& c) -> double& { return c.replay.nominal_target.v; });
  real("replay_t_arrival", "nominal arrival time [s]",
       [](RunConfig& c) -> double& { return c.replay.t_arrival; });
  real("replay_lock_time", "time after which the target is frozen [s]",
       [](RunConfig& c) -> double& { return c.replay.lock_time; });
  real("replay_dt", "replanning period of the replay [s]",
       [](RunConfig& c) -> double& { return c.replay.dt_cycle; });
  real("replay_w_t", "time weight compared against w_t = 1 in replay",
       [](RunConfig& c) -> double& { return c.replay_w_t; });
  keys.push_back(int_key<int>("replay_seeds", "random noise sequences",
                              [](RunConfig& c) -> int& { return c.replay_seeds; }));

  // General.
  keys.push_back(int_key<int>("bench_cycles", "minimum timed cycles",
                              [](RunConfig& c) -> int& { return c.bench_cycles; }));
  keys.push_back(int_key<std::uint64_t>(
      "seed", "master seed", [](RunConfig& c) -> std::uint64_t& { return c.seed; }));
  keys.push_back(int_key<int>("threads", "worker threads",
                              [](RunConfig& c) -> int& { return c.threads; }));
  {
    ConfigKey k;
    k.name = "timing";
    k.help = "write wall-clock columns (false writes 0)";
    k.get = [](const RunConfig& c) { return std::string(c.timing ? "true" : "false"); };
    k.set = [](RunConfig& c, const std::string& v) { c.timing = parse_bool("timing", v); };
    keys.push_back(k);
  }
  {
    ConfigKey k;
    k.name = "out";
    k.help = "output directory";
    k.get = [](const RunConfig& c) { return c.out; };
    k.set = [](RunConfig& c, const std::string& v) {
      const std::string t = trim(v);
      if (t.empty()) throw ConfigError("empty value for key out");
      c.out = t;
    };
    keys.push_back(k);
  }
  return keys;
}

}  // namespace

RunConfig::RunConfig() {
  threads = std::max(1u, std::thread::hardware_concurrency());
}

std::vector<double> RunConfig::gaps() const {
  std::vector<double> out;
  if (!(gap_step > 0.0) || gap_max < gap_min) return out;
  for (int k = 0;; ++k) {
    const double g = gap_min + k * gap_step;
    if (g > gap_max + 1e-9) break;
    out.push_back(g);
  }
  return out;
}

SweepConfig RunConfig::sweep() const {
  SweepConfig s;
  s.gaps = gaps();
  s.w_ts = sweep_w_t;
  s.runs = runs;
  s.master_seed = seed;
  s.threads = threads;
  return s;
}

void RunConfig::validate() const {
  try {
    SimConfig copy = sim;
    copy.planner.dt_cycle = copy.dt_cycle;
    copy.validate();
    replay.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  for (double w : sweep_w_t) {
    if (!(w >= 1.0)) throw ConfigError("sweep_w_t entries must be >= 1");
  }
  if (!(gap_step > 0.0) || gap_max < gap_min || !(gap_min > 0.0)) {
    throw ConfigError("gap sweep needs 0 < gap_min <= gap_max, gap_step > 0");
  }
  if (!(replay_w_t >= 1.0)) throw ConfigError("replay_w_t must be >= 1");
  if (runs < 1 || replay_seeds < 1 || bench_cycles < 1 || threads < 1) {
    throw ConfigError("runs, replay_seeds, bench_cycles, threads must be >= 1");
  }
}

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = build_keys();
  return keys;
}

void set_config_value(RunConfig& cfg, const std::string& key,
                      const std::string& value) {
  for (const auto& k : config_keys()) {
    if (k.name == key) {
      k.set(cfg, value);
      if (key == "dt_cycle") cfg.sim.planner.dt_cycle = cfg.sim.dt_cycle;
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

void apply_config_stream(RunConfig& cfg, std::istream& in,
                         const std::string& source) {
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    try {
      set_config_value(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": " +
                        e.what());
    }
  }
}

void apply_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  apply_config_stream(cfg, in, path);
}

std::string dump_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& k : config_keys()) {
    out += "# " + k.help + "\n" + k.name + " = " + k.get(cfg) + "\n";
  }
  return out;
}

}  // namespace merge_planner
