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

#ifndef MERGE_PLANNER_CSV_HPP_
#define MERGE_PLANNER_CSV_HPP_

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "merge_planner/trajectory.hpp"

namespace merge_planner {

/// Shortest round-trip-safe text for a double (17 significant digits max).
std::string format_double(double x);

struct TrajectoryRow {
  double t = 0.0;
  State1D state;
  double jerk = 0.0;
};

/// Samples t = 0, dt, ..., horizon (horizon always included).
std::vector<TrajectoryRow> sample_trajectory(const Trajectory& traj, double dt);

/// CSV with header t,s,v,a,j.
void write_trajectory_csv(std::ostream& out, const std::vector<TrajectoryRow>& rows);
void write_trajectory_csv(const std::filesystem::path& path,
                          const std::vector<TrajectoryRow>& rows);

/// Writes `content` to `path`, creating parent directories. Throws
/// std::runtime_error on I/O failure.
void write_text_file(const std::filesystem::path& path, const std::string& content);

/// Splits one CSV line on commas and parses each field as a double.
/// Returns false if any field is not a number.
bool parse_csv_doubles(const std::string& line, std::vector<double>& out);

}  // namespace merge_planner

#endif  // MERGE_PLANNER_CSV_HPP_
