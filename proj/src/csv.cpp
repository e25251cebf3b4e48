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

#include "merge_planner/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace merge_planner {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::vector<TrajectoryRow> sample_trajectory(const Trajectory& traj, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("sampling step must be positive");
  std::vector<TrajectoryRow> rows;
  const double horizon = traj.horizon();
  const auto n = static_cast<long>(std::floor(horizon / dt + 1e-9));
  for (long k = 0; k <= n; ++k) {
    const double t = std::min(static_cast<double>(k) * dt, horizon);
    const TrajectorySample x = traj.eval(t);
    rows.push_back({t, x.state, x.jerk});
  }
  if (static_cast<double>(n) * dt < horizon - 1e-12) {
    const TrajectorySample x = traj.eval(horizon);
    rows.push_back({horizon, x.state, x.jerk});
  }
  return rows;
}

void write_trajectory_csv(std::ostream& out,
                          const std::vector<TrajectoryRow>& rows) {
  out << "t,s,v,a,j\n";
  for (const auto& r : rows) {
    out << format_double(r.t) << ',' << format_double(r.state.s) << ','
        << format_double(r.state.v) << ',' << format_double(r.state.a) << ','
        << format_double(r.jerk) << '\n';
  }
}

void write_trajectory_csv(const std::filesystem::path& path,
                          const std::vector<TrajectoryRow>& rows) {
  std::ostringstream ss;
  write_trajectory_csv(ss, rows);
  write_text_file(path, ss.str());
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

bool parse_csv_doubles(const std::string& line, std::vector<double>& out) {
  out.clear();
  std::size_t start = 0;
  while (start <= line.size()) {
    std::size_t end = line.find(',', start);
    if (end == std::string::npos) end = line.size();
    std::string field = line.substr(start, end - start);
    const auto first = field.find_first_not_of(" \t\r");
    const auto last = field.find_last_not_of(" \t\r");
    if (first == std::string::npos) return false;
    field = field.substr(first, last - first + 1);
    double value = 0.0;
    const auto res =
        std::from_chars(field.data(), field.data() + field.size(), value);
    if (res.ec != std::errc() || res.ptr != field.data() + field.size() ||
        !std::isfinite(value)) {
      return false;
    }
    out.push_back(value);
    start = end + 1;
  }
  return true;
}

}  // namespace merge_planner
