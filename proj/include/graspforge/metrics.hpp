// Copyright 2026 The GraspForge Authors
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

// Evaluation metrics: distance to target, path length, movement efficiency
// and directional error, per finger and aggregated over the hand.

#pragma once

#include <array>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "graspforge/controller.hpp"

namespace graspforge {

inline constexpr double kEfficiencyEpsilon = 1e-6;
inline constexpr double kSuccessThreshold = 0.1;  // m

/// eta = d_t / (d_m + 1e-6).
inline double movement_efficiency(double target_distance, double total_movement) {
  if (target_distance < 0 || total_movement < 0)
    throw ValidationError("movement_efficiency: distances must be non-negative");
  return target_distance / (total_movement + kEfficiencyEpsilon);
}

inline double path_length(std::span<const Vec3> trajectory) {
  if (trajectory.empty()) throw ValidationError("path_length: empty trajectory");
  double total = 0.0;
  for (std::size_t k = 1; k < trajectory.size(); ++k)
    total += (trajectory[k] - trajectory[k - 1]).norm();
  return total;
}

struct PositionalError {
  Vec3 error = Vec3::Zero();  // final - target
  double distance = 0.0;
};

inline PositionalError positional_error(const Vec3& final_position, const Vec3& target) {
  const Vec3 e = final_position - target;
  return {e, e.norm()};
}

enum class EfficiencyBasis { final_error, straight_line };

inline EfficiencyBasis parse_efficiency_basis(std::string_view text) {
  if (text == "final_error") return EfficiencyBasis::final_error;
  if (text == "straight_line") return EfficiencyBasis::straight_line;
  throw ConfigError("unknown efficiency basis '" + std::string(text) +
                    "' (expected final_error or straight_line)");
}

inline const char* to_string(EfficiencyBasis b) {
  return b == EfficiencyBasis::final_error ? "final_error" : "straight_line";
}

struct FingerMetrics {
  std::string finger;
  double distance_to_target = 0.0;
  double total_movement = 0.0;
  double efficiency = 0.0;
  bool success = false;
  Vec3 directional_error = Vec3::Zero();
};

struct DistanceSummary {
  double mean = 0.0;
  double std = 0.0;  // population
  double success_rate = 0.0;
};

inline DistanceSummary summarize_distances(std::span<const double> distances,
                                           double success_threshold = kSuccessThreshold) {
  DistanceSummary s;
  if (distances.empty()) return s;
  const double n = static_cast<double>(distances.size());
  int successes = 0;
  for (double d : distances) {
    s.mean += d;
    if (d < success_threshold) ++successes;
  }
  s.mean /= n;
  for (double d : distances) s.std += (d - s.mean) * (d - s.mean);
  s.std = std::sqrt(s.std / n);
  s.success_rate = successes / n;
  return s;
}

struct RunMetrics {
  std::vector<FingerMetrics> fingers;
  DistanceSummary distances;
  std::array<std::vector<double>, 3> axis_errors;  // x, y, z samples, one per finger
  EfficiencyBasis basis = EfficiencyBasis::final_error;
};

inline RunMetrics summarize_run(const TrajectoryLog& log, const std::map<std::string, Pose>& targets,
                                EfficiencyBasis basis = EfficiencyBasis::final_error,
                                double success_threshold = kSuccessThreshold) {
  if (log.entries.empty()) throw ValidationError("summarize_run: empty trajectory log");
  RunMetrics out;
  out.basis = basis;
  std::vector<double> distances;
  const auto& first = log.entries.front().fingertips;
  for (std::size_t f = 0; f < first.size(); ++f) {
    const std::string& name = first[f].first;
    auto target = targets.find(name);
    if (target == targets.end())
      throw LookupError("summarize_run: no target for finger '" + name + "'");
    std::vector<Vec3> path;
    path.reserve(log.entries.size() + 1);
    if (f < log.start.size()) path.push_back(log.start[f].second);
    for (const auto& e : log.entries) path.push_back(e.fingertips[f].second);

    FingerMetrics m;
    m.finger = name;
    const auto err = positional_error(path.back(), target->second.position);
    m.distance_to_target = err.distance;
    m.directional_error = err.error;
    m.total_movement = path_length(path);
    const double d_t = basis == EfficiencyBasis::final_error
                           ? m.distance_to_target
                           : (target->second.position - path.front()).norm();
    m.efficiency = movement_efficiency(d_t, m.total_movement);
    m.success = m.distance_to_target < success_threshold;
    for (int a = 0; a < 3; ++a) out.axis_errors[a].push_back(err.error[a]);
    distances.push_back(m.distance_to_target);
    out.fingers.push_back(std::move(m));
  }
  out.distances = summarize_distances(distances, success_threshold);
  return out;
}

}  // namespace graspforge
