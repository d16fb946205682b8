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

// Two-level grasp executor.
//
// High level: pre-grasp positioning, contact optimisation, stability
// monitoring. Low level: a rate-limited first-order joint position servo
// integrated with explicit Euler at the run frequency.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "graspforge/grasp_validation.hpp"
#include "graspforge/ik_solver.hpp"

namespace graspforge {

struct RunConfig {
  double hz = 240.0;
  int max_steps = 1000;
  double joint_rate_limit = 4.0;  // rad/s
  double servo_gain = 20.0;       // 1/s
  int log_every = 1;

  void validate() const {
    if (!(hz > 0)) throw ConfigError("run.hz must be > 0");
    if (max_steps < 1) throw ConfigError("run.max_steps must be >= 1");
    if (!(joint_rate_limit >= 0)) throw ConfigError("run.joint_rate_limit must be >= 0");
    if (!(servo_gain >= 0)) throw ConfigError("run.servo_gain must be >= 0");
    if (log_every < 1) throw ConfigError("run.log_every must be >= 1");
  }
};

enum class Phase { pre_grasp, contact_opt, monitor };

inline const char* to_string(Phase p) {
  switch (p) {
    case Phase::pre_grasp: return "pre_grasp";
    case Phase::contact_opt: return "contact_opt";
    case Phase::monitor: return "monitor";
  }
  return "pre_grasp";
}

struct LogEntry {
  int step = 0;  // steps taken so far, 1-based
  double time = 0.0;
  Phase phase = Phase::pre_grasp;
  int contact_count = 0;
  std::vector<std::pair<std::string, Vec3>> fingertips;  // world frame, finger order
  JointState state;
};

struct TrajectoryLog {
  std::vector<std::pair<std::string, Vec3>> start;  // fingertips before the first step
  std::vector<LogEntry> entries;
};

struct GraspExecution {
  JointState final_state;
  TrajectoryLog log;
  GraspAssessment assessment;
  int steps = 0;
  HandIkSolution pre_grasp_ik;
  HandIkSolution grasp_ik;
};

inline constexpr double kPreGraspOffset = 0.03;  // m, outward from the object
inline constexpr double kPreGraspBudget = 0.2;   // fraction of max_steps
inline constexpr double kSettleTolerance = 1e-3; // rad
inline constexpr int kValidatedHoldSteps = 50;

/// theta += clamp(gain * (goal - theta), +-rate) / hz, then clamp to limits.
/// Joints absent from `goal` are left untouched.
inline JointState step_servo(const JointState& state, const JointState& goal, const RunConfig& run,
                             const KinematicChain& chain) {
  JointState next = state;
  for (const auto& [j, target] : goal.values) {
    if (!next.contains(j)) continue;
    const double current = next.at(j);
    const double rate = std::clamp(run.servo_gain * (target - current), -run.joint_rate_limit,
                                   run.joint_rate_limit);
    next.set(j, current + rate / run.hz);
  }
  return clamp_to_limits(chain, next);
}

inline std::vector<std::pair<std::string, Vec3>> fingertip_positions(const Scene& scene,
                                                                     const JointState& state) {
  std::vector<std::pair<std::string, Vec3>> out;
  const Isometry base = scene.hand_base.isometry();
  for (const auto& f : scene.hand().fingers())
    out.emplace_back(f.name, base * link_transform(scene.hand(), state, f.end_effector).translation());
  return out;
}

/// Targets moved kPreGraspOffset outward along the object normal closest to each target.
inline std::map<std::string, Pose> pre_grasp_targets(const Scene& scene,
                                                     const std::map<std::string, Pose>& targets) {
  std::map<std::string, Pose> out;
  for (const auto& [name, pose] : targets) {
    const BoxQuery q = closest_point_box(pose.position, scene.object);
    Pose p = pose;
    p.position += kPreGraspOffset * q.normal;
    out.emplace(name, p);
  }
  return out;
}

inline std::map<std::string, Pose> to_hand_frame(const Scene& scene,
                                                 const std::map<std::string, Pose>& world) {
  const Isometry inv = scene.hand_base.isometry().inverse();
  std::map<std::string, Pose> out;
  for (const auto& [name, pose] : world)
    out.emplace(name, Pose::from_isometry(inv * pose.isometry()));
  return out;
}

inline double max_joint_error(const JointState& state, const JointState& goal) {
  double worst = 0.0;
  for (const auto& [j, target] : goal.values)
    if (state.contains(j)) worst = std::max(worst, std::abs(target - state.at(j)));
  return worst;
}

inline GraspExecution execute_grasp(const Scene& scene, const std::map<std::string, Pose>& targets,
                                    const RunConfig& run, const IkConfig& ik,
                                    const ValidationConfig& validation,
                                    const JointState& initial) {
  run.validate();
  ik.validate();
  validation.validate();
  const KinematicChain& chain = scene.hand();

  GraspExecution out;
  JointState state = clamp_to_limits(chain, initial);
  int step = 0;
  std::vector<ContactPoint> contacts;
  out.log.start = fingertip_positions(scene, state);

  auto advance = [&](const JointState& goal, Phase phase) {
    state = step_servo(state, goal, run, chain);
    contacts = detect_contacts(scene, state);
    ++step;
    if (step % run.log_every == 0) {
      LogEntry e;
      e.step = step;
      e.time = static_cast<double>(step) / run.hz;
      e.phase = phase;
      e.contact_count = static_cast<int>(contacts.size());
      e.fingertips = fingertip_positions(scene, state);
      e.state = state;
      out.log.entries.push_back(std::move(e));
    }
  };

  // Pre-grasp: open onto the offset targets.
  out.pre_grasp_ik = solve_hand_ik(chain, to_hand_frame(scene, pre_grasp_targets(scene, targets)),
                                   state, ik);
  const JointState pre_goal = out.pre_grasp_ik.state;
  const int budget = static_cast<int>(kPreGraspBudget * run.max_steps);
  while (step < budget && max_joint_error(state, pre_goal) >= kSettleTolerance)
    advance(pre_goal, Phase::pre_grasp);

  // Contact optimisation: close on the true targets; a finger whose contact
  // force reaches the established-contact threshold stops advancing.
  out.grasp_ik = solve_hand_ik(chain, to_hand_frame(scene, targets), pre_goal, ik);
  JointState goal = out.grasp_ik.state;
  std::map<std::string, bool> latched;
  Phase phase = Phase::contact_opt;
  int validated_hold = 0;
  while (step < run.max_steps) {
    advance(goal, phase);
    if (phase == Phase::contact_opt) {
      for (const auto& c : contacts) {
        if (c.normal_force < validation.min_contact_force || latched[c.finger]) continue;
        latched[c.finger] = true;
        for (std::size_t j : chain.finger(c.finger).joints) goal.set(j, state.at(j));
      }
      if (validate_grasp(contacts, validation).stable) {
        phase = Phase::monitor;
        goal = state;
      }
    } else if (validate_grasp(contacts, validation).stable) {
      if (++validated_hold >= kValidatedHoldSteps) break;
    } else {
      validated_hold = 0;
    }
  }

  out.final_state = state;
  out.steps = step;
  out.assessment = validate_grasp(detect_contacts(scene, state), validation);
  return out;
}

inline GraspExecution execute_grasp(const Scene& scene, const std::map<std::string, Pose>& targets,
                                    const RunConfig& run = {}, const IkConfig& ik = {},
                                    const ValidationConfig& validation = {}) {
  return execute_grasp(scene, targets, run, ik, validation, mid_range_state(scene.hand()));
}

}  // namespace graspforge
