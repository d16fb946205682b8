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

#pragma once

#include <algorithm>
#include <map>
#include <vector>

#include <Eigen/Core>

#include "graspforge/geometry.hpp"
#include "graspforge/robot_model.hpp"

namespace graspforge {

/// Joint angles keyed by joint index (radians).
struct JointState {
  std::map<std::size_t, double> values;

  bool contains(std::size_t joint) const { return values.count(joint) != 0; }

  double at(std::size_t joint) const {
    auto it = values.find(joint);
    if (it == values.end())
      throw LookupError("missing joint value for joint " + std::to_string(joint));
    return it->second;
  }

  void set(std::size_t joint, double angle) { values[joint] = angle; }

  bool operator==(const JointState&) const = default;
};

using PositionJacobian = Eigen::Matrix<double, 3, Eigen::Dynamic>;

/// Every movable joint at 0 rad, clamped into its limits.
inline JointState zero_state(const KinematicChain& chain) {
  JointState s;
  const auto joints = chain.joints();
  for (std::size_t j = 0; j < joints.size(); ++j)
    if (joints[j].movable()) s.set(j, std::clamp(0.0, joints[j].lower_limit, joints[j].upper_limit));
  return s;
}

/// Midpoint of every movable joint's range.
inline JointState mid_range_state(const KinematicChain& chain) {
  JointState s;
  const auto joints = chain.joints();
  for (std::size_t j = 0; j < joints.size(); ++j)
    if (joints[j].movable()) s.set(j, 0.5 * (joints[j].lower_limit + joints[j].upper_limit));
  return s;
}

inline Isometry joint_transform(const JointSpec& joint, double angle) {
  Isometry t = joint.origin.transform();
  if (joint.movable()) t.rotate(Eigen::AngleAxisd(angle, joint.axis));
  return t;
}

/// Pose of `link`'s frame in the chain's root frame.
inline Isometry link_transform(const KinematicChain& chain, const JointState& state,
                               std::size_t link) {
  Isometry t = Isometry::Identity();
  for (std::size_t j : chain.path_joints(link)) {
    const auto& joint = chain.joints()[j];
    t = t * joint_transform(joint, joint.movable() ? state.at(j) : 0.0);
  }
  return t;
}

inline Pose forward_kinematics(const KinematicChain& chain, const JointState& state,
                               std::size_t link) {
  return Pose::from_isometry(link_transform(chain, state, link));
}

/// Positional Jacobian of `link`'s origin; one column per chain joint, zero
/// for fixed joints and joints off the root->link path.
inline PositionJacobian jacobian(const KinematicChain& chain, const JointState& state,
                                 std::size_t link) {
  PositionJacobian jac = PositionJacobian::Zero(3, static_cast<Eigen::Index>(chain.joints().size()));
  const auto path = chain.path_joints(link);
  std::vector<std::pair<std::size_t, Isometry>> frames;
  Isometry t = Isometry::Identity();
  for (std::size_t j : path) {
    const auto& joint = chain.joints()[j];
    // The axis is expressed in the frame reached after the joint origin.
    Isometry joint_frame = t * joint.origin.transform();
    if (joint.movable()) frames.emplace_back(j, joint_frame);
    t = t * joint_transform(joint, joint.movable() ? state.at(j) : 0.0);
  }
  const Vec3 tip = t.translation();
  for (const auto& [j, frame] : frames) {
    const Vec3 axis = frame.linear() * chain.joints()[j].axis;
    jac.col(static_cast<Eigen::Index>(j)) = axis.cross(tip - frame.translation());
  }
  return jac;
}

inline JointState clamp_to_limits(const KinematicChain& chain, const JointState& state) {
  JointState out = state;
  const auto joints = chain.joints();
  for (auto& [j, angle] : out.values)
    if (j < joints.size() && joints[j].movable())
      angle = std::clamp(angle, joints[j].lower_limit, joints[j].upper_limit);
  return out;
}

inline bool within_limits(const KinematicChain& chain, const JointState& state) {
  const auto joints = chain.joints();
  for (const auto& [j, angle] : state.values)
    if (j < joints.size() && joints[j].movable() &&
        (angle < joints[j].lower_limit || angle > joints[j].upper_limit))
      return false;
  return true;
}

}  // namespace graspforge
