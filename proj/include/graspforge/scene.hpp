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

#include <cstdlib>
#include <filesystem>
#include <memory>
#include <string>

#include "graspforge/geometry.hpp"
#include "graspforge/robot_model.hpp"

#ifndef GRASPFORGE_DEFAULT_DATA_DIR
#define GRASPFORGE_DEFAULT_DATA_DIR "data"
#endif

namespace graspforge {

/// Contact and joint parameters shared by the hand and the object.
struct PhysicalParams {
  double lateral_friction = 1.0;
  double spinning_friction = 0.1;
  double rolling_friction = 0.1;
  double contact_stiffness = 10000.0;  // N/m
  double contact_damping = 1.0;
  double joint_damping = 0.5;
  double contact_force_threshold = 0.5;  // N

  void validate() const {
    if (lateral_friction < 0 || spinning_friction < 0 || rolling_friction < 0 ||
        contact_damping < 0 || joint_damping < 0 || contact_force_threshold < 0)
      throw ConfigError("physical parameters must be non-negative");
    if (!(contact_stiffness > 0)) throw ConfigError("contact_stiffness must be > 0");
  }

  bool operator==(const PhysicalParams&) const = default;
};

struct SceneObject {
  std::string id;
  Vec3 half_extents = Vec3::Zero();
  Pose pose;
  double mass = 0.0;
  PhysicalParams params;

  bool operator==(const SceneObject& o) const {
    return id == o.id && half_extents == o.half_extents && pose == o.pose && mass == o.mass &&
           params == o.params;
  }
};

struct Scene {
  std::shared_ptr<const KinematicChain> chain;
  Pose hand_base;
  SceneObject object;
  PhysicalParams hand_params;

  const KinematicChain& hand() const { return *chain; }

  bool operator==(const Scene& o) const {
    return (chain == o.chain || (chain && o.chain && *chain == *o.chain)) &&
           hand_base == o.hand_base && object == o.object && hand_params == o.hand_params;
  }
};

inline SceneObject make_box_object(const Vec3& half_extents, const Pose& pose, double mass,
                                   const PhysicalParams& params = {}, std::string id = "box") {
  if (!(half_extents.array() > 0.0).all())
    throw ConfigError("box half-extents must be positive");
  if (!(mass > 0.0)) throw ConfigError("object mass must be positive");
  params.validate();
  return SceneObject{std::move(id), half_extents, pose, mass, params};
}

/// Bundled-asset directory; GRASPFORGE_DATA_DIR overrides the build default.
inline std::filesystem::path data_dir() {
  if (const char* env = std::getenv("GRASPFORGE_DATA_DIR"); env && *env) return env;
  return GRASPFORGE_DEFAULT_DATA_DIR;
}

inline std::filesystem::path bundled_hand_path() { return data_dir() / "hand.urdf"; }

inline std::shared_ptr<const KinematicChain> load_hand(const std::filesystem::path& path) {
  return std::make_shared<const KinematicChain>(
      load_robot_description(path, ParseOptions{.require_hand_layout = true}));
}

// Layout of the bundled scenario. The palm is a 90 x 90 x 20 mm box centred
// on the hand frame; its grasping face is +Z in the hand frame, which the
// (pi, 0, 0) base orientation turns to face world -Z.
inline constexpr double kDefaultBaseHeight = 0.25;
inline constexpr double kPalmHalfThickness = 0.01;
inline constexpr double kPalmClearance = 0.02;

inline Pose default_hand_base() {
  return Pose::from_xyz_rpy(Vec3(0, 0, kDefaultBaseHeight), Vec3(kPi, 0, 0));
}

inline Vec3 default_object_half_extents() { return Vec3(0.03, 0.03, 0.03); }
inline constexpr double kDefaultObjectMass = 0.2;

/// Object centred under the palm, top face `kPalmClearance` below it.
inline Pose pose_below_palm(const Vec3& half_extents) {
  const double top = kDefaultBaseHeight - kPalmHalfThickness - kPalmClearance;
  return Pose::from_xyz_rpy(Vec3(0, 0, top - half_extents.z()), Vec3::Zero());
}

inline Scene default_scene() {
  Scene scene;
  scene.chain = load_hand(bundled_hand_path());
  scene.hand_base = default_hand_base();
  const Vec3 half = default_object_half_extents();
  scene.object = make_box_object(half, pose_below_palm(half), kDefaultObjectMass);
  scene.hand_params = PhysicalParams{};
  return scene;
}

}  // namespace graspforge
