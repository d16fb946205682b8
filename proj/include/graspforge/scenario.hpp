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

// Scenario configuration: a flat `key = value` text file ('#' starts a
// comment). Every key is listed in apply_key(); unknown keys are rejected.
//
//   hand.description_path   path, relative to the scenario file
//   hand.base_position      x y z
//   hand.base_rpy           roll pitch yaw
//   object.half_extents     hx hy hz
//   object.pose             x y z roll pitch yaw
//   object.mass             kg
//   physics.<field>         one key per PhysicalParams field; applies to the
//                           hand and the object
//   run.seed run.steps run.hz run.joint_rate_limit run.servo_gain run.log_every
//   ik.max_iterations ik.residual_threshold ik.damping_lambda ik.step_scale
//   validation.min_contacts validation.distribution_threshold
//   validation.force_closure_threshold validation.min_contact_force
//   perturb.iterations perturb.force_bound perturb.displacement_threshold
//   metrics.efficiency_basis  final_error | straight_line
//   target.<finger>         x y z [roll pitch yaw], world frame
//   output_dir              path
//
// Fingers without a target.<finger> key get the planned contact target from
// default_grasp_targets().

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "graspforge/metrics.hpp"
#include "graspforge/perturbation.hpp"

namespace graspforge {

struct ScenarioConfig {
  Scene scene;
  std::map<std::string, Pose> targets;
  RunConfig run;
  IkConfig ik;
  ValidationConfig validation;
  PerturbConfig perturb;
  EfficiencyBasis efficiency_basis = EfficiencyBasis::final_error;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
};

// Contact targets for the bundled hand around a box under the palm. Targets
// sit (radius - push) outside the surface so the fingertip capsule ends up
// `kTargetPush` deep. The middle finger hooks the lower edge of the +x face
// so that one contact normal carries a vertical component.
inline constexpr double kFingertipRadius = 0.008;
inline constexpr double kTargetPush = 0.001;
inline constexpr double kHookAngle = 15.0 * kPi / 180.0;

inline std::map<std::string, Pose> default_grasp_targets(const Scene& scene) {
  const Vec3 h = scene.object.half_extents;
  const double stand_off = kFingertipRadius - kTargetPush;
  const double side_z = -h.z() + 0.01;
  const std::map<std::string, Vec3> local = {
      {"thumb", Vec3(-h.x() - stand_off, 0.0, side_z)},
      {"index", Vec3(0.0, h.y() + stand_off, side_z)},
      {"middle", Vec3(h.x(), 0.015, -h.z()) +
                     stand_off * Vec3(std::cos(kHookAngle), 0.0, -std::sin(kHookAngle))},
      {"ring", Vec3(h.x() + 0.015, -0.015, 0.0)},
      {"pinky", Vec3(0.0, -h.y() - stand_off, side_z)},
  };
  const Isometry object = scene.object.pose.isometry();
  std::map<std::string, Pose> out;
  for (const auto& [finger, p] : local)
    if (scene.hand().find_finger(finger)) out.emplace(finger, Pose{object * p, Quat::Identity()});
  return out;
}

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<double> config_numbers(const std::string& key, const std::string& value,
                                          std::size_t min_count, std::size_t max_count) {
  std::vector<double> v;
  try {
    v = parse_numbers(value, key);
  } catch (const ParseError&) {
    throw ConfigError("bad value for '" + key + "': '" + value + "'");
  }
  if (v.size() < min_count || v.size() > max_count)
    throw ConfigError("bad value for '" + key + "': expected " + std::to_string(min_count) +
                      (max_count != min_count ? "-" + std::to_string(max_count) : "") +
                      " numbers, got '" + value + "'");
  for (double x : v)
    if (!std::isfinite(x)) throw ConfigError("bad value for '" + key + "': not finite");
  return v;
}

inline double config_double(const std::string& key, const std::string& value) {
  return config_numbers(key, value, 1, 1)[0];
}

inline long long config_int(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size())
    throw ConfigError("bad value for '" + key + "': expected an integer, got '" + value + "'");
  return v;
}

inline Vec3 config_vec3(const std::string& key, const std::string& value) {
  auto v = config_numbers(key, value, 3, 3);
  return Vec3(v[0], v[1], v[2]);
}

inline Pose config_pose(const std::string& key, const std::string& value) {
  auto v = config_numbers(key, value, 3, 6);
  if (v.size() != 3 && v.size() != 6)
    throw ConfigError("bad value for '" + key + "': expected 3 or 6 numbers");
  Vec3 rpy = v.size() == 6 ? Vec3(v[3], v[4], v[5]) : Vec3::Zero();
  return Pose::from_xyz_rpy(Vec3(v[0], v[1], v[2]), rpy);
}

using KeyValues = std::vector<std::pair<std::string, std::string>>;

inline KeyValues parse_key_values(const std::string& text) {
  KeyValues out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    for (const auto& [k, v] : out)
      if (k == key) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

struct SceneKeys {
  std::filesystem::path description = bundled_hand_path();
  Vec3 base_position = default_hand_base().position;
  Vec3 base_rpy = Vec3(kPi, 0, 0);
  Vec3 half_extents = default_object_half_extents();
  std::optional<Pose> object_pose;
  double mass = kDefaultObjectMass;
  PhysicalParams physics;
};

inline bool apply_physics_key(PhysicalParams& p, const std::string& field, double v) {
  const std::map<std::string, double PhysicalParams::*> fields = {
      {"lateral_friction", &PhysicalParams::lateral_friction},
      {"spinning_friction", &PhysicalParams::spinning_friction},
      {"rolling_friction", &PhysicalParams::rolling_friction},
      {"contact_stiffness", &PhysicalParams::contact_stiffness},
      {"contact_damping", &PhysicalParams::contact_damping},
      {"joint_damping", &PhysicalParams::joint_damping},
      {"contact_force_threshold", &PhysicalParams::contact_force_threshold},
  };
  auto it = fields.find(field);
  if (it == fields.end()) return false;
  p.*(it->second) = v;
  return true;
}

}  // namespace detail

/// Builds a scenario from key/value text. `base_dir` resolves relative paths;
/// `overrides` are applied after the file's own keys.
inline ScenarioConfig parse_scenario(const std::string& text, const std::filesystem::path& base_dir,
                                     const detail::KeyValues& overrides = {}) {
  using namespace detail;
  KeyValues kv = parse_key_values(text);
  for (const auto& [k, v] : overrides) {
    bool replaced = false;
    for (auto& [fk, fv] : kv)
      if (fk == k) {
        fv = v;
        replaced = true;
      }
    if (!replaced) kv.emplace_back(k, v);
  }

  ScenarioConfig cfg;
  SceneKeys sk;
  std::map<std::string, Pose> explicit_targets;
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };

  for (const auto& [key, value] : kv) {
    if (key == "hand.description_path") sk.description = resolve(value);
    else if (key == "hand.base_position") sk.base_position = config_vec3(key, value);
    else if (key == "hand.base_rpy") sk.base_rpy = config_vec3(key, value);
    else if (key == "object.half_extents") sk.half_extents = config_vec3(key, value);
    else if (key == "object.pose") sk.object_pose = config_pose(key, value);
    else if (key == "object.mass") sk.mass = config_double(key, value);
    else if (key.rfind("physics.", 0) == 0) {
      if (!apply_physics_key(sk.physics, key.substr(8), config_double(key, value)))
        throw ConfigError("unknown key '" + key + "'");
    }
    else if (key == "run.seed") {
      const long long s = config_int(key, value);
      if (s < 0) throw ConfigError("run.seed must be non-negative");
      cfg.seed = static_cast<std::uint64_t>(s);
    }
    else if (key == "run.steps") cfg.run.max_steps = static_cast<int>(config_int(key, value));
    else if (key == "run.hz") cfg.run.hz = config_double(key, value);
    else if (key == "run.joint_rate_limit") cfg.run.joint_rate_limit = config_double(key, value);
    else if (key == "run.servo_gain") cfg.run.servo_gain = config_double(key, value);
    else if (key == "run.log_every") cfg.run.log_every = static_cast<int>(config_int(key, value));
    else if (key == "ik.max_iterations") cfg.ik.max_iterations = static_cast<int>(config_int(key, value));
    else if (key == "ik.residual_threshold") cfg.ik.residual_threshold = config_double(key, value);
    else if (key == "ik.damping_lambda") cfg.ik.damping_lambda = config_double(key, value);
    else if (key == "ik.step_scale") cfg.ik.step_scale = config_double(key, value);
    else if (key == "validation.min_contacts") cfg.validation.min_contacts = static_cast<int>(config_int(key, value));
    else if (key == "validation.distribution_threshold") cfg.validation.distribution_threshold = config_double(key, value);
    else if (key == "validation.force_closure_threshold") cfg.validation.force_closure_threshold = config_double(key, value);
    else if (key == "validation.min_contact_force") cfg.validation.min_contact_force = config_double(key, value);
    else if (key == "perturb.iterations") cfg.perturb.iterations = static_cast<int>(config_int(key, value));
    else if (key == "perturb.force_bound") cfg.perturb.force_bound = config_double(key, value);
    else if (key == "perturb.displacement_threshold") cfg.perturb.displacement_threshold = config_double(key, value);
    else if (key == "metrics.efficiency_basis") cfg.efficiency_basis = parse_efficiency_basis(value);
    else if (key == "output_dir") cfg.output_dir = resolve(value);
    else if (key.rfind("target.", 0) == 0) explicit_targets[key.substr(7)] = config_pose(key, value);
    else throw ConfigError("unknown key '" + key + "'");
  }

  try {
    cfg.scene.chain = load_hand(sk.description);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("hand description: ") + e.what());
  }
  cfg.scene.hand_base = Pose::from_xyz_rpy(sk.base_position, sk.base_rpy);
  cfg.scene.object = make_box_object(sk.half_extents,
                                     sk.object_pose ? *sk.object_pose : pose_below_palm(sk.half_extents),
                                     sk.mass, sk.physics);
  cfg.scene.hand_params = sk.physics;
  cfg.perturb.seed = cfg.seed;

  cfg.run.validate();
  cfg.ik.validate();
  cfg.validation.validate();
  cfg.perturb.validate();
  try {
    check_initial_clearance(cfg.scene, mid_range_state(cfg.scene.hand()));
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }

  cfg.targets = default_grasp_targets(cfg.scene);
  for (const auto& [finger, pose] : explicit_targets) {
    if (!cfg.scene.hand().find_finger(finger)) throw ConfigError("unknown finger in key 'target." + finger + "'");
    cfg.targets[finger] = pose;
  }
  return cfg;
}

inline ScenarioConfig load_scenario(const std::filesystem::path& path,
                                    const detail::KeyValues& overrides = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.parent_path(), overrides);
}

inline std::filesystem::path default_scenario_path() { return data_dir() / "default_scenario.cfg"; }

}  // namespace graspforge
