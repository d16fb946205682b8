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

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Geometry>

namespace graspforge {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;
using Isometry = Eigen::Isometry3d;

inline constexpr double kPi = 3.14159265358979323846;

// Error hierarchy shared by every module.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// URDF convention: fixed-axis roll about X, then pitch about Y, then yaw
// about Z, i.e. R = Rz(yaw) * Ry(pitch) * Rx(roll).
inline Quat quat_from_rpy(double roll, double pitch, double yaw) {
  return Quat(Eigen::AngleAxisd(yaw, Vec3::UnitZ()) *
              Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
              Eigen::AngleAxisd(roll, Vec3::UnitX()));
}

inline Quat quat_from_rpy(const Vec3& rpy) {
  return quat_from_rpy(rpy.x(), rpy.y(), rpy.z());
}

/// A rigid placement: translation plus unit-quaternion orientation.
struct Pose {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();

  static Pose from_xyz_rpy(const Vec3& xyz, const Vec3& rpy) {
    return Pose{xyz, quat_from_rpy(rpy).normalized()};
  }

  static Pose from_isometry(const Isometry& iso) {
    return Pose{iso.translation(), Quat(iso.linear()).normalized()};
  }

  Isometry isometry() const {
    Isometry iso = Isometry::Identity();
    iso.linear() = orientation.normalized().toRotationMatrix();
    iso.translation() = position;
    return iso;
  }

  bool operator==(const Pose& other) const {
    return position == other.position &&
           orientation.coeffs() == other.orientation.coeffs();
  }
};

inline bool is_unit(const Vec3& v, double tol) {
  return std::abs(v.norm() - 1.0) <= tol;
}

inline bool is_finite(const Vec3& v) { return v.allFinite(); }

}  // namespace graspforge
