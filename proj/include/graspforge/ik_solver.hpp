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

// Damped least-squares inverse kinematics, one finger at a time.
//
// Each iteration computes dq = J^T (J J^T + lambda^2 I)^-1 e for the
// positional error e, scales it by `step_scale` and clamps the result into
// the joint limits. A trial that would increase the residual is retried with
// half the step (up to kMaxBacktracks times); if every trial increases it the
// iteration leaves the state unchanged. Target orientation is accepted but
// not part of the residual.

#pragma once

#include <algorithm>
#include <cmath>
#include <iterator>
#include <map>
#include <string>

#include <Eigen/Dense>

#include "graspforge/kinematics.hpp"

namespace graspforge {

class SingularConfigurationError : public Error {
 public:
  using Error::Error;
};

struct IkConfig {
  int max_iterations = 100;
  double residual_threshold = 1e-5;  // meters
  double damping_lambda = 0.05;
  double step_scale = 1.0;

  void validate() const {
    if (max_iterations < 1) throw ConfigError("ik.max_iterations must be >= 1");
    if (!(residual_threshold > 0.0)) throw ConfigError("ik.residual_threshold must be > 0");
    if (!(damping_lambda > 0.0)) throw ConfigError("ik.damping_lambda must be > 0");
    if (!(step_scale > 0.0 && step_scale <= 1.0))
      throw ConfigError("ik.step_scale must be in (0, 1]");
  }
};

struct IkResult {
  JointState state;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

namespace detail {
inline constexpr int kMaxBacktracks = 8;
}

/// Sum of segment lengths from the finger's first joint to its end-effector.
inline double finger_reach(const KinematicChain& chain, const FingerSpec& finger) {
  const auto path = chain.path_joints(finger.end_effector);
  auto first = std::find(path.begin(), path.end(), finger.joints.front());
  double reach = 0.0;
  for (auto it = first == path.end() ? path.begin() : std::next(first); it != path.end(); ++it)
    reach += chain.joints()[*it].origin.xyz.norm();
  return reach;
}

inline IkResult solve_finger_ik(const KinematicChain& chain, std::string_view finger,
                                const Pose& target, const JointState& seed,
                                const IkConfig& config = {}) {
  config.validate();
  if (!is_finite(target.position)) throw ConfigError("IK target position is not finite");
  const FingerSpec& spec = chain.finger(finger);
  const auto n = static_cast<Eigen::Index>(spec.joints.size());

  double reach = spec.joints.empty() ? 0.0 : finger_reach(chain, spec);
  if (!(reach > 1e-9)) reach = 1.0;

  IkResult result;
  result.state = clamp_to_limits(chain, seed);
  auto error_at = [&](const JointState& s) -> Vec3 {
    return target.position - link_transform(chain, s, spec.end_effector).translation();
  };
  Vec3 error = error_at(result.state);
  result.residual = error.norm();

  while (result.residual > config.residual_threshold && result.iterations < config.max_iterations) {
    ++result.iterations;
    const PositionJacobian full = jacobian(chain, result.state, spec.end_effector);
    PositionJacobian jac(3, n);
    for (Eigen::Index c = 0; c < n; ++c)
      jac.col(c) = full.col(static_cast<Eigen::Index>(spec.joints[static_cast<std::size_t>(c)]));

    // Lengths are measured in units of the finger reach, which keeps lambda dimensionless.
    const double damping = config.damping_lambda * reach;
    const double lambda2 = damping * damping;
    const Mat3 normal = jac * jac.transpose() + lambda2 * Mat3::Identity();
    const Eigen::LDLT<Mat3> ldlt(normal);
    if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().array() > 0.0).all())
      throw SingularConfigurationError("damped normal matrix is not invertible");
    const Eigen::VectorXd step = jac.transpose() * ldlt.solve(error);

    double scale = config.step_scale;
    for (int attempt = 0; attempt <= detail::kMaxBacktracks; ++attempt, scale *= 0.5) {
      JointState trial = result.state;
      for (Eigen::Index c = 0; c < n; ++c) {
        const std::size_t j = spec.joints[static_cast<std::size_t>(c)];
        trial.set(j, trial.at(j) + scale * step(c));
      }
      trial = clamp_to_limits(chain, trial);
      const Vec3 trial_error = error_at(trial);
      if (trial_error.norm() <= result.residual) {
        result.state = std::move(trial);
        error = trial_error;
        result.residual = trial_error.norm();
        break;
      }
    }
  }
  result.converged = result.residual <= config.residual_threshold;
  return result;
}

struct HandIkSolution {
  std::map<std::string, IkResult> fingers;
  JointState state;  // seed with every solved finger's joints replaced
};

inline HandIkSolution solve_hand_ik(const KinematicChain& chain,
                                    const std::map<std::string, Pose>& targets,
                                    const JointState& seed, const IkConfig& config = {}) {
  for (const auto& [name, pose] : targets) chain.finger(name);
  HandIkSolution out;
  out.state = seed;
  for (const auto& [name, pose] : targets) {
    IkResult r = solve_finger_ik(chain, name, pose, seed, config);
    for (std::size_t j : chain.finger(name).joints) out.state.set(j, r.state.at(j));
    out.fingers.emplace(name, std::move(r));
  }
  return out;
}

}  // namespace graspforge
