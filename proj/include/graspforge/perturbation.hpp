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

// Random-force perturbation test of a held object.
//
// The object's response is quasi-static: every established contact acts as a
// bilateral spring of stiffness k along its normal, so the contact set has
// stiffness K = sum_i k n_i n_i^T. The resisted part of a force moves the
// object by K^+ F; the part in the null space of K is unresisted and slides
// the object by kFreeSlideGain * F.

#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Eigenvalues>

#include "graspforge/grasp_validation.hpp"

namespace graspforge {

inline constexpr double kFreeSlideGain = 0.05;  // m/N

struct PerturbConfig {
  int iterations = 100;
  double force_bound = 1.0;              // N, per axis
  double displacement_threshold = 0.02;  // m
  std::uint64_t seed = 0;

  void validate() const {
    if (iterations < 1) throw ConfigError("perturb.iterations must be >= 1");
    if (!(force_bound >= 0)) throw ConfigError("perturb.force_bound must be >= 0");
    if (!(displacement_threshold > 0)) throw ConfigError("perturb.displacement_threshold must be > 0");
  }
};

struct PerturbationSample {
  Vec3 force = Vec3::Zero();
  double displacement = 0.0;
};

struct PerturbationReport {
  bool passed = false;
  int iterations_run = 0;
  double max_displacement = 0.0;
  std::vector<PerturbationSample> samples;
  std::optional<int> failure_iteration;  // 1-based
  std::uint64_t seed = 0;
  GraspAssessment precheck;
};

inline Vec3 object_response(const SceneObject& object, std::span<const ContactPoint> contacts,
                            const Vec3& force, double free_slide_gain = kFreeSlideGain) {
  const double k = object.params.contact_stiffness;
  Mat3 stiffness = Mat3::Zero();
  for (const auto& c : contacts) {
    const Vec3 n = c.normal.normalized();
    stiffness += k * n * n.transpose();
  }
  const Eigen::SelfAdjointEigenSolver<Mat3> eig(stiffness);
  const Vec3 values = eig.eigenvalues();
  const double tol = 1e-9 * std::max(k, values.cwiseAbs().maxCoeff());
  Vec3 displacement = Vec3::Zero();
  for (int i = 0; i < 3; ++i) {
    const Vec3 v = eig.eigenvectors().col(i);
    const double along = v.dot(force);
    displacement += (values[i] > tol ? along / values[i] : free_slide_gain * along) * v;
  }
  return displacement;
}

/// Perturbation test on an explicit contact set. The grasp must validate
/// before any force is applied; otherwise the report fails with zero rounds.
inline PerturbationReport perturbation_test(const SceneObject& object,
                                            std::span<const ContactPoint> contacts,
                                            const PerturbConfig& config,
                                            const ValidationConfig& validation = {}) {
  config.validate();
  PerturbationReport report;
  report.seed = config.seed;
  report.precheck = validate_grasp(contacts, validation);
  if (!report.precheck.stable) return report;

  const auto held = established_contacts(contacts, validation.min_contact_force);
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  for (int i = 1; i <= config.iterations; ++i) {
    Vec3 force;
    for (int a = 0; a < 3; ++a) force[a] = config.force_bound * uniform(rng);
    const double moved = object_response(object, held, force).norm();
    report.samples.push_back({force, moved});
    report.iterations_run = i;
    report.max_displacement = std::max(report.max_displacement, moved);
    if (moved > config.displacement_threshold) {
      report.failure_iteration = i;
      return report;
    }
  }
  report.passed = true;
  return report;
}

inline PerturbationReport perturbation_test(const Scene& scene, const JointState& state,
                                            const PerturbConfig& config,
                                            const ValidationConfig& validation = {}) {
  const auto contacts = detect_contacts(scene, state);
  return perturbation_test(scene.object, contacts, config, validation);
}

}  // namespace graspforge
