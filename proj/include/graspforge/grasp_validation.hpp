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

// Grasp stability verdict: contact count, spread about the grasp centre and
// the balance of contact normals, checked in that order.

#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "graspforge/contact.hpp"

namespace graspforge {

struct ValidationConfig {
  int min_contacts = 4;
  double distribution_threshold = 0.1;   // meters
  double force_closure_threshold = 0.5;  // |sum of unit normals|
  double min_contact_force = 0.5;        // N

  void validate() const {
    if (min_contacts < 1) throw ConfigError("validation.min_contacts must be >= 1");
    if (!(distribution_threshold > 0) || !(force_closure_threshold > 0) ||
        !(min_contact_force > 0))
      throw ConfigError("validation thresholds must be > 0");
  }
};

enum class FailureReason { none, too_few_contacts, spread_exceeded, closure_exceeded };

inline const char* to_string(FailureReason r) {
  switch (r) {
    case FailureReason::none: return "none";
    case FailureReason::too_few_contacts: return "too_few_contacts";
    case FailureReason::spread_exceeded: return "spread_exceeded";
    case FailureReason::closure_exceeded: return "closure_exceeded";
  }
  return "none";
}

struct GraspAssessment {
  bool stable = false;
  int contact_count = 0;
  Vec3 center = Vec3::Zero();
  double max_distance = 0.0;
  double closure_residual = 0.0;
  FailureReason failure_reason = FailureReason::too_few_contacts;
};

inline Vec3 grasp_center(std::span<const ContactPoint> contacts) {
  if (contacts.empty()) throw ValidationError("grasp centre of an empty contact list");
  Vec3 sum = Vec3::Zero();
  for (const auto& c : contacts) sum += c.position;
  return sum / static_cast<double>(contacts.size());
}

/// Contacts carrying at least `min_force`.
inline std::vector<ContactPoint> established_contacts(std::span<const ContactPoint> contacts,
                                                      double min_force) {
  std::vector<ContactPoint> out;
  std::copy_if(contacts.begin(), contacts.end(), std::back_inserter(out),
               [min_force](const ContactPoint& c) { return c.normal_force >= min_force; });
  return out;
}

inline GraspAssessment validate_grasp(std::span<const ContactPoint> contacts,
                                      const ValidationConfig& config = {}) {
  config.validate();
  const auto used = established_contacts(contacts, config.min_contact_force);
  GraspAssessment a;
  a.contact_count = static_cast<int>(used.size());
  if (!used.empty()) {
    a.center = grasp_center(used);
    Vec3 normal_sum = Vec3::Zero();
    for (const auto& c : used) {
      a.max_distance = std::max(a.max_distance, (c.position - a.center).norm());
      normal_sum += c.normal.normalized();
    }
    a.closure_residual = normal_sum.norm();
  }
  if (a.contact_count < config.min_contacts)
    a.failure_reason = FailureReason::too_few_contacts;
  else if (a.max_distance > config.distribution_threshold)
    a.failure_reason = FailureReason::spread_exceeded;
  else if (a.closure_residual > config.force_closure_threshold)
    a.failure_reason = FailureReason::closure_exceeded;
  else
    a.failure_reason = FailureReason::none;
  a.stable = a.failure_reason == FailureReason::none;
  return a;
}

}  // namespace graspforge
