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

// Analytic contact detection between finger collision geometry (spheres and
// capsules) and a box object, with a linear spring normal-force law.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "graspforge/kinematics.hpp"
#include "graspforge/scene.hpp"

namespace graspforge {

struct ContactPoint {
  std::string finger;
  std::size_t link = 0;
  Vec3 position = Vec3::Zero();  // on the object surface
  Vec3 normal = Vec3::UnitZ();   // object-outward
  double penetration_depth = 0.0;
  double normal_force = 0.0;
};

struct BoxQuery {
  Vec3 surface_point = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();
  double signed_distance = 0.0;  // negative inside
};

/// Closest point on an oriented box surface. Outside points map to the
/// clamped point (face, edge or corner region); inside points project onto
/// the nearest face, ties broken in x, y, z order.
inline BoxQuery closest_point_box(const Vec3& point, const Vec3& half_extents,
                                  const Isometry& box_pose) {
  const Vec3 local = box_pose.inverse() * point;
  const Vec3 clamped = local.cwiseMax(-half_extents).cwiseMin(half_extents);
  BoxQuery q;
  Vec3 local_normal;
  Vec3 local_surface;
  if (clamped != local) {
    const Vec3 offset = local - clamped;
    q.signed_distance = offset.norm();
    local_normal = offset / q.signed_distance;
    local_surface = clamped;
  } else {
    int axis = 0;
    double depth = half_extents.x() - std::abs(local.x());
    for (int i = 1; i < 3; ++i) {
      const double d = half_extents[i] - std::abs(local[i]);
      if (d < depth) {
        depth = d;
        axis = i;
      }
    }
    const double sign = local[axis] >= 0.0 ? 1.0 : -1.0;
    local_normal = Vec3::Zero();
    local_normal[axis] = sign;
    local_surface = local;
    local_surface[axis] = sign * half_extents[axis];
    q.signed_distance = -depth;
  }
  q.surface_point = box_pose * local_surface;
  q.normal = (box_pose.linear() * local_normal).normalized();
  return q;
}

inline BoxQuery closest_point_box(const Vec3& point, const SceneObject& box) {
  return closest_point_box(point, box.half_extents, box.pose.isometry());
}

struct SegmentBoxQuery {
  Vec3 segment_point = Vec3::Zero();
  BoxQuery box;
};

/// Point of segment [a, b] with the smallest signed distance to the box.
/// Signed distance to a convex set is convex along a line, so golden-section
/// search converges to the global minimum.
inline SegmentBoxQuery deepest_segment_point(const Vec3& a, const Vec3& b, const Vec3& half_extents,
                                             const Isometry& box_pose) {
  auto eval = [&](double t) { return closest_point_box(a + t * (b - a), half_extents, box_pose); };
  constexpr double kInvPhi = 0.6180339887498949;
  double lo = 0.0;
  double hi = 1.0;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = eval(x1).signed_distance;
  double f2 = eval(x2).signed_distance;
  for (int i = 0; i < 80; ++i) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = eval(x1).signed_distance;
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = eval(x2).signed_distance;
    }
  }
  double best_t = 0.5 * (lo + hi);
  BoxQuery best = eval(best_t);
  for (double t : {0.0, 1.0}) {
    BoxQuery q = eval(t);
    if (q.signed_distance < best.signed_distance) {
      best = q;
      best_t = t;
    }
  }
  return {a + best_t * (b - a), best};
}

namespace detail {

// Deepest point of a sphere/capsule against the box, as (axis point, query, radius).
inline std::optional<std::pair<SegmentBoxQuery, double>> link_box_query(
    const Geometry& geometry, const Isometry& world_geometry, const SceneObject& box) {
  const Isometry box_pose = box.pose.isometry();
  if (const auto* s = std::get_if<SphereGeometry>(&geometry)) {
    const Vec3 c = world_geometry.translation();
    return std::make_pair(SegmentBoxQuery{c, closest_point_box(c, box.half_extents, box_pose)},
                          s->radius);
  }
  if (const auto* c = std::get_if<CapsuleGeometry>(&geometry)) {
    const Vec3 a = world_geometry * Vec3(0, 0, -0.5 * c->length);
    const Vec3 b = world_geometry * Vec3(0, 0, 0.5 * c->length);
    return std::make_pair(deepest_segment_point(a, b, box.half_extents, box_pose), c->radius);
  }
  return std::nullopt;
}

inline Isometry geometry_world_transform(const Scene& scene, const JointState& state,
                                         std::size_t link) {
  return scene.hand_base.isometry() * link_transform(scene.hand(), state, link) *
         scene.hand().links()[link].geometry_origin.transform();
}

// Overlap depth of two oriented boxes along the separating-axis candidates;
// <= 0 means separated.
inline double box_box_overlap(const Vec3& ha, const Isometry& ta, const Vec3& hb,
                              const Isometry& tb) {
  std::vector<Vec3> axes;
  for (int i = 0; i < 3; ++i) axes.push_back(ta.linear().col(i));
  for (int i = 0; i < 3; ++i) axes.push_back(tb.linear().col(i));
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      Vec3 c = ta.linear().col(i).cross(tb.linear().col(k));
      if (c.norm() > 1e-9) axes.push_back(c.normalized());
    }
  const Vec3 d = tb.translation() - ta.translation();
  double overlap = std::numeric_limits<double>::infinity();
  for (const Vec3& axis : axes) {
    double ra = 0;
    double rb = 0;
    for (int i = 0; i < 3; ++i) {
      ra += ha[i] * std::abs(axis.dot(ta.linear().col(i)));
      rb += hb[i] * std::abs(axis.dot(tb.linear().col(i)));
    }
    overlap = std::min(overlap, ra + rb - std::abs(axis.dot(d)));
  }
  return overlap;
}

}  // namespace detail

/// One contact per (finger link, object) pair whose geometry touches or
/// penetrates the box, ordered by finger declaration then base-to-tip link.
inline std::vector<ContactPoint> detect_contacts(const Scene& scene, const JointState& state) {
  std::vector<ContactPoint> contacts;
  const double stiffness = scene.object.params.contact_stiffness;
  for (const auto& finger : scene.hand().fingers()) {
    for (std::size_t link : finger.links) {
      const auto& geometry = scene.hand().links()[link].geometry;
      if (!geometry) continue;
      auto query = detail::link_box_query(
          *geometry, detail::geometry_world_transform(scene, state, link), scene.object);
      if (!query) continue;  // box-shaped finger links are not modelled
      const auto& [deepest, radius] = *query;
      const double distance = deepest.box.signed_distance - radius;
      if (distance > 0.0) continue;
      ContactPoint c;
      c.finger = finger.name;
      c.link = link;
      c.position = deepest.box.surface_point;
      c.normal = deepest.box.normal;
      c.penetration_depth = -distance;
      c.normal_force = stiffness * c.penetration_depth;
      contacts.push_back(std::move(c));
    }
  }
  return contacts;
}

/// Deepest interpenetration between any hand link (including the palm) and
/// the object; 0 when everything is separated.
inline double max_hand_penetration(const Scene& scene, const JointState& state) {
  double worst = 0.0;
  const auto links = scene.hand().links();
  for (std::size_t l = 0; l < links.size(); ++l) {
    if (!links[l].geometry) continue;
    const Isometry world = detail::geometry_world_transform(scene, state, l);
    if (const auto* box = std::get_if<BoxGeometry>(&*links[l].geometry)) {
      worst = std::max(worst, detail::box_box_overlap(box->half_extents, world,
                                                      scene.object.half_extents,
                                                      scene.object.pose.isometry()));
    } else if (auto q = detail::link_box_query(*links[l].geometry, world, scene.object)) {
      worst = std::max(worst, q->second - q->first.box.signed_distance);
    }
  }
  return worst;
}

inline constexpr double kMaxInitialPenetration = 1e-3;

inline void check_initial_clearance(const Scene& scene, const JointState& state) {
  const double depth = max_hand_penetration(scene, state);
  if (depth > kMaxInitialPenetration)
    throw ValidationError("object initially penetrates the hand by " + std::to_string(depth) + " m");
}

}  // namespace graspforge
