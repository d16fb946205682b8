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

#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"
#include "test_support.hpp"

namespace graspforge {
namespace {

TEST(Contact, ClosestPointOutsideUnitCube) {
  const BoxQuery q = closest_point_box(Vec3(0, 0, 2), Vec3(0.5, 0.5, 0.5), Isometry::Identity());
  EXPECT_TRUE(q.surface_point.isApprox(Vec3(0, 0, 0.5)));
  EXPECT_TRUE(q.normal.isApprox(Vec3(0, 0, 1)));
  EXPECT_DOUBLE_EQ(q.signed_distance, 1.5);
}

TEST(Contact, ClosestPointAtCentreBreaksTiesInAxisOrder) {
  const BoxQuery cube = closest_point_box(Vec3::Zero(), Vec3(0.5, 0.5, 0.5), Isometry::Identity());
  EXPECT_DOUBLE_EQ(cube.signed_distance, -0.5);
  EXPECT_TRUE(cube.normal.isApprox(Vec3(1, 0, 0)));
  const BoxQuery flat = closest_point_box(Vec3::Zero(), Vec3(0.5, 0.2, 0.2), Isometry::Identity());
  EXPECT_DOUBLE_EQ(flat.signed_distance, -0.2);
  EXPECT_TRUE(flat.normal.isApprox(Vec3(0, 1, 0)));
}

TEST(Contact, ClosestPointMatchesSampling) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> size(0.01, 0.1);
  for (int i = 0; i < 100; ++i) {
    const Vec3 half(size(rng), size(rng), size(rng));
    const Isometry pose = Pose::from_xyz_rpy(Vec3(u(rng), u(rng), u(rng)) * 0.1,
                                             Vec3(u(rng), u(rng), u(rng)) * kPi).isometry();
    const Vec3 p = pose * Vec3(2 * half.x() * u(rng), 2 * half.y() * u(rng), 2 * half.z() * u(rng));
    const BoxQuery q = closest_point_box(p, half, pose);
    const auto ref = oracle::sampled_closest_point(p, half, pose);
    EXPECT_NEAR(q.signed_distance, ref.signed_distance, 1e-4);
    EXPECT_LE((q.surface_point - ref.point).norm(), 1e-4);
    EXPECT_NEAR(q.normal.norm(), 1.0, 1e-9);
  }
}

TEST(Contact, SphereAboveTopFace) {
  const Vec3 half(0.05, 0.05, 0.05);
  const Scene s = testing::probe_scene(testing::probe_urdf(R"(<sphere radius="0.01"/>)"),
                                       Vec3(0, 0, 0.05 + 0.005), half);
  JointState state;
  state.set(0, 0.0);
  const auto contacts = detect_contacts(s, state);
  ASSERT_EQ(contacts.size(), 1u);
  EXPECT_TRUE(contacts[0].normal.isApprox(Vec3(0, 0, 1)));
  EXPECT_NEAR(contacts[0].penetration_depth, 0.005, 1e-12);
  EXPECT_NEAR(contacts[0].normal_force, 50.0, 1e-8);
  EXPECT_EQ(contacts[0].finger, "probe");
}

TEST(Contact, DistantSphereHasNoContact) {
  const Scene s = testing::probe_scene(testing::probe_urdf(R"(<sphere radius="0.01"/>)"), Vec3(0, 0, 1.0),
                                       Vec3(0.05, 0.05, 0.05));
  JointState state;
  state.set(0, 0.0);
  EXPECT_TRUE(detect_contacts(s, state).empty());
}

TEST(Contact, CapsuleParallelToFace) {
  const double r = 0.008;
  const Vec3 half(0.05, 0.05, 0.05);
  // Capsule axis along world x, hovering so that it sinks 2 mm into the top face.
  const Scene s = testing::probe_scene(testing::probe_urdf(R"(<capsule radius="0.008" length="0.04"/>)",
                                                           "0 1.5707963267948966 0"),
                                       Vec3(0.01, 0, 0.05 + r - 0.002), half);
  JointState state;
  state.set(0, 0.0);
  const auto contacts = detect_contacts(s, state);
  ASSERT_EQ(contacts.size(), 1u);
  EXPECT_NEAR(contacts[0].penetration_depth, 0.002, 1e-9);
  EXPECT_NEAR(contacts[0].normal_force, 20.0, 1e-5);

  // Oracle: densely sample the capsule axis and take the deepest sphere.
  const Isometry world = s.hand_base.isometry() * s.hand().links()[1].geometry_origin.transform();
  double deepest = -1e9;
  for (int k = 0; k <= 2000; ++k) {
    const Vec3 c = world * Vec3(0, 0, -0.02 + 0.04 * k / 2000.0);
    deepest = std::max(deepest, r - oracle::sampled_closest_point(c, half, Isometry::Identity(), 11, 4).signed_distance);
  }
  EXPECT_NEAR(contacts[0].penetration_depth, deepest, 1e-6);
}

TEST(Contact, ForceIsLinearInPenetration) {
  const Vec3 half(0.05, 0.05, 0.05);
  auto contact_at = [&](double depth) {
    const Scene s = testing::probe_scene(testing::probe_urdf(R"(<sphere radius="0.01"/>)"),
                                         Vec3(0, 0, 0.05 + 0.01 - depth), half);
    JointState state;
    state.set(0, 0.0);
    return detect_contacts(s, state).at(0);
  };
  const ContactPoint shallow = contact_at(0.002);
  const ContactPoint deep = contact_at(0.004);
  // The spring law itself is exact; the measured depths carry placement rounding.
  EXPECT_EQ(shallow.normal_force, 10000.0 * shallow.penetration_depth);
  EXPECT_EQ(10000.0 * (2.0 * shallow.penetration_depth), 2.0 * shallow.normal_force);
  EXPECT_NEAR(deep.normal_force, 2.0 * shallow.normal_force, 1e-10);
}

TEST(Contact, RandomProbeContactsSatisfyInvariants) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Vec3 half(0.04, 0.03, 0.05);
  int checked = 0;
  for (int i = 0; i < 300; ++i) {
    const Vec3 base(u(rng) * 0.06, u(rng) * 0.05, u(rng) * 0.07);
    const Scene s = testing::probe_scene(testing::probe_urdf(R"(<sphere radius="0.012"/>)"), base, half);
    JointState state;
    state.set(0, 0.0);
    for (const auto& c : detect_contacts(s, state)) {
      ++checked;
      EXPECT_NEAR(c.normal.norm(), 1.0, 1e-9);
      EXPECT_NEAR(c.normal_force, s.object.params.contact_stiffness * c.penetration_depth, 1e-9);
      const Vec3 local = c.position;
      const double on_surface = (local.cwiseAbs() - half).maxCoeff();
      EXPECT_NEAR(on_surface, 0.0, 1e-6);
      // Normals point from the object toward the link, unless the link centre is
      // inside the box where the outward face normal is the push-out direction.
      if ((base.cwiseAbs().array() > half.array()).any()) EXPECT_GE(c.normal.dot(base - c.position), 0.0);
    }
  }
  EXPECT_GT(checked, 20);
}

TEST(Contact, DefaultClosingNeverDropsContacts) {
  const Scene scene = default_scene();
  const auto exec = execute_grasp(scene, default_grasp_targets(scene));
  std::set<std::pair<std::string, std::size_t>> seen;
  for (const auto& e : exec.log.entries) {
    if (e.phase == Phase::pre_grasp) continue;
    std::set<std::pair<std::string, std::size_t>> now;
    for (const auto& c : detect_contacts(scene, e.state)) now.emplace(c.finger, c.link);
    for (const auto& key : seen) EXPECT_TRUE(now.count(key)) << key.first << " lost contact at step " << e.step;
    seen = now;
  }
  EXPECT_GE(seen.size(), 4u);
}

}  // namespace
}  // namespace graspforge
