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

#include <cmath>

#include "test_support.hpp"

namespace graspforge {
namespace {

ContactPoint contact(const Vec3& p, const Vec3& n, double force = 10.0) {
  ContactPoint c;
  c.position = p;
  c.normal = n.normalized();
  c.normal_force = force;
  return c;
}

SceneObject cube() { return make_box_object(Vec3(0.03, 0.03, 0.03), Pose{}, 0.2); }

std::vector<ContactPoint> tetrahedral() {
  const double s = 1.0 / std::sqrt(3.0);
  std::vector<ContactPoint> out;
  for (const Vec3& d : {Vec3(s, s, s), Vec3(s, -s, -s), Vec3(-s, s, -s), Vec3(-s, -s, s)})
    out.push_back(contact(0.03 * d, d));
  return out;
}

// Stable by validation, but nothing resists motion along z.
std::vector<ContactPoint> planar_antipodal() {
  return {contact(Vec3(0.03, 0, 0), Vec3(1, 0, 0)), contact(Vec3(-0.03, 0, 0), Vec3(-1, 0, 0)),
          contact(Vec3(0, 0.03, 0), Vec3(0, 1, 0)), contact(Vec3(0, -0.03, 0), Vec3(0, -1, 0))};
}

TEST(ObjectResponse, ResistedAndFreeDirections) {
  const std::vector<ContactPoint> one = {contact(Vec3(0, 0, 0.03), Vec3(0, 0, 1))};
  EXPECT_TRUE(object_response(cube(), one, Vec3(0, 0, -1)).isApprox(Vec3(0, 0, -1e-4)));
  EXPECT_TRUE(object_response(cube(), one, Vec3(1, 0, 0)).isApprox(Vec3(0.05, 0, 0)));
  EXPECT_EQ(object_response(cube(), one, Vec3::Zero()), Vec3::Zero());
}

TEST(Perturbation, ZeroBoundPassesWithZeroDisplacement) {
  PerturbConfig cfg;
  cfg.force_bound = 0.0;
  const auto r = perturbation_test(cube(), planar_antipodal(), cfg);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.max_displacement, 0.0);
  EXPECT_EQ(r.iterations_run, 100);
}

TEST(Perturbation, NoContactsFailsWithoutRounds) {
  Scene s = default_scene();
  s.object.pose = Pose::from_xyz_rpy(Vec3(10, 0, 0), Vec3::Zero());
  const auto r = perturbation_test(s, mid_range_state(s.hand()), PerturbConfig{});
  EXPECT_FALSE(r.passed);
  EXPECT_EQ(r.iterations_run, 0);
  EXPECT_TRUE(r.samples.empty());
}

TEST(Perturbation, ForceClosureGraspPassesEverySeed) {
  const double bound = std::sqrt(3.0) / 10000.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    PerturbConfig cfg;
    cfg.seed = seed;
    const auto r = perturbation_test(cube(), tetrahedral(), cfg);
    EXPECT_TRUE(r.passed) << seed;
    EXPECT_LE(r.max_displacement, bound) << seed;
    EXPECT_EQ(r.samples.size(), static_cast<std::size_t>(r.iterations_run));
  }
}

TEST(Perturbation, SingleContactAlwaysFails) {
  // With the default validation the single contact never gets past the
  // precheck; relaxing it exposes the displacement failure.
  ValidationConfig lenient;
  lenient.min_contacts = 1;
  lenient.force_closure_threshold = 1.5;
  const std::vector<ContactPoint> one = {contact(Vec3(0, 0, 0.03), Vec3(0, 0, 1))};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    PerturbConfig cfg;
    cfg.seed = seed;
    const auto strict = perturbation_test(cube(), one, cfg);
    EXPECT_FALSE(strict.passed) << seed;
    EXPECT_EQ(strict.iterations_run, 0);
    const auto r = perturbation_test(cube(), one, cfg, lenient);
    EXPECT_FALSE(r.passed) << seed;
    ASSERT_TRUE(r.failure_iteration.has_value());
    EXPECT_EQ(*r.failure_iteration, r.iterations_run);
    EXPECT_GT(r.max_displacement, cfg.displacement_threshold);
  }
}

TEST(Perturbation, PassIffBelowThresholdAndPrecheck) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    PerturbConfig cfg;
    cfg.seed = seed;
    const auto r = perturbation_test(cube(), planar_antipodal(), cfg);
    EXPECT_EQ(r.passed, r.precheck.stable && r.max_displacement <= cfg.displacement_threshold);
    EXPECT_EQ(r.samples.size(), static_cast<std::size_t>(r.iterations_run));
  }
}

TEST(Perturbation, LargerBoundNeverPassesMore) {
  const std::vector<double> bounds = {0.2, 0.4, 0.8, 1.6};
  int previous = 51;
  std::vector<bool> passed_before(50, true);
  for (double b : bounds) {
    int passes = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      PerturbConfig cfg;
      cfg.seed = seed;
      cfg.force_bound = b;
      const bool ok = perturbation_test(cube(), planar_antipodal(), cfg).passed;
      if (ok) EXPECT_TRUE(passed_before[seed]) << "seed " << seed << " bound " << b;
      passed_before[seed] = ok;
      passes += ok;
    }
    EXPECT_LE(passes, previous);
    previous = passes;
  }
  EXPECT_LT(previous, 50);
}

TEST(Perturbation, SameSeedSameReport) {
  PerturbConfig cfg;
  cfg.seed = 1234;
  const auto a = perturbation_test(cube(), planar_antipodal(), cfg);
  const auto b = perturbation_test(cube(), planar_antipodal(), cfg);
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    EXPECT_EQ(a.samples[i].force, b.samples[i].force);
    EXPECT_EQ(a.samples[i].displacement, b.samples[i].displacement);
  }
  EXPECT_EQ(a.max_displacement, b.max_displacement);
}

TEST(Perturbation, ZeroIterationsIsAConfigError) {
  PerturbConfig cfg;
  cfg.iterations = 0;
  EXPECT_THROW(perturbation_test(cube(), tetrahedral(), cfg), ConfigError);
}

TEST(Perturbation, DefaultGraspPasses) {
  const Scene scene = default_scene();
  const auto exec = execute_grasp(scene, default_grasp_targets(scene));
  PerturbConfig cfg;
  cfg.seed = 42;
  const auto r = perturbation_test(scene, exec.final_state, cfg);
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.iterations_run, 100);
}

}  // namespace
}  // namespace graspforge
