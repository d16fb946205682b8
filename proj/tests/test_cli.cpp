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

#include <sstream>

#include "graspforge/cli.hpp"
#include "test_support.hpp"

namespace graspforge {
namespace {

using cli::Options;

Options options_for(const std::string& name) {
  Options o;
  o.out = testing::scratch_dir(name);
  o.timestamp = false;
  return o;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

TEST(Scenario, DefaultFileMatchesDefaultScene) {
  const ScenarioConfig cfg = load_scenario(default_scenario_path());
  EXPECT_TRUE(cfg.scene == default_scene());
  EXPECT_EQ(cfg.seed, 42u);
  EXPECT_EQ(cfg.run.hz, 240.0);
  EXPECT_EQ(cfg.targets.size(), 5u);
}

TEST(Scenario, UnknownKeyIsRejected) {
  EXPECT_THROW(parse_scenario("run.speed = 3\n", data_dir()), ConfigError);
  EXPECT_THROW(parse_scenario("physics.stickiness = 3\n", data_dir()), ConfigError);
  EXPECT_THROW(parse_scenario("run.hz\n", data_dir()), ConfigError);
}

TEST(Scenario, OverridesWinAndAreValidated) {
  const auto cfg = parse_scenario("run.hz = 240\n", data_dir(), {{"run.hz", "120"}, {"perturb.force_bound", "0"}});
  EXPECT_EQ(cfg.run.hz, 120.0);
  EXPECT_EQ(cfg.perturb.force_bound, 0.0);
  EXPECT_THROW(parse_scenario("", data_dir(), {{"perturb.iterations", "0"}}), ConfigError);
  EXPECT_THROW(parse_scenario("", data_dir(), {{"physics.contact_stiffness", "-1"}}), ConfigError);
}

TEST(Scenario, PenetratingObjectIsAConfigError) {
  EXPECT_THROW(parse_scenario("object.pose = 0 0 0.25\n", data_dir()), ConfigError);
}

TEST(Scenario, ExplicitTargetsReplacePlannedOnes) {
  const auto cfg = parse_scenario("target.ring = 0.1 0.2 0.3\n", data_dir());
  EXPECT_EQ(cfg.targets.at("ring").position, Vec3(0.1, 0.2, 0.3));
  EXPECT_THROW(parse_scenario("target.toe = 0 0 0\n", data_dir()), ConfigError);
}

TEST(Cli, RunDefaultScenario) {
  const Options o = options_for("cli_run");
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_run(o, out, err), 0) << err.str();
  const auto metrics = lines(testing::read_file(*o.out / "metrics.csv"));
  ASSERT_EQ(metrics.size(), 6u);
  EXPECT_EQ(metrics[0], "finger,distance_to_target_m,total_movement_m,efficiency,success,ex,ey,ez");
  const auto traj = lines(testing::read_file(*o.out / "trajectory.csv"));
  EXPECT_EQ(traj[0], "time,finger,x,y,z,contact_count,phase");
  const auto assessment = json::parse(testing::read_file(*o.out / "assessment.json"));
  EXPECT_TRUE(assessment.at("stable").get<bool>());
  EXPECT_EQ(assessment.at("failure_reason"), "none");
  const auto m = json::parse(testing::read_file(*o.out / "metrics.json"));
  EXPECT_EQ(m.at("fingers").size(), 5u);
  EXPECT_EQ(lines(out.str()).size(), 6u);
}

TEST(Cli, RunWithFarObjectIsUnstable) {
  Options o = options_for("cli_far");
  o.sets = {{"object.pose", "10 0 0"}};
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_run(o, out, err), 2) << err.str();
  const auto assessment = json::parse(testing::read_file(*o.out / "assessment.json"));
  EXPECT_EQ(assessment.at("failure_reason"), "too_few_contacts");
}

TEST(Cli, MissingConfigIsAnError) {
  Options o = options_for("cli_missing");
  o.scenario = "/nonexistent/scenario.cfg";
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_run(o, out, err), 1);
  EXPECT_FALSE(err.str().empty());
  o.scenario = default_scenario_path();
  o.sets = {{"run.warp", "9"}};
  EXPECT_EQ(cli::cmd_run(o, out, err), 1);
}

TEST(Cli, TimestampHeaderIsOptional) {
  Options o = options_for("cli_stamp");
  o.timestamp = true;
  std::ostringstream out, err;
  ASSERT_EQ(cli::cmd_run(o, out, err), 0);
  const auto first = lines(testing::read_file(*o.out / "metrics.csv"))[0];
  EXPECT_EQ(first.rfind("# generated_at ", 0), 0u);
  EXPECT_EQ(first.size(), std::string("# generated_at 2026-01-01T00:00:00Z").size());
}

TEST(Cli, SameSeedSameBytes) {
  Options a = options_for("cli_det_a");
  Options b = options_for("cli_det_b");
  a.seed = b.seed = 7;
  std::ostringstream out, err;
  ASSERT_EQ(cli::cmd_run(a, out, err), 0);
  ASSERT_EQ(cli::cmd_run(b, out, err), 0);
  for (const char* f : {"trajectory.csv", "metrics.csv", "metrics.json", "assessment.json"})
    EXPECT_EQ(testing::read_file(*a.out / f), testing::read_file(*b.out / f)) << f;
}

TEST(Cli, PerturbDefaultScenario) {
  Options o = options_for("cli_perturb");
  o.seed = 42;
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_perturb(o, out, err), 0) << err.str();
  const auto report = json::parse(testing::read_file(*o.out / "perturbation.json"));
  EXPECT_TRUE(report.at("passed").get<bool>());
  EXPECT_EQ(report.at("iterations_run"), 100);
  EXPECT_EQ(report.at("seed"), 42);
  EXPECT_EQ(lines(testing::read_file(*o.out / "perturbation_samples.csv")).size(), 101u);
}

TEST(Cli, PerturbZeroIterationsIsAnError) {
  Options o = options_for("cli_perturb_zero");
  o.iterations = 0;
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_perturb(o, out, err), 1);
}

TEST(Cli, PerturbWithoutContacts) {
  Options o = options_for("cli_perturb_none");
  o.sets = {{"object.pose", "10 0 0"}};
  o.steps = 100;
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_perturb(o, out, err), 2) << err.str();
  const auto report = json::parse(testing::read_file(*o.out / "perturbation.json"));
  EXPECT_EQ(report.at("iterations_run"), 0);
  EXPECT_FALSE(report.at("passed").get<bool>());
}

TEST(Cli, ValidateFixtures) {
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_validate(testing::fixture("antipodal_four.json"), {}, out, err), 0) << err.str();
  EXPECT_TRUE(json::parse(out.str()).at("stable").get<bool>());

  std::ostringstream out3;
  EXPECT_EQ(cli::cmd_validate(testing::fixture("three_contacts.json"), {}, out3, err), 2);
  EXPECT_EQ(json::parse(out3.str()).at("failure_reason"), "too_few_contacts");

  EXPECT_EQ(cli::cmd_validate(testing::fixture("aligned_normals.json"), {}, out, err), 2);
  EXPECT_EQ(cli::cmd_validate(testing::fixture("non_unit_normals.json"), {}, out, err), 1);
  EXPECT_EQ(cli::cmd_validate(testing::fixture("malformed.json"), {}, out, err), 1);
  EXPECT_EQ(cli::cmd_validate(testing::fixture("absent.json"), {}, out, err), 1);
  EXPECT_EQ(cli::cmd_validate(testing::fixture("three_contacts.json"), {{"validation.min_contacts", "3"}}, out, err),
            2);  // three contacts leave an unbalanced normal sum
  EXPECT_EQ(cli::cmd_validate(testing::fixture("antipodal_four.json"), {{"validation.bogus", "1"}}, out, err), 1);
}

TEST(Cli, RepeatWritesNumberedRuns) {
  Options o = options_for("cli_repeat");
  o.repeat = 3;
  o.jobs = 2;
  o.steps = 300;
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_perturb(o, out, err), 0) << err.str();
  for (int i = 0; i < 3; ++i) {
    const auto dir = *o.out / ("run_00" + std::to_string(i));
    const auto report = json::parse(testing::read_file(dir / "perturbation.json"));
    EXPECT_EQ(report.at("seed"), 42 + i);
  }
}

TEST(Cli, SplitAssignment) {
  EXPECT_EQ(cli::split_assignment("run.hz = 120"), (std::pair<std::string, std::string>{"run.hz", "120"}));
  EXPECT_THROW(cli::split_assignment("run.hz"), ConfigError);
}

}  // namespace
}  // namespace graspforge
