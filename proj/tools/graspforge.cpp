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

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "graspforge/cli.hpp"

int main(int argc, char** argv) {
  namespace gcli = graspforge::cli;
  CLI::App app{"graspforge: multi-fingered grasp execution and stability testing"};
  app.require_subcommand(1);

  gcli::Options opts;
  std::vector<std::string> sets;
  std::uint64_t seed = 0;
  int steps = 0;
  double hz = 0.0;
  int iterations = 0;
  std::string basis;
  std::string out;
  bool no_timestamp = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", opts.scenario, "scenario file (key = value)");
    sub->add_option("--seed", seed, "RNG seed");
    sub->add_option("--steps", steps, "maximum simulation steps");
    sub->add_option("--hz", hz, "simulation rate");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--set", sets, "override a scenario key, key=value");
    sub->add_flag("--no-timestamp", no_timestamp, "omit the timestamp header line in CSV files");
    sub->add_option("--repeat", opts.repeat, "run N times with consecutive seeds")->check(CLI::PositiveNumber);
    sub->add_option("--jobs", opts.jobs, "parallel repetitions")->check(CLI::PositiveNumber);
  };

  auto* run = app.add_subcommand("run", "execute a grasp and write trajectory and metrics");
  add_common(run);
  run->add_option("--efficiency-basis", basis, "final_error or straight_line");

  auto* perturb = app.add_subcommand("perturb", "execute a grasp and run the perturbation test");
  add_common(perturb);
  perturb->add_option("--iterations", iterations, "number of random force samples");

  std::string contacts;
  std::vector<std::string> validate_sets;
  auto* validate = app.add_subcommand("validate", "validate a contact list given as JSON");
  validate->add_option("contacts", contacts, "contacts JSON file")->required();
  validate->add_option("--set", validate_sets, "override a validation.* threshold, key=value");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gcli::kExitError;
  }

  try {
    if (*validate) {
      graspforge::detail::KeyValues kv;
      for (const auto& s : validate_sets) kv.push_back(gcli::split_assignment(s));
      return gcli::cmd_validate(contacts, kv, std::cout, std::cerr);
    }
    for (const auto& s : sets) opts.sets.push_back(gcli::split_assignment(s));
    CLI::App* sub = *run ? run : perturb;
    if (sub->count("--seed")) opts.seed = seed;
    if (sub->count("--steps")) opts.steps = steps;
    if (sub->count("--hz")) opts.hz = hz;
    if (sub->count("--out")) opts.out = out;
    if (*run && run->count("--efficiency-basis")) opts.efficiency_basis = basis;
    if (*perturb && perturb->count("--iterations")) opts.iterations = iterations;
    opts.timestamp = !no_timestamp;
    return *run ? gcli::cmd_run(opts, std::cout, std::cerr) : gcli::cmd_perturb(opts, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return gcli::kExitError;
  }
}
