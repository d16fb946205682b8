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

// Command implementations behind the graspforge executable. Each command
// returns a process exit code: 0 success, 1 configuration or I/O error,
// 2 the grasp was not stable or the perturbation test failed.

#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "graspforge/report_io.hpp"
#include "graspforge/scenario.hpp"

namespace graspforge::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUnstable = 2;

struct Options {
  std::filesystem::path scenario = default_scenario_path();
  std::optional<std::uint64_t> seed;
  std::optional<int> steps;
  std::optional<double> hz;
  std::optional<int> iterations;
  std::optional<std::string> efficiency_basis;
  std::optional<std::filesystem::path> out;
  detail::KeyValues sets;  // raw key=value overrides
  bool timestamp = true;
  int repeat = 1;
  int jobs = 1;
};

/// Splits "key=value"; throws ConfigError when there is no '='.
inline std::pair<std::string, std::string> split_assignment(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("expected key=value, got '" + text + "'");
  return {detail::trim(text.substr(0, eq)), detail::trim(text.substr(eq + 1))};
}

inline detail::KeyValues overrides_for(const Options& o, std::optional<std::uint64_t> seed) {
  detail::KeyValues kv = o.sets;
  if (seed) kv.emplace_back("run.seed", std::to_string(*seed));
  if (o.steps) kv.emplace_back("run.steps", std::to_string(*o.steps));
  if (o.hz) kv.emplace_back("run.hz", csv_num(*o.hz));
  if (o.iterations) kv.emplace_back("perturb.iterations", std::to_string(*o.iterations));
  if (o.efficiency_basis) kv.emplace_back("metrics.efficiency_basis", *o.efficiency_basis);
  return kv;
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write '" + path.string() + "'");
  body(os);
  os.flush();
  if (!os) throw Error("write failed for '" + path.string() + "'");
}

inline std::filesystem::path prepare_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create '" + dir.string() + "': " + ec.message());
  return dir;
}

struct Job {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
};

// Runs `one` once, or `repeat` times with consecutive seeds and numbered
// output subdirectories. Output of each repetition is buffered and printed in
// order. The result is the worst exit code.
inline int repeated(const Options& o, std::ostream& out, std::ostream& err,
                    const std::function<int(const Options&, const Job&, std::ostream&, std::ostream&)>& one) {
  if (o.repeat < 1) {
    err << "error: --repeat must be >= 1\n";
    return kExitError;
  }
  if (o.repeat == 1) return one(o, Job{o.seed, o.out}, out, err);

  std::uint64_t base_seed = 0;
  std::filesystem::path base_out;
  try {
    const ScenarioConfig cfg = load_scenario(o.scenario, overrides_for(o, o.seed));
    base_seed = cfg.seed;
    base_out = o.out ? *o.out : cfg.output_dir;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }

  struct Result {
    int code = kExitOk;
    std::string out;
    std::string err;
  };
  auto run_one = [&](int i) {
    char name[32];
    std::snprintf(name, sizeof name, "run_%03d", i);
    std::ostringstream so, se;
    Result r;
    r.code = one(o, Job{base_seed + static_cast<std::uint64_t>(i), base_out / name}, so, se);
    r.out = so.str();
    r.err = se.str();
    return r;
  };

  std::vector<Result> results(static_cast<std::size_t>(o.repeat));
  const int jobs = std::max(1, o.jobs);
  for (int start = 0; start < o.repeat; start += jobs) {
    std::vector<std::future<Result>> batch;
    for (int i = start; i < std::min(o.repeat, start + jobs); ++i)
      batch.push_back(std::async(jobs > 1 ? std::launch::async : std::launch::deferred, run_one, i));
    for (std::size_t k = 0; k < batch.size(); ++k) results[static_cast<std::size_t>(start) + k] = batch[k].get();
  }

  int code = kExitOk;
  for (int i = 0; i < o.repeat; ++i) {
    const auto& r = results[static_cast<std::size_t>(i)];
    out << "[run " << i << "]\n" << r.out;
    err << r.err;
    if (r.code == kExitError || code == kExitError) code = kExitError;
    else code = std::max(code, r.code);
  }
  return code;
}

inline int run_once(const Options& o, const Job& job, std::ostream& out, std::ostream& err) {
  try {
    const ScenarioConfig cfg = load_scenario(o.scenario, overrides_for(o, job.seed));
    const auto exec = execute_grasp(cfg.scene, cfg.targets, cfg.run, cfg.ik, cfg.validation);
    const RunMetrics metrics = summarize_run(exec.log, cfg.targets, cfg.efficiency_basis);
    const auto dir = prepare_dir(job.out ? *job.out : cfg.output_dir);

    write_file(dir / "trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, exec.log, o.timestamp); });
    write_file(dir / "metrics.csv", [&](std::ostream& os) { write_metrics_csv(os, metrics, o.timestamp); });
    write_file(dir / "metrics.json", [&](std::ostream& os) { os << to_json(metrics).dump(2) << "\n"; });
    write_file(dir / "assessment.json",
               [&](std::ostream& os) { os << to_json(exec.assessment).dump(2) << "\n"; });

    bool all_success = true;
    for (const auto& f : metrics.fingers) {
      char line[160];
      std::snprintf(line, sizeof line, "%-6s distance %.4f m  movement %.4f m  efficiency %.3f  %s\n",
                    f.finger.c_str(), f.distance_to_target, f.total_movement, f.efficiency,
                    f.success ? "success" : "miss");
      out << line;
      all_success = all_success && f.success;
    }
    out << "grasp " << (exec.assessment.stable ? "stable" : "unstable") << " ("
        << to_string(exec.assessment.failure_reason) << "), contacts " << exec.assessment.contact_count
        << ", steps " << exec.steps << "\n";
    return exec.assessment.stable && all_success ? kExitOk : kExitUnstable;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

inline int perturb_once(const Options& o, const Job& job, std::ostream& out, std::ostream& err) {
  try {
    const ScenarioConfig cfg = load_scenario(o.scenario, overrides_for(o, job.seed));
    const auto exec = execute_grasp(cfg.scene, cfg.targets, cfg.run, cfg.ik, cfg.validation);
    const auto report = perturbation_test(cfg.scene, exec.final_state, cfg.perturb, cfg.validation);
    const auto dir = prepare_dir(job.out ? *job.out : cfg.output_dir);

    write_file(dir / "perturbation.json", [&](std::ostream& os) { os << to_json(report).dump(2) << "\n"; });
    write_file(dir / "perturbation_samples.csv",
               [&](std::ostream& os) { write_samples_csv(os, report, o.timestamp); });

    out << "perturbation " << (report.passed ? "passed" : "failed") << ", iterations " << report.iterations_run
        << ", max displacement " << csv_num(report.max_displacement) << " m, seed " << report.seed << "\n";
    return report.passed ? kExitOk : kExitUnstable;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

inline void apply_validation_key(ValidationConfig& v, const std::string& key, const std::string& value) {
  if (key == "validation.min_contacts") v.min_contacts = static_cast<int>(graspforge::detail::config_int(key, value));
  else if (key == "validation.distribution_threshold") v.distribution_threshold = graspforge::detail::config_double(key, value);
  else if (key == "validation.force_closure_threshold") v.force_closure_threshold = graspforge::detail::config_double(key, value);
  else if (key == "validation.min_contact_force") v.min_contact_force = graspforge::detail::config_double(key, value);
  else throw ConfigError("unknown key '" + key + "'");
}

}  // namespace detail

/// Executes the scenario and writes trajectory.csv, metrics.csv, metrics.json
/// and assessment.json. Exit 0 when the grasp is stable and every finger
/// reached its target, 2 otherwise.
inline int cmd_run(const Options& o, std::ostream& out, std::ostream& err) {
  return detail::repeated(o, out, err, detail::run_once);
}

/// Executes the scenario, then perturbs the resulting grasp. Writes
/// perturbation.json and perturbation_samples.csv.
inline int cmd_perturb(const Options& o, std::ostream& out, std::ostream& err) {
  return detail::repeated(o, out, err, detail::perturb_once);
}

/// Validates a contact list read from a JSON file and prints the assessment.
/// Exit 0 when stable, 2 when not. Only validation.* keys are accepted as
/// overrides.
inline int cmd_validate(const std::filesystem::path& contacts_path, const graspforge::detail::KeyValues& sets,
                        std::ostream& out, std::ostream& err) {
  try {
    ValidationConfig config;
    for (const auto& [k, v] : sets) detail::apply_validation_key(config, k, v);
    config.validate();
    std::ifstream in(contacts_path);
    if (!in) throw Error("cannot open '" + contacts_path.string() + "'");
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what());
    }
    const auto contacts = contacts_from_json(doc);
    const GraspAssessment assessment = validate_grasp(contacts, config);
    out << to_json(assessment).dump(2) << "\n";
    return assessment.stable ? kExitOk : kExitUnstable;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace graspforge::cli
