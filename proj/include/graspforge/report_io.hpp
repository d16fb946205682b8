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

// JSON and CSV serialisation of reports. JSON field names match the C++
// struct field names.

#pragma once

#include <cstdio>
#include <ctime>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "graspforge/metrics.hpp"
#include "graspforge/perturbation.hpp"

namespace graspforge {

using json = nlohmann::json;

inline json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

inline json to_json(const GraspAssessment& a) {
  return json{{"stable", a.stable},
              {"contact_count", a.contact_count},
              {"center", to_json(a.center)},
              {"max_distance", a.max_distance},
              {"closure_residual", a.closure_residual},
              {"failure_reason", to_string(a.failure_reason)}};
}

inline json to_json(const PerturbationReport& r) {
  json samples = json::array();
  for (const auto& s : r.samples)
    samples.push_back({{"force", to_json(s.force)}, {"displacement", s.displacement}});
  return json{{"passed", r.passed},
              {"iterations_run", r.iterations_run},
              {"max_displacement", r.max_displacement},
              {"failure_iteration", r.failure_iteration ? json(*r.failure_iteration) : json(nullptr)},
              {"seed", r.seed},
              {"precheck", to_json(r.precheck)},
              {"samples", samples}};
}

inline json to_json(const RunMetrics& m) {
  json fingers = json::array();
  for (const auto& f : m.fingers)
    fingers.push_back({{"finger", f.finger},
                       {"distance_to_target", f.distance_to_target},
                       {"total_movement", f.total_movement},
                       {"efficiency", f.efficiency},
                       {"success", f.success},
                       {"directional_error", to_json(f.directional_error)}});
  return json{{"efficiency_basis", to_string(m.basis)},
              {"fingers", fingers},
              {"mean_distance", m.distances.mean},
              {"std_distance", m.distances.std},
              {"success_rate", m.distances.success_rate},
              {"axis_errors", {{"x", m.axis_errors[0]}, {"y", m.axis_errors[1]}, {"z", m.axis_errors[2]}}}};
}

inline json to_json(const ContactPoint& c) {
  return json{{"finger", c.finger},
              {"link", c.link},
              {"position", to_json(c.position)},
              {"normal", to_json(c.normal)},
              {"penetration_depth", c.penetration_depth},
              {"normal_force", c.normal_force}};
}

inline constexpr double kInputNormalTolerance = 1e-3;

namespace detail {

inline Vec3 vec3_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3 || !j[0].is_number() || !j[1].is_number() || !j[2].is_number())
    throw ParseError(what + ": expected an array of three numbers");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

}  // namespace detail

/// Contact list from `{"contacts": [...]}` or a bare array. Each entry needs
/// position, normal and normal_force; normals must be unit within 1e-3.
inline std::vector<ContactPoint> contacts_from_json(const json& doc) {
  const json* list = &doc;
  if (doc.is_object()) {
    if (!doc.contains("contacts")) throw ParseError("missing 'contacts' array");
    list = &doc.at("contacts");
  }
  if (!list->is_array()) throw ParseError("'contacts' must be an array");
  std::vector<ContactPoint> out;
  for (std::size_t i = 0; i < list->size(); ++i) {
    const json& e = (*list)[i];
    const std::string ctx = "contact " + std::to_string(i);
    if (!e.is_object()) throw ParseError(ctx + ": expected an object");
    for (const char* key : {"position", "normal", "normal_force"})
      if (!e.contains(key)) throw ParseError(ctx + ": missing '" + key + "'");
    ContactPoint c;
    c.position = detail::vec3_from_json(e.at("position"), ctx + " position");
    c.normal = detail::vec3_from_json(e.at("normal"), ctx + " normal");
    if (!is_unit(c.normal, kInputNormalTolerance))
      throw ValidationError(ctx + ": normal is not unit length");
    if (!e.at("normal_force").is_number()) throw ParseError(ctx + ": normal_force must be a number");
    c.normal_force = e.at("normal_force").get<double>();
    if (e.contains("penetration_depth") && e.at("penetration_depth").is_number())
      c.penetration_depth = e.at("penetration_depth").get<double>();
    if (e.contains("finger") && e.at("finger").is_string()) c.finger = e.at("finger").get<std::string>();
    if (e.contains("link") && e.at("link").is_number_unsigned()) c.link = e.at("link").get<std::size_t>();
    out.push_back(std::move(c));
  }
  return out;
}

inline std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline std::string iso8601_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void write_timestamp(std::ostream& os, bool timestamp) {
  if (timestamp) os << "# generated_at " << iso8601_now() << "\n";
}

inline void write_trajectory_csv(std::ostream& os, const TrajectoryLog& log, bool timestamp = false) {
  write_timestamp(os, timestamp);
  os << "time,finger,x,y,z,contact_count,phase\n";
  for (const auto& e : log.entries)
    for (const auto& [finger, p] : e.fingertips)
      os << csv_num(e.time) << ',' << finger << ',' << csv_num(p.x()) << ',' << csv_num(p.y()) << ','
         << csv_num(p.z()) << ',' << e.contact_count << ',' << to_string(e.phase) << '\n';
}

inline void write_metrics_csv(std::ostream& os, const RunMetrics& m, bool timestamp = false) {
  write_timestamp(os, timestamp);
  os << "finger,distance_to_target_m,total_movement_m,efficiency,success,ex,ey,ez\n";
  for (const auto& f : m.fingers)
    os << f.finger << ',' << csv_num(f.distance_to_target) << ',' << csv_num(f.total_movement) << ','
       << csv_num(f.efficiency) << ',' << (f.success ? 1 : 0) << ',' << csv_num(f.directional_error.x())
       << ',' << csv_num(f.directional_error.y()) << ',' << csv_num(f.directional_error.z()) << '\n';
}

inline void write_samples_csv(std::ostream& os, const PerturbationReport& r, bool timestamp = false) {
  write_timestamp(os, timestamp);
  os << "iteration,fx,fy,fz,displacement\n";
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    const auto& s = r.samples[i];
    os << (i + 1) << ',' << csv_num(s.force.x()) << ',' << csv_num(s.force.y()) << ','
       << csv_num(s.force.z()) << ',' << csv_num(s.displacement) << '\n';
  }
}

}  // namespace graspforge
