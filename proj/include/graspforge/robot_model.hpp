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

// Robot-description parsing for the five-finger hand.
//
// Supported subset: <link> with at most one <collision> (box, capsule or
// sphere geometry plus an origin), <joint> of type revolute or fixed with
// <origin>, <axis>, <limit lower upper> and <dynamics damping>, and the
// toolkit-specific <finger name="..." end_effector="..."/> element that
// designates each finger's tip link. <visual>, <inertial>, <material> and
// other annotation elements are ignored.

#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "graspforge/geometry.hpp"

namespace graspforge {

enum class JointKind { revolute, fixed };

struct Origin {
  Vec3 xyz = Vec3::Zero();
  Vec3 rpy = Vec3::Zero();

  Isometry transform() const {
    Isometry iso = Isometry::Identity();
    iso.linear() = quat_from_rpy(rpy).toRotationMatrix();
    iso.translation() = xyz;
    return iso;
  }

  bool operator==(const Origin& o) const { return xyz == o.xyz && rpy == o.rpy; }
};

struct BoxGeometry {
  Vec3 half_extents = Vec3::Zero();
  bool operator==(const BoxGeometry& o) const { return half_extents == o.half_extents; }
};

/// Capsule along the local Z axis; `length` is the cylindrical section.
struct CapsuleGeometry {
  double radius = 0.0;
  double length = 0.0;
  bool operator==(const CapsuleGeometry&) const = default;
};

struct SphereGeometry {
  double radius = 0.0;
  bool operator==(const SphereGeometry&) const = default;
};

using Geometry = std::variant<BoxGeometry, CapsuleGeometry, SphereGeometry>;

struct LinkSpec {
  std::string name;
  std::optional<Geometry> geometry;
  Origin geometry_origin;

  bool operator==(const LinkSpec&) const = default;
};

struct JointSpec {
  std::string name;
  JointKind kind = JointKind::fixed;
  Vec3 axis = Vec3::UnitX();
  Origin origin;
  double lower_limit = 0.0;
  double upper_limit = 0.0;
  double damping = 0.0;
  std::size_t parent = 0;
  std::size_t child = 0;

  bool movable() const { return kind == JointKind::revolute; }

  bool operator==(const JointSpec& o) const {
    return name == o.name && kind == o.kind && axis == o.axis && origin == o.origin &&
           lower_limit == o.lower_limit && upper_limit == o.upper_limit &&
           damping == o.damping && parent == o.parent && child == o.child;
  }
};

struct FingerSpec {
  std::string name;
  std::vector<std::size_t> joints;  // movable joints, base to tip
  std::size_t end_effector = 0;
  std::vector<std::size_t> links;   // links driven by the finger, base to tip

  bool operator==(const FingerSpec&) const = default;
};

struct JointLimits {
  double lower = 0.0;
  double upper = 0.0;
  bool operator==(const JointLimits&) const = default;
};

struct FingerDecl {
  std::string name;
  std::string end_effector;
};

struct ParseOptions {
  // Enforce the thumb/index/middle/ring/pinky layout (5 + 4x4 movable joints).
  bool require_hand_layout = false;
};

inline const std::vector<std::string>& hand_finger_names() {
  static const std::vector<std::string> names = {"thumb", "index", "middle", "ring", "pinky"};
  return names;
}

/// Validated kinematic tree. Immutable once built.
class KinematicChain {
 public:
  static KinematicChain build(std::string name, std::vector<LinkSpec> links,
                              std::vector<JointSpec> joints,
                              const std::vector<FingerDecl>& fingers,
                              const ParseOptions& options = {}) {
    KinematicChain chain;
    chain.name_ = std::move(name);
    chain.links_ = std::move(links);
    chain.joints_ = std::move(joints);
    chain.validate_tree();
    for (const auto& decl : fingers) chain.add_finger(decl);
    if (options.require_hand_layout) chain.validate_hand_layout();
    return chain;
  }

  const std::string& name() const { return name_; }
  std::span<const LinkSpec> links() const { return links_; }
  std::span<const JointSpec> joints() const { return joints_; }
  std::span<const FingerSpec> fingers() const { return fingers_; }
  std::size_t root_link() const { return root_; }

  std::optional<std::size_t> parent_joint(std::size_t link) const {
    check_link(link);
    return parent_joint_[link];
  }

  std::optional<std::size_t> find_link(std::string_view name) const {
    for (std::size_t i = 0; i < links_.size(); ++i)
      if (links_[i].name == name) return i;
    return std::nullopt;
  }

  std::size_t link_index(std::string_view name) const {
    if (auto idx = find_link(name)) return *idx;
    throw LookupError("unknown link '" + std::string(name) + "'");
  }

  const FingerSpec* find_finger(std::string_view name) const {
    for (const auto& f : fingers_)
      if (f.name == name) return &f;
    return nullptr;
  }

  const FingerSpec& finger(std::string_view name) const {
    if (const auto* f = find_finger(name)) return *f;
    throw LookupError("unknown finger '" + std::string(name) + "'");
  }

  /// Joints on the path root -> link, in root-to-link order.
  std::vector<std::size_t> path_joints(std::size_t link) const {
    check_link(link);
    std::vector<std::size_t> path;
    for (auto j = parent_joint_[link]; j; j = parent_joint_[joints_[*j].parent])
      path.push_back(*j);
    std::reverse(path.begin(), path.end());
    return path;
  }

  std::size_t movable_joint_count() const {
    return static_cast<std::size_t>(
        std::count_if(joints_.begin(), joints_.end(), [](const auto& j) { return j.movable(); }));
  }

  void check_link(std::size_t link) const {
    if (link >= links_.size())
      throw LookupError("link index " + std::to_string(link) + " out of range");
  }

  bool operator==(const KinematicChain& o) const {
    return name_ == o.name_ && links_ == o.links_ && joints_ == o.joints_ &&
           fingers_ == o.fingers_;
  }

 private:
  KinematicChain() = default;

  void validate_tree() {
    if (links_.empty()) throw ValidationError("robot has no links");
    for (std::size_t i = 0; i < links_.size(); ++i) {
      const auto& l = links_[i];
      for (std::size_t k = 0; k < i; ++k)
        if (links_[k].name == l.name) throw ValidationError("duplicate link '" + l.name + "'");
      if (l.geometry) validate_geometry(l);
    }
    parent_joint_.assign(links_.size(), std::nullopt);
    for (std::size_t j = 0; j < joints_.size(); ++j) {
      const auto& js = joints_[j];
      for (std::size_t k = 0; k < j; ++k)
        if (joints_[k].name == js.name) throw ValidationError("duplicate joint '" + js.name + "'");
      if (js.parent >= links_.size() || js.child >= links_.size())
        throw ValidationError("joint '" + js.name + "': link index out of range");
      if (js.parent == js.child) throw ValidationError("joint '" + js.name + "': cycle (self-loop)");
      if (!is_unit(js.axis, 1e-9))
        throw ValidationError("joint '" + js.name + "': axis must have unit norm");
      if (js.movable() && !(js.lower_limit <= js.upper_limit))
        throw ValidationError("joint '" + js.name + "': lower limit exceeds upper limit");
      if (js.damping < 0.0) throw ValidationError("joint '" + js.name + "': negative damping");
      if (parent_joint_[js.child])
        throw ValidationError("link '" + links_[js.child].name + "' has more than one parent joint");
      parent_joint_[js.child] = j;
    }
    // Walk up from every link; revisiting a link means the parent relation loops.
    for (std::size_t start = 0; start < links_.size(); ++start) {
      std::vector<bool> seen(links_.size(), false);
      std::size_t cur = start;
      while (parent_joint_[cur]) {
        if (seen[cur]) throw ValidationError("cycle through link '" + links_[cur].name + "'");
        seen[cur] = true;
        cur = joints_[*parent_joint_[cur]].parent;
      }
    }
    std::size_t roots = 0;
    for (std::size_t i = 0; i < links_.size(); ++i)
      if (!parent_joint_[i]) {
        root_ = i;
        ++roots;
      }
    if (roots != 1)
      throw ValidationError("expected a single root link, found " + std::to_string(roots));
  }

  static void validate_geometry(const LinkSpec& l) {
    const bool ok = std::visit(
        [](const auto& g) {
          using G = std::decay_t<decltype(g)>;
          if constexpr (std::is_same_v<G, BoxGeometry>)
            return (g.half_extents.array() > 0.0).all();
          else if constexpr (std::is_same_v<G, CapsuleGeometry>)
            return g.radius > 0.0 && g.length > 0.0;
          else
            return g.radius > 0.0;
        },
        *l.geometry);
    if (!ok) throw ValidationError("link '" + l.name + "': geometry dimensions must be positive");
  }

  void add_finger(const FingerDecl& decl) {
    if (find_finger(decl.name)) throw ValidationError("duplicate finger '" + decl.name + "'");
    auto ee = find_link(decl.end_effector);
    if (!ee)
      throw ValidationError("finger '" + decl.name + "': unknown end-effector link '" +
                            decl.end_effector + "'");
    for (const auto& j : joints_)
      if (j.parent == *ee)
        throw ValidationError("finger '" + decl.name + "': end-effector link '" +
                              decl.end_effector + "' is not a leaf");
    FingerSpec f;
    f.name = decl.name;
    f.end_effector = *ee;
    bool driven = false;
    for (std::size_t j : path_joints(*ee)) {
      if (joints_[j].movable()) {
        for (const auto& other : fingers_)
          if (std::find(other.joints.begin(), other.joints.end(), j) != other.joints.end())
            throw ValidationError("finger '" + decl.name + "' shares joint '" + joints_[j].name +
                                  "' with finger '" + other.name + "'");
        f.joints.push_back(j);
        driven = true;
      }
      if (driven) f.links.push_back(joints_[j].child);
    }
    fingers_.push_back(std::move(f));
  }

  void validate_hand_layout() const {
    for (const auto& name : hand_finger_names()) {
      const auto* f = find_finger(name);
      if (!f) throw ValidationError("bad DOF count: hand is missing finger '" + name + "'");
      const std::size_t expected = name == "thumb" ? 5 : 4;
      if (f->joints.size() != expected)
        throw ValidationError("bad DOF count: finger '" + name + "' has " +
                              std::to_string(f->joints.size()) + " movable joints, expected " +
                              std::to_string(expected));
    }
    if (fingers_.size() != hand_finger_names().size())
      throw ValidationError("bad DOF count: hand declares " + std::to_string(fingers_.size()) +
                            " fingers, expected 5");
  }

  std::string name_;
  std::vector<LinkSpec> links_;
  std::vector<JointSpec> joints_;
  std::vector<FingerSpec> fingers_;
  std::vector<std::optional<std::size_t>> parent_joint_;
  std::size_t root_ = 0;
};

namespace detail {

using boost::property_tree::ptree;

inline std::optional<std::string> attribute(const ptree& node, const std::string& key) {
  if (auto attrs = node.get_child_optional("<xmlattr>"))
    if (auto v = attrs->get_optional<std::string>(key)) return *v;
  return std::nullopt;
}

inline std::string required_attribute(const ptree& node, const std::string& key,
                                      const std::string& context) {
  if (auto v = attribute(node, key)) return *v;
  throw ParseError(context + ": missing attribute '" + key + "'");
}

inline std::vector<double> parse_numbers(const std::string& text, const std::string& context) {
  std::vector<double> out;
  const char* p = text.c_str();
  while (*p) {
    while (*p == ' ' || *p == '\t' || *p == '\n' || *p == '\r') ++p;
    if (!*p) break;
    char* end = nullptr;
    const double v = std::strtod(p, &end);
    if (end == p) throw ParseError(context + ": malformed number list '" + text + "'");
    out.push_back(v);
    p = end;
  }
  return out;
}

inline double parse_scalar(const std::string& text, const std::string& context) {
  auto v = parse_numbers(text, context);
  if (v.size() != 1) throw ParseError(context + ": expected one number, got '" + text + "'");
  return v[0];
}

inline Vec3 parse_vec3(const std::string& text, const std::string& context) {
  auto v = parse_numbers(text, context);
  if (v.size() != 3) throw ParseError(context + ": expected three numbers, got '" + text + "'");
  return Vec3(v[0], v[1], v[2]);
}

inline Origin parse_origin(const ptree& parent, const std::string& context) {
  Origin o;
  if (auto node = parent.get_child_optional("origin")) {
    if (auto xyz = attribute(*node, "xyz")) o.xyz = parse_vec3(*xyz, context + " origin xyz");
    if (auto rpy = attribute(*node, "rpy")) o.rpy = parse_vec3(*rpy, context + " origin rpy");
  }
  return o;
}

inline LinkSpec parse_link(const ptree& node) {
  LinkSpec link;
  link.name = required_attribute(node, "name", "link");
  const std::string ctx = "link '" + link.name + "'";
  int collisions = 0;
  for (const auto& [tag, child] : node) {
    if (tag != "collision") continue;
    if (++collisions > 1) throw ParseError(ctx + ": more than one <collision> element");
    link.geometry_origin = parse_origin(child, ctx);
    auto geom = child.get_child_optional("geometry");
    if (!geom) throw ParseError(ctx + ": <collision> without <geometry>");
    for (const auto& [gtag, g] : *geom) {
      if (gtag == "<xmlattr>" || gtag == "<xmlcomment>") continue;
      if (gtag == "box") {
        link.geometry = BoxGeometry{parse_vec3(required_attribute(g, "size", ctx + " box"), ctx) / 2.0};
      } else if (gtag == "capsule") {
        link.geometry = CapsuleGeometry{
            parse_scalar(required_attribute(g, "radius", ctx + " capsule"), ctx),
            parse_scalar(required_attribute(g, "length", ctx + " capsule"), ctx)};
      } else if (gtag == "sphere") {
        link.geometry = SphereGeometry{parse_scalar(required_attribute(g, "radius", ctx + " sphere"), ctx)};
      } else {
        throw ParseError(ctx + ": unsupported geometry <" + gtag + ">");
      }
    }
    if (!link.geometry) throw ParseError(ctx + ": empty <geometry>");
  }
  return link;
}

struct RawJoint {
  JointSpec spec;
  std::string parent;
  std::string child;
};

inline RawJoint parse_joint(const ptree& node) {
  RawJoint raw;
  auto& j = raw.spec;
  j.name = required_attribute(node, "name", "joint");
  const std::string ctx = "joint '" + j.name + "'";
  const std::string type = required_attribute(node, "type", ctx);
  if (type == "revolute")
    j.kind = JointKind::revolute;
  else if (type == "fixed")
    j.kind = JointKind::fixed;
  else
    throw ParseError(ctx + ": unsupported joint type '" + type + "'");
  auto parent = node.get_child_optional("parent");
  auto child = node.get_child_optional("child");
  if (!parent || !child) throw ParseError(ctx + ": missing <parent> or <child>");
  raw.parent = required_attribute(*parent, "link", ctx + " <parent>");
  raw.child = required_attribute(*child, "link", ctx + " <child>");
  j.origin = parse_origin(node, ctx);
  if (auto axis = node.get_child_optional("axis"))
    j.axis = parse_vec3(required_attribute(*axis, "xyz", ctx + " <axis>"), ctx + " axis");
  if (auto limit = node.get_child_optional("limit")) {
    if (auto lo = attribute(*limit, "lower")) j.lower_limit = parse_scalar(*lo, ctx + " lower");
    if (auto hi = attribute(*limit, "upper")) j.upper_limit = parse_scalar(*hi, ctx + " upper");
  } else if (j.kind == JointKind::revolute) {
    throw ValidationError(ctx + ": missing limit on revolute joint");
  }
  if (auto dyn = node.get_child_optional("dynamics"))
    if (auto d = attribute(*dyn, "damping")) j.damping = parse_scalar(*d, ctx + " damping");
  return raw;
}

inline std::string fmt_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_vec(const Vec3& v) {
  return fmt_num(v.x()) + " " + fmt_num(v.y()) + " " + fmt_num(v.z());
}

inline void write_origin(std::ostream& os, const Origin& o, const char* indent) {
  os << indent << "<origin xyz=\"" << fmt_vec(o.xyz) << "\" rpy=\"" << fmt_vec(o.rpy) << "\"/>\n";
}

}  // namespace detail

inline KinematicChain parse_robot_description(std::string_view text,
                                              const ParseOptions& options = {}) {
  namespace pt = boost::property_tree;
  pt::ptree doc;
  try {
    std::istringstream in{std::string(text)};
    pt::read_xml(in, doc);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError("malformed XML at line " + std::to_string(e.line()) + ": " + e.message());
  }
  auto robot = doc.get_child_optional("robot");
  if (!robot) throw ParseError("missing <robot> root element");

  std::vector<LinkSpec> links;
  std::vector<detail::RawJoint> raw_joints;
  std::vector<FingerDecl> fingers;
  for (const auto& [tag, node] : *robot) {
    if (tag == "link")
      links.push_back(detail::parse_link(node));
    else if (tag == "joint")
      raw_joints.push_back(detail::parse_joint(node));
    else if (tag == "finger")
      fingers.push_back({detail::required_attribute(node, "name", "finger"),
                         detail::required_attribute(node, "end_effector", "finger")});
  }

  std::map<std::string, std::size_t> link_by_name;
  for (std::size_t i = 0; i < links.size(); ++i) link_by_name.emplace(links[i].name, i);
  std::vector<JointSpec> joints;
  for (auto& raw : raw_joints) {
    auto p = link_by_name.find(raw.parent);
    auto c = link_by_name.find(raw.child);
    if (p == link_by_name.end() || c == link_by_name.end())
      throw ValidationError("joint '" + raw.spec.name + "': references unknown link '" +
                            (p == link_by_name.end() ? raw.parent : raw.child) + "'");
    raw.spec.parent = p->second;
    raw.spec.child = c->second;
    joints.push_back(std::move(raw.spec));
  }
  return KinematicChain::build(robot->get<std::string>("<xmlattr>.name", "robot"),
                               std::move(links), std::move(joints), fingers, options);
}

inline std::string serialize_robot_description(const KinematicChain& chain) {
  std::ostringstream os;
  os << "<?xml version=\"1.0\"?>\n<robot name=\"" << chain.name() << "\">\n";
  for (const auto& link : chain.links()) {
    os << "  <link name=\"" << link.name << "\">\n";
    if (link.geometry) {
      os << "    <collision>\n";
      detail::write_origin(os, link.geometry_origin, "      ");
      os << "      <geometry>\n";
      std::visit(
          [&os](const auto& g) {
            using G = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<G, BoxGeometry>)
              os << "        <box size=\"" << detail::fmt_vec(g.half_extents * 2.0) << "\"/>\n";
            else if constexpr (std::is_same_v<G, CapsuleGeometry>)
              os << "        <capsule radius=\"" << detail::fmt_num(g.radius) << "\" length=\""
                 << detail::fmt_num(g.length) << "\"/>\n";
            else
              os << "        <sphere radius=\"" << detail::fmt_num(g.radius) << "\"/>\n";
          },
          *link.geometry);
      os << "      </geometry>\n    </collision>\n";
    }
    os << "  </link>\n";
  }
  for (const auto& j : chain.joints()) {
    os << "  <joint name=\"" << j.name << "\" type=\""
       << (j.movable() ? "revolute" : "fixed") << "\">\n";
    os << "    <parent link=\"" << chain.links()[j.parent].name << "\"/>\n";
    os << "    <child link=\"" << chain.links()[j.child].name << "\"/>\n";
    detail::write_origin(os, j.origin, "    ");
    os << "    <axis xyz=\"" << detail::fmt_vec(j.axis) << "\"/>\n";
    if (j.movable() || j.lower_limit != 0.0 || j.upper_limit != 0.0)
      os << "    <limit lower=\"" << detail::fmt_num(j.lower_limit) << "\" upper=\""
         << detail::fmt_num(j.upper_limit) << "\"/>\n";
    if (j.damping != 0.0) os << "    <dynamics damping=\"" << detail::fmt_num(j.damping) << "\"/>\n";
    os << "  </joint>\n";
  }
  for (const auto& f : chain.fingers())
    os << "  <finger name=\"" << f.name << "\" end_effector=\""
       << chain.links()[f.end_effector].name << "\"/>\n";
  os << "</robot>\n";
  return os.str();
}

inline KinematicChain load_robot_description(const std::filesystem::path& path,
                                             const ParseOptions& options = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open robot description '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_robot_description(buf.str(), options);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

inline std::vector<JointLimits> finger_joint_limits(const KinematicChain& chain,
                                                    std::string_view finger) {
  std::vector<JointLimits> out;
  for (std::size_t j : chain.finger(finger).joints)
    out.push_back({chain.joints()[j].lower_limit, chain.joints()[j].upper_limit});
  return out;
}

}  // namespace graspforge
