#include "binpick/grasp/grasps.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "binpick/errors.hpp"
#include "../detail/text_format.hpp"

namespace binpick::grasp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int step_count(double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw ArgumentError("grasp step must be positive");
  const double n = std::round(kTwoPi / step);
  if (n < 1.0 || std::abs(n * step - kTwoPi) > 1e-9) {
    throw ArgumentError("grasp step does not divide a full turn");
  }
  return static_cast<int>(n);
}

bool same_pose(const RigidTransform& a, const RigidTransform& b) {
  return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff() <= 1e-9;
}

}  // namespace

void GraspDefinition::validate(double stroke) const {
  step_count(step);
  if (!seed.is_valid()) throw ArgumentError("grasp seed is not a rigid transform");
  if (!(std::abs(axis.norm() - 1.0) <= 1e-9)) throw ArgumentError("grasp axis must be a unit vector");
  if (!(opening > 0.0 && opening <= stroke)) throw ArgumentError("grasp opening outside the stroke");
}

std::vector<RigidTransform> generate_cylindrical_grasps(const GraspDefinition& def, double stroke) {
  def.validate(stroke);
  const int n = step_count(def.step);
  const RigidTransform flip = RigidTransform::rot_z(std::numbers::pi);
  std::vector<RigidTransform> out;
  out.reserve(2 * static_cast<std::size_t>(n));
  auto add = [&](const RigidTransform& t) {
    for (const auto& o : out) {
      if (same_pose(o, t)) return;
    }
    out.push_back(t);
  };
  for (int k = 0; k < n; ++k) {
    const RigidTransform turned = RigidTransform::from_axis_angle(def.axis, k * def.step) * def.seed;
    add(turned);
    add(turned * flip);
  }
  return out;
}

std::vector<GraspPose> expand_grasps(const std::vector<GraspDefinition>& defs, double stroke) {
  std::vector<GraspPose> out;
  for (const auto& d : defs) {
    for (const auto& t : generate_cylindrical_grasps(d, stroke)) out.push_back({t, d.type_id, d.opening});
  }
  return out;
}

std::vector<GraspDefinition> cylinder_grasps(double radius, double length, double end_depth,
                                             double step) {
  geometry::Mat3 side;
  side.col(0) = Vec3(0, 1, 0);
  side.col(1) = Vec3(0, 0, -1);
  side.col(2) = Vec3(-1, 0, 0);
  geometry::Mat3 top;
  top.col(0) = Vec3(1, 0, 0);
  top.col(1) = Vec3(0, -1, 0);
  top.col(2) = Vec3(0, 0, -1);
  geometry::Mat3 bottom = geometry::Mat3::Identity();
  const double h = 0.5 * length - end_depth;
  const double width = 2.0 * radius;
  return {
      {RigidTransform(side, Vec3::Zero()), Vec3::UnitZ(), step, width, 1},
      {RigidTransform(top, Vec3(0, 0, h)), Vec3::UnitZ(), step, width, 2},
      {RigidTransform(bottom, Vec3(0, 0, -h)), Vec3::UnitZ(), step, width, 3},
  };
}

std::vector<GraspDefinition> load_grasps(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open grasp file");
  detail::LineReader r{in, path.string()};
  std::vector<GraspDefinition> defs;
  for (auto tok = r.next_any(); !tok.empty(); tok = r.next_any()) {
    if (tok[0] != "grasp") r.fail("expected 'grasp', found '" + tok[0] + "'");
    if (tok.size() != 2) r.fail("'grasp' takes one type id");
    GraspDefinition d;
    d.type_id = static_cast<int>(r.integer(tok, 1));
    d.seed = r.pose(r.next("seed"));
    auto ax = r.next("axis");
    if (ax.size() != 4) r.fail("'axis' needs 3 numbers");
    d.axis = Vec3(r.number(ax, 1), r.number(ax, 2), r.number(ax, 3));
    if (!(d.axis.norm() > 0.0)) r.fail("axis must be non-zero");
    d.axis.normalize();
    auto st = r.next("step");
    if (st.size() != 2) r.fail("'step' takes one value in degrees");
    d.step = r.number(st, 1) * std::numbers::pi / 180.0;
    auto op = r.next("opening");
    if (op.size() != 2) r.fail("'opening' takes one value in millimetres");
    d.opening = r.number(op, 1) * 1e-3;
    try {
      d.validate(std::numeric_limits<double>::infinity());
    } catch (const ArgumentError& e) {
      r.fail(e.what());
    }
    defs.push_back(d);
  }
  if (defs.empty()) throw ParseError(path.string(), 0, "no grasp definitions");
  return defs;
}

void save_grasps(const std::vector<GraspDefinition>& defs, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  using detail::fmt;
  for (const auto& d : defs) {
    out << "grasp " << d.type_id << '\n';
    detail::write_pose(out, "seed", d.seed);
    out << "axis " << fmt(d.axis.x()) << ' ' << fmt(d.axis.y()) << ' ' << fmt(d.axis.z()) << '\n';
    out << "step " << fmt(d.step * 180.0 / std::numbers::pi) << '\n';
    out << "opening " << fmt(d.opening * 1e3) << "\n\n";
  }
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace binpick::grasp
