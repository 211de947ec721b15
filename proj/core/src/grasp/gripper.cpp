#include "binpick/grasp/gripper.hpp"

#include "binpick/errors.hpp"

namespace binpick::grasp {

void GripperModel::validate() const {
  if (!(stroke > 0.0)) throw ArgumentError("gripper stroke must be positive");
  if (!(finger_thickness > 0.0 && finger_width > 0.0 && finger_length > 0.0)) {
    throw ArgumentError("finger dimensions must be positive");
  }
  if (!(body_half.array() > 0.0).all()) throw ArgumentError("gripper body extents must be positive");
}

std::array<OrientedBox, 2> GripperModel::fingers(double gap) const {
  const double zc = tip_offset - 0.5 * finger_length;
  const double xc = 0.5 * gap + 0.5 * finger_thickness;
  const Vec3 half(0.5 * finger_thickness, 0.5 * finger_width, 0.5 * finger_length);
  return {OrientedBox{RigidTransform::from_translation(Vec3(xc, 0, zc)), half},
          OrientedBox{RigidTransform::from_translation(Vec3(-xc, 0, zc)), half}};
}

OrientedBox GripperModel::body() const {
  const double zc = tip_offset - finger_length - body_half.z();
  return {RigidTransform::from_translation(Vec3(0, 0, zc)), body_half};
}

OrientedBox GripperModel::pad_region(double gap) const {
  const double zc = tip_offset - 0.5 * finger_length;
  return {RigidTransform::from_translation(Vec3(0, 0, zc)),
          Vec3(0.5 * gap, 0.5 * finger_width, 0.5 * finger_length)};
}

TriangleMesh GripperModel::finger_mesh(double gap) const {
  TriangleMesh m;
  for (const auto& f : fingers(gap)) geometry::append(m, f.mesh());
  return m;
}

TriangleMesh GripperModel::body_mesh() const { return body().mesh(); }

}  // namespace binpick::grasp
