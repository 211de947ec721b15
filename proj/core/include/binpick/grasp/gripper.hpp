#pragma once

#include <array>
#include <vector>

#include "binpick/geometry/box.hpp"
#include "binpick/geometry/mesh.hpp"

namespace binpick::grasp {

using geometry::OrientedBox;
using geometry::RigidTransform;
using geometry::TriangleMesh;
using geometry::Vec3;

/// Parallel-jaw gripper described in the TCP frame. The TCP sits between the
/// fingertips; the hand advances along TCP +z and retreats along -z. Fingers
/// close along TCP x.
struct GripperModel {
  double stroke = 0.05;            // maximum gap between finger pads (m)
  double finger_thickness = 0.008;
  double finger_width = 0.02;
  double finger_length = 0.10;
  double tip_offset = 0.010;       // fingertips lie this far beyond the TCP along +z
  Vec3 body_half{0.04, 0.03, 0.0525};

  void validate() const;
  /// Finger boxes for a pad-to-pad gap `gap` (TCP frame).
  std::array<OrientedBox, 2> fingers(double gap) const;
  /// Palm/body box behind the fingers (TCP frame).
  OrientedBox body() const;
  /// Closing region between the pads (TCP frame).
  OrientedBox pad_region(double gap) const;
  TriangleMesh finger_mesh(double gap) const;
  TriangleMesh body_mesh() const;
};

}  // namespace binpick::grasp
