#pragma once

#include <vector>

#include "binpick/geometry/box.hpp"
#include "binpick/geometry/mesh.hpp"
#include "binpick/geometry/transform.hpp"

namespace binpick::scene {

using geometry::OrientedBox;
using geometry::RigidTransform;
using geometry::TriangleMesh;
using geometry::Vec3;

/// Open-top box bin. The bin frame has its origin at the centre of the cavity
/// floor with +z pointing out of the opening.
struct BinModel {
  Vec3 cavity{0.24, 0.18, 0.10};  // inner extents x, y, z (m)
  double wall = 0.005;            // wall and floor thickness (m)
  RigidTransform pose;            // bin -> world

  void validate() const;
  /// Floor and four walls, in the bin frame.
  std::vector<OrientedBox> boxes() const;
  std::vector<OrientedBox> world_boxes() const;
  /// Outer mesh in the bin frame.
  TriangleMesh mesh() const;
  /// Points on the floor top, inner wall faces and wall tops (bin frame).
  std::vector<Vec3> inner_surface_samples(double spacing) const;
  /// True if p (bin frame) lies in the cavity shrunk by `margin` on every side.
  bool in_cavity(const Vec3& p, double margin = 0.0) const;
};

}  // namespace binpick::scene
