#pragma once

#include "binpick/geometry/mesh.hpp"
#include "binpick/geometry/point_cloud.hpp"
#include "binpick/geometry/transform.hpp"

namespace binpick::geometry {

/// Box with center/orientation `pose` and half extents along its local axes.
struct OrientedBox {
  RigidTransform pose;
  Vec3 half_extents = Vec3::Zero();

  bool contains(const Vec3& p, double margin = 0.0) const;
  /// Euclidean distance from p to the solid box (0 inside).
  double distance(const Vec3& p) const;
  /// Signed distance (negative inside, exact for boxes).
  double signed_distance(const Vec3& p) const;
  /// Nearest point on the box boundary (also for p inside the box).
  Vec3 closest_surface_point(const Vec3& p) const;
  OrientedBox dilated(double margin) const;
  OrientedBox transformed(const RigidTransform& t) const;
  Aabb world_bounds() const;
  TriangleMesh mesh() const;
  /// Surface samples: corners, edges and faces at spacing <= `spacing`.
  std::vector<Vec3> surface_samples(double spacing) const;
};

/// Separating-axis overlap test for two solid boxes.
bool intersects(const OrientedBox& a, const OrientedBox& b);

}  // namespace binpick::geometry
