#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "binpick/geometry/point_cloud.hpp"
#include "binpick/geometry/transform.hpp"

namespace binpick::geometry {

using Triangle = std::array<std::uint32_t, 3>;

struct Aabb {
  Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 hi = Vec3::Constant(-std::numeric_limits<double>::infinity());

  void extend(const Vec3& p) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  void extend(const Aabb& o) {
    lo = lo.cwiseMin(o.lo);
    hi = hi.cwiseMax(o.hi);
  }
  bool valid() const { return (lo.array() <= hi.array()).all(); }
  Vec3 center() const { return 0.5 * (lo + hi); }
  Vec3 extent() const { return hi - lo; }
};

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;

  /// Throws ArgumentError on out-of-range indices or non-finite vertices.
  void validate() const;
  /// Drops triangles with area <= `min_area` (m^2) or repeated indices.
  std::size_t remove_degenerate(double min_area = 1e-14);

  Aabb bounds() const;
  double area() const;
  /// Area-weighted surface centroid.
  Vec3 centroid() const;
  /// Radius of the smallest sphere about centroid() containing every vertex.
  double bounding_radius() const;
  Vec3 normal(std::size_t tri) const;
};

TriangleMesh transformed(const TriangleMesh& mesh, const RigidTransform& t);
/// Appends `b` to `a` (indices offset).
void append(TriangleMesh& a, const TriangleMesh& b);

/// Axis-aligned box centered at the origin.
TriangleMesh make_box(const Vec3& half_extents);
/// Closed cylinder along z, centered at the origin.
TriangleMesh make_cylinder(double radius, double length, int segments = 24);

/// Closest point on triangle (a, b, c) to p.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Generalized winding number of a closed mesh about p (about 1 inside, 0 outside).
double winding_number(const TriangleMesh& mesh, const Vec3& p);

/// Unsigned distance from p to the mesh surface (brute force over triangles).
double surface_distance(const TriangleMesh& mesh, const Vec3& p);

/// Uniform area-weighted random surface samples, deterministic in `seed`.
PointCloud sample_surface_uniform(const TriangleMesh& mesh, std::size_t count,
                                  std::uint64_t seed, std::vector<Vec3>* normals = nullptr);

/// Poisson-disk surface sampling: no two samples closer than `radius`.
/// Candidates are drawn uniformly and accepted greedily in draw order.
PointCloud sample_surface_poisson(const TriangleMesh& mesh, double radius, std::uint64_t seed,
                                  std::vector<Vec3>* normals = nullptr);

/// Points along edges whose dihedral angle exceeds `min_angle`, spaced <= `spacing`.
PointCloud sample_feature_edges(const TriangleMesh& mesh, double min_angle, double spacing);

}  // namespace binpick::geometry
