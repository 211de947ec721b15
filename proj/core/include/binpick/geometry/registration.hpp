#pragma once

#include <cstddef>
#include <span>

#include "binpick/geometry/point_cloud.hpp"
#include "binpick/geometry/spatial_index.hpp"
#include "binpick/geometry/transform.hpp"

namespace binpick::geometry {

struct IcpParams {
  std::size_t max_iterations = 50;
  double convergence_tol = 1e-7;          // meters, on the residual change
  double max_correspondence_dist = 0.01;  // meters

  void validate() const;
};

struct IcpResult {
  RigidTransform transform;  // maps source into the target frame
  double residual = 0.0;     // mean correspondence distance at exit, meters
  bool converged = false;
  std::size_t iterations = 0;
  std::size_t correspondences = 0;
};

/// Least-squares rigid motion mapping `from[i]` onto `to[i]` (Kabsch/SVD).
/// Throws DegenerateGeometryError for fewer than 3 points or collinear input.
RigidTransform fit_rigid(std::span<const Vec3> from, std::span<const Vec3> to);

/// Point-to-point ICP. Correspondences farther than max_correspondence_dist
/// are rejected.
IcpResult icp(const PointCloud& source, const PointCloud& target, const RigidTransform& init,
              const IcpParams& params);

/// Same, with a prebuilt index over the target points.
IcpResult icp(const PointCloud& source, const PointGrid& target, const RigidTransform& init,
              const IcpParams& params);

/// Point-to-plane ICP against target points with unit normals (indexed like
/// `target`). Each step solves the linearised problem with a small damping
/// term, so rotations about symmetry axes stay put instead of failing.
/// The residual is the mean absolute point-to-plane distance.
IcpResult icp_point_to_plane(const PointCloud& source, const PointGrid& target,
                             std::span<const Vec3> target_normals, const RigidTransform& init,
                             const IcpParams& params);

}  // namespace binpick::geometry
