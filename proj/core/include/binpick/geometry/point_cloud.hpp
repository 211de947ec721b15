#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "binpick/geometry/transform.hpp"

namespace binpick::geometry {

struct PointCloud {
  std::vector<Vec3> points;
  std::string frame = "world";

  std::size_t size() const noexcept { return points.size(); }
  bool empty() const noexcept { return points.empty(); }
  bool all_finite() const;
  Vec3 centroid() const;
};

/// Maps every point through `t`. Throws EmptyInputError on an empty cloud.
PointCloud transform_points(const PointCloud& cloud, const RigidTransform& t);

/// Points with ||p - center|| <= radius, in input order.
PointCloud radius_crop(const PointCloud& cloud, const Vec3& center, double radius);

/// Greedy farthest-point sampling. The first pick is the point nearest the
/// centroid (lowest index on ties); each later pick maximizes its distance to
/// the already selected set (lowest index on ties).
std::vector<std::size_t> farthest_point_sampling(const PointCloud& cloud, std::size_t k);

/// Keeps one point per occupied voxel (the first one seen), preserving order.
PointCloud voxel_downsample(const PointCloud& cloud, double voxel);

PointCloud select(const PointCloud& cloud, std::span<const std::size_t> indices);

}  // namespace binpick::geometry
