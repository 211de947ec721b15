#include "binpick/geometry/point_cloud.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "binpick/errors.hpp"

namespace binpick::geometry {

bool PointCloud::all_finite() const {
  for (const auto& p : points) {
    if (!p.allFinite()) return false;
  }
  return true;
}

Vec3 PointCloud::centroid() const {
  if (points.empty()) throw EmptyInputError("centroid of an empty cloud");
  Vec3 sum = Vec3::Zero();
  for (const auto& p : points) sum += p;
  return sum / static_cast<double>(points.size());
}

PointCloud transform_points(const PointCloud& cloud, const RigidTransform& t) {
  if (cloud.empty()) throw EmptyInputError("transform_points: empty cloud");
  PointCloud out;
  out.frame = cloud.frame;
  out.points.reserve(cloud.size());
  for (const auto& p : cloud.points) out.points.push_back(t.apply(p));
  return out;
}

PointCloud radius_crop(const PointCloud& cloud, const Vec3& center, double radius) {
  if (!(radius > 0.0)) throw ArgumentError("radius_crop: radius must be positive");
  PointCloud out;
  out.frame = cloud.frame;
  const double r2 = radius * radius;
  for (const auto& p : cloud.points) {
    if ((p - center).squaredNorm() <= r2) out.points.push_back(p);
  }
  return out;
}

std::vector<std::size_t> farthest_point_sampling(const PointCloud& cloud, std::size_t k) {
  if (k < 1) throw ArgumentError("farthest_point_sampling: k must be >= 1");
  if (k > cloud.size()) {
    throw ArgumentError("farthest_point_sampling: k = " + std::to_string(k) +
                        " exceeds cloud size " + std::to_string(cloud.size()));
  }
  const Vec3 c = cloud.centroid();
  std::size_t seed = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double d = (cloud.points[i] - c).squaredNorm();
    if (d < best) {
      best = d;
      seed = i;
    }
  }

  std::vector<std::size_t> picked{seed};
  picked.reserve(k);
  std::vector<double> min_d2(cloud.size(), std::numeric_limits<double>::infinity());
  std::size_t last = seed;
  min_d2[seed] = -1.0;
  while (picked.size() < k) {
    std::size_t next = 0;
    double far = -1.0;
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      if (min_d2[i] < 0.0) continue;  // already picked
      const double d = (cloud.points[i] - cloud.points[last]).squaredNorm();
      if (d < min_d2[i]) min_d2[i] = d;
      if (min_d2[i] > far) {
        far = min_d2[i];
        next = i;
      }
    }
    picked.push_back(next);
    min_d2[next] = -1.0;
    last = next;
  }
  return picked;
}

PointCloud voxel_downsample(const PointCloud& cloud, double voxel) {
  if (!(voxel > 0.0)) throw ArgumentError("voxel_downsample: voxel must be positive");
  struct KeyHash {
    std::size_t operator()(const std::array<long long, 3>& k) const noexcept {
      return static_cast<std::size_t>(k[0] * 73856093LL ^ k[1] * 19349663LL ^ k[2] * 83492791LL);
    }
  };
  std::unordered_set<std::array<long long, 3>, KeyHash> seen;
  PointCloud out;
  out.frame = cloud.frame;
  for (const auto& p : cloud.points) {
    std::array<long long, 3> key{static_cast<long long>(std::floor(p.x() / voxel)),
                                 static_cast<long long>(std::floor(p.y() / voxel)),
                                 static_cast<long long>(std::floor(p.z() / voxel))};
    if (seen.insert(key).second) out.points.push_back(p);
  }
  return out;
}

PointCloud select(const PointCloud& cloud, std::span<const std::size_t> indices) {
  PointCloud out;
  out.frame = cloud.frame;
  out.points.reserve(indices.size());
  for (auto i : indices) out.points.push_back(cloud.points.at(i));
  return out;
}

}  // namespace binpick::geometry
