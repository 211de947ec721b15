#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "binpick/geometry/mesh.hpp"
#include "binpick/geometry/transform.hpp"

namespace binpick::geometry {

struct RayHit {
  Vec3 point;
  std::size_t mesh_index = 0;
  std::size_t triangle = 0;
  double distance = 0.0;
};

/// Moller-Trumbore. Returns the ray parameter of a hit with t > t_min.
std::optional<double> intersect_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a,
                                         const Vec3& b, const Vec3& c, double t_min = 1e-12);

/// Bounding-volume hierarchy over one mesh in its own frame.
class MeshBvh {
 public:
  MeshBvh() = default;
  explicit MeshBvh(TriangleMesh mesh);

  const TriangleMesh& mesh() const noexcept { return mesh_; }
  const Aabb& bounds() const noexcept { return nodes_.empty() ? empty_ : nodes_.front().box; }

  /// Nearest hit with t in (t_min, t_max). Distances are along `dir` (unit).
  std::optional<std::pair<double, std::size_t>> intersect(const Vec3& origin, const Vec3& dir,
                                                          double t_max) const;

 private:
  struct Node {
    Aabb box;
    std::uint32_t first = 0;  // leaf: first triangle in order_; inner: left child index
    std::uint32_t count = 0;  // leaf triangle count; 0 for inner nodes
    std::uint32_t right = 0;
  };
  std::uint32_t build(std::uint32_t begin, std::uint32_t end, std::vector<Aabb>& tri_boxes,
                      std::vector<Vec3>& centers);

  TriangleMesh mesh_;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> order_;
  Aabb empty_;
};

/// A posed mesh referencing a shared BVH.
struct PlacedMesh {
  std::shared_ptr<const MeshBvh> bvh;
  RigidTransform pose;
};

/// Casts rays against a fixed set of posed meshes.
class RayCaster {
 public:
  RayCaster() = default;
  explicit RayCaster(std::vector<PlacedMesh> meshes);

  std::size_t size() const noexcept { return meshes_.size(); }
  std::optional<RayHit> cast(const Vec3& origin, const Vec3& dir,
                             double t_max = std::numeric_limits<double>::infinity()) const;

 private:
  std::vector<PlacedMesh> meshes_;
  std::vector<Aabb> world_boxes_;
};

/// Nearest positive-distance hit across all meshes. `direction` must be unit
/// length within 1e-9 (ArgumentError otherwise).
std::optional<RayHit> ray_cast(std::span<const std::pair<TriangleMesh, RigidTransform>> meshes,
                               const Vec3& origin, const Vec3& direction);

/// Slab test; returns entry parameter when the ray meets the box before t_max.
std::optional<double> intersect_aabb(const Aabb& box, const Vec3& origin, const Vec3& inv_dir,
                                     double t_max);

}  // namespace binpick::geometry
