#include "binpick/geometry/raycast.hpp"

#include <algorithm>
#include <cmath>

#include "binpick/errors.hpp"

namespace binpick::geometry {

namespace {
constexpr double kBaryEps = 1e-12;
constexpr std::uint32_t kLeafSize = 4;

Vec3 safe_inverse(const Vec3& d) {
  Vec3 inv;
  for (int a = 0; a < 3; ++a) {
    inv[a] = d[a] != 0.0 ? 1.0 / d[a] : std::copysign(std::numeric_limits<double>::infinity(), d[a]);
  }
  return inv;
}

Aabb transformed_box(const Aabb& box, const RigidTransform& t) {
  Aabb out;
  for (int i = 0; i < 8; ++i) {
    const Vec3 corner((i & 1) ? box.hi.x() : box.lo.x(), (i & 2) ? box.hi.y() : box.lo.y(),
                      (i & 4) ? box.hi.z() : box.lo.z());
    out.extend(t.apply(corner));
  }
  return out;
}
}  // namespace

std::optional<double> intersect_triangle(const Vec3& origin, const Vec3& dir, const Vec3& a,
                                         const Vec3& b, const Vec3& c, double t_min) {
  const Vec3 e1 = b - a;
  const Vec3 e2 = c - a;
  const Vec3 p = dir.cross(e2);
  const double det = e1.dot(p);
  if (std::abs(det) < 1e-18) return std::nullopt;
  const double inv = 1.0 / det;
  const Vec3 s = origin - a;
  const double u = s.dot(p) * inv;
  if (u < -kBaryEps || u > 1.0 + kBaryEps) return std::nullopt;
  const Vec3 q = s.cross(e1);
  const double v = dir.dot(q) * inv;
  if (v < -kBaryEps || u + v > 1.0 + kBaryEps) return std::nullopt;
  const double t = e2.dot(q) * inv;
  if (!(t > t_min)) return std::nullopt;
  return t;
}

std::optional<double> intersect_aabb(const Aabb& box, const Vec3& origin, const Vec3& inv_dir,
                                     double t_max) {
  double t0 = 0.0;
  double t1 = t_max;
  for (int a = 0; a < 3; ++a) {
    double ta = (box.lo[a] - origin[a]) * inv_dir[a];
    double tb = (box.hi[a] - origin[a]) * inv_dir[a];
    if (std::isnan(ta) || std::isnan(tb)) {
      // ray parallel to the slab and starting on its boundary plane
      if (origin[a] < box.lo[a] || origin[a] > box.hi[a]) return std::nullopt;
      continue;
    }
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return std::nullopt;
  }
  return t0;
}

MeshBvh::MeshBvh(TriangleMesh mesh) : mesh_(std::move(mesh)) {
  mesh_.validate();
  const auto n = static_cast<std::uint32_t>(mesh_.triangles.size());
  if (n == 0) return;
  std::vector<Aabb> boxes(n);
  std::vector<Vec3> centers(n);
  order_.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (auto v : mesh_.triangles[i]) boxes[i].extend(mesh_.vertices[v]);
    // pad flat boxes so slab tests stay well defined
    boxes[i].lo -= Vec3::Constant(1e-12);
    boxes[i].hi += Vec3::Constant(1e-12);
    centers[i] = boxes[i].center();
    order_[i] = i;
  }
  nodes_.reserve(2 * n);
  build(0, n, boxes, centers);
}

std::uint32_t MeshBvh::build(std::uint32_t begin, std::uint32_t end, std::vector<Aabb>& boxes,
                             std::vector<Vec3>& centers) {
  const auto index = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();
  Aabb box;
  Aabb cbox;
  for (std::uint32_t i = begin; i < end; ++i) {
    box.extend(boxes[order_[i]]);
    cbox.extend(centers[order_[i]]);
  }
  nodes_[index].box = box;
  if (end - begin <= kLeafSize) {
    nodes_[index].first = begin;
    nodes_[index].count = end - begin;
    return index;
  }
  int axis = 0;
  cbox.extent().maxCoeff(&axis);
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     if (centers[a][axis] != centers[b][axis]) return centers[a][axis] < centers[b][axis];
                     return a < b;
                   });
  const std::uint32_t left = build(begin, mid, boxes, centers);
  const std::uint32_t right = build(mid, end, boxes, centers);
  nodes_[index].first = left;
  nodes_[index].right = right;
  nodes_[index].count = 0;
  return index;
}

std::optional<std::pair<double, std::size_t>> MeshBvh::intersect(const Vec3& origin,
                                                                 const Vec3& dir,
                                                                 double t_max) const {
  if (nodes_.empty()) return std::nullopt;
  const Vec3 inv = safe_inverse(dir);
  double best = t_max;
  std::size_t best_tri = 0;
  bool found = false;
  std::uint32_t stack[64];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (!intersect_aabb(node.box, origin, inv, best)) continue;
    if (node.count > 0) {
      for (std::uint32_t k = node.first; k < node.first + node.count; ++k) {
        const std::uint32_t tri = order_[k];
        const auto& t = mesh_.triangles[tri];
        auto hit = intersect_triangle(origin, dir, mesh_.vertices[t[0]], mesh_.vertices[t[1]],
                                      mesh_.vertices[t[2]]);
        if (hit && (*hit < best || (*hit == best && found && tri < best_tri))) {
          best = *hit;
          best_tri = tri;
          found = true;
        }
      }
    } else {
      stack[top++] = node.right;
      stack[top++] = node.first;
    }
  }
  if (!found) return std::nullopt;
  return std::make_pair(best, best_tri);
}

RayCaster::RayCaster(std::vector<PlacedMesh> meshes) : meshes_(std::move(meshes)) {
  world_boxes_.reserve(meshes_.size());
  for (const auto& m : meshes_) {
    Aabb box = m.bvh->bounds();
    if (box.valid()) {
      box = transformed_box(box, m.pose);
      box.lo -= Vec3::Constant(1e-9);
      box.hi += Vec3::Constant(1e-9);
    }
    world_boxes_.push_back(box);
  }
}

std::optional<RayHit> RayCaster::cast(const Vec3& origin, const Vec3& dir, double t_max) const {
  const Vec3 inv = safe_inverse(dir);
  std::optional<RayHit> best;
  double best_t = t_max;
  for (std::size_t i = 0; i < meshes_.size(); ++i) {
    if (!world_boxes_[i].valid() || !intersect_aabb(world_boxes_[i], origin, inv, best_t)) continue;
    const RigidTransform& pose = meshes_[i].pose;
    const Vec3 lo = pose.rotation().transpose() * (origin - pose.translation());
    const Vec3 ld = pose.rotation().transpose() * dir;
    auto hit = meshes_[i].bvh->intersect(lo, ld, best_t);
    if (hit && hit->first < best_t) {
      best_t = hit->first;
      best = RayHit{origin + hit->first * dir, i, hit->second, hit->first};
    }
  }
  return best;
}

std::optional<RayHit> ray_cast(std::span<const std::pair<TriangleMesh, RigidTransform>> meshes,
                               const Vec3& origin, const Vec3& direction) {
  if (std::abs(direction.norm() - 1.0) > 1e-9) {
    throw ArgumentError("ray_cast: direction must be unit length");
  }
  std::optional<RayHit> best;
  for (std::size_t i = 0; i < meshes.size(); ++i) {
    const auto& [mesh, pose] = meshes[i];
    const Vec3 lo = pose.rotation().transpose() * (origin - pose.translation());
    const Vec3 ld = pose.rotation().transpose() * direction;
    for (std::size_t f = 0; f < mesh.triangles.size(); ++f) {
      const auto& t = mesh.triangles[f];
      auto hit = intersect_triangle(lo, ld, mesh.vertices[t[0]], mesh.vertices[t[1]],
                                    mesh.vertices[t[2]]);
      if (hit && (!best || *hit < best->distance)) {
        best = RayHit{origin + *hit * direction, i, f, *hit};
      }
    }
  }
  return best;
}

}  // namespace binpick::geometry
