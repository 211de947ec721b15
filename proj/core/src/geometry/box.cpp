#include "binpick/geometry/box.hpp"

#include <algorithm>
#include <cmath>

namespace binpick::geometry {

bool OrientedBox::contains(const Vec3& p, double margin) const {
  const Vec3 local = pose.rotation().transpose() * (p - pose.translation());
  return (local.cwiseAbs().array() <= (half_extents.array() + margin)).all();
}

double OrientedBox::distance(const Vec3& p) const {
  const Vec3 local = pose.rotation().transpose() * (p - pose.translation());
  return (local.cwiseAbs() - half_extents).cwiseMax(0.0).norm();
}

double OrientedBox::signed_distance(const Vec3& p) const {
  const Vec3 local = pose.rotation().transpose() * (p - pose.translation());
  const Vec3 q = local.cwiseAbs() - half_extents;
  return q.cwiseMax(0.0).norm() + std::min(q.maxCoeff(), 0.0);
}

Vec3 OrientedBox::closest_surface_point(const Vec3& p) const {
  const Vec3 local = pose.rotation().transpose() * (p - pose.translation());
  Vec3 q = local.cwiseMax(-half_extents).cwiseMin(half_extents);
  if (q == local) {
    int axis = 0;
    (half_extents - local.cwiseAbs()).minCoeff(&axis);
    q[axis] = local[axis] < 0.0 ? -half_extents[axis] : half_extents[axis];
  }
  return pose.apply(q);
}

OrientedBox OrientedBox::dilated(double margin) const {
  return {pose, half_extents + Vec3::Constant(margin)};
}

OrientedBox OrientedBox::transformed(const RigidTransform& t) const {
  return {t * pose, half_extents};
}

Aabb OrientedBox::world_bounds() const {
  const Vec3 r = pose.rotation().cwiseAbs() * half_extents;
  return {pose.translation() - r, pose.translation() + r};
}

TriangleMesh OrientedBox::mesh() const { return geometry::transformed(make_box(half_extents), pose); }

std::vector<Vec3> OrientedBox::surface_samples(double spacing) const {
  std::array<int, 3> n{};
  for (int a = 0; a < 3; ++a) {
    n[a] = std::max(1, static_cast<int>(std::ceil(2.0 * half_extents[a] / spacing)));
  }
  std::vector<Vec3> out;
  for (int i = 0; i <= n[0]; ++i) {
    for (int j = 0; j <= n[1]; ++j) {
      for (int k = 0; k <= n[2]; ++k) {
        const bool on_surface = i == 0 || i == n[0] || j == 0 || j == n[1] || k == 0 || k == n[2];
        if (!on_surface) continue;
        const Vec3 local(-half_extents.x() + 2.0 * half_extents.x() * i / n[0],
                         -half_extents.y() + 2.0 * half_extents.y() * j / n[1],
                         -half_extents.z() + 2.0 * half_extents.z() * k / n[2]);
        out.push_back(pose.apply(local));
      }
    }
  }
  return out;
}

bool intersects(const OrientedBox& a, const OrientedBox& b) {
  // Ericson, Real-Time Collision Detection, 4.4.1
  const Mat3& ra = a.pose.rotation();
  const Mat3& rb = b.pose.rotation();
  const Mat3 r = ra.transpose() * rb;
  const Vec3 t = ra.transpose() * (b.pose.translation() - a.pose.translation());
  const Mat3 abs_r = r.cwiseAbs().array() + 1e-12;
  const Vec3& ea = a.half_extents;
  const Vec3& eb = b.half_extents;

  for (int i = 0; i < 3; ++i) {
    if (std::abs(t[i]) > ea[i] + eb.dot(abs_r.row(i))) return false;
  }
  for (int j = 0; j < 3; ++j) {
    if (std::abs(t.dot(r.col(j))) > ea.dot(abs_r.col(j)) + eb[j]) return false;
  }
  for (int i = 0; i < 3; ++i) {
    const int i1 = (i + 1) % 3;
    const int i2 = (i + 2) % 3;
    for (int j = 0; j < 3; ++j) {
      const int j1 = (j + 1) % 3;
      const int j2 = (j + 2) % 3;
      const double ra_ext = ea[i1] * abs_r(i2, j) + ea[i2] * abs_r(i1, j);
      const double rb_ext = eb[j1] * abs_r(i, j2) + eb[j2] * abs_r(i, j1);
      const double sep = std::abs(t[i2] * r(i1, j) - t[i1] * r(i2, j));
      if (sep > ra_ext + rb_ext) return false;
    }
  }
  return true;
}

}  // namespace binpick::geometry
