#include "binpick/geometry/distance_field.hpp"

#include <algorithm>
#include <cmath>

#include "binpick/errors.hpp"
#include "binpick/geometry/raycast.hpp"

namespace binpick::geometry {

SignedDistanceField::SignedDistanceField(const TriangleMesh& mesh, double resolution,
                                         double padding)
    : h_(resolution) {
  if (!(resolution > 0.0)) throw ArgumentError("distance field resolution must be positive");
  if (mesh.triangles.empty()) throw EmptyInputError("distance field of an empty mesh");
  box_ = mesh.bounds();
  box_.lo -= Vec3::Constant(padding);
  box_.hi += Vec3::Constant(padding);
  for (int a = 0; a < 3; ++a) {
    dims_[a] = static_cast<int>(std::ceil((box_.hi[a] - box_.lo[a]) / h_)) + 1;
  }
  box_.hi = box_.lo + h_ * Vec3(dims_[0] - 1, dims_[1] - 1, dims_[2] - 1);
  values_.resize(static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2]);

  // Sign by ray parity along a slightly skewed axis; unsigned part is exact.
  const MeshBvh bvh(mesh);
  const Vec3 dir = Vec3(0.0123, 0.0317, 1.0).normalized();
  std::size_t k = 0;
  for (int z = 0; z < dims_[2]; ++z) {
    for (int y = 0; y < dims_[1]; ++y) {
      for (int x = 0; x < dims_[0]; ++x, ++k) {
        const Vec3 p = box_.lo + h_ * Vec3(x, y, z);
        const double d = surface_distance(mesh, p);
        int crossings = 0;
        Vec3 o = p;
        double travelled = 0.0;
        while (crossings < 64) {
          auto hit = bvh.intersect(o, dir, std::numeric_limits<double>::infinity());
          if (!hit) break;
          ++crossings;
          travelled = hit->first + 1e-9;
          o = o + travelled * dir;
        }
        values_[k] = static_cast<float>((crossings % 2 == 1) ? -d : d);
      }
    }
  }
}

double SignedDistanceField::operator()(const Vec3& p) const {
  if (values_.empty()) return std::numeric_limits<double>::infinity();
  const Vec3 q = p.cwiseMax(box_.lo).cwiseMin(box_.hi);
  const double outside = (p - q).norm();
  const Vec3 f = (q - box_.lo) / h_;
  std::array<int, 3> i0{};
  std::array<double, 3> t{};
  for (int a = 0; a < 3; ++a) {
    i0[a] = std::min(static_cast<int>(std::floor(f[a])), dims_[a] - 2);
    i0[a] = std::max(i0[a], 0);
    t[a] = f[a] - i0[a];
  }
  const double c00 = sample(i0[0], i0[1], i0[2]) * (1 - t[0]) + sample(i0[0] + 1, i0[1], i0[2]) * t[0];
  const double c10 = sample(i0[0], i0[1] + 1, i0[2]) * (1 - t[0]) +
                     sample(i0[0] + 1, i0[1] + 1, i0[2]) * t[0];
  const double c01 = sample(i0[0], i0[1], i0[2] + 1) * (1 - t[0]) +
                     sample(i0[0] + 1, i0[1], i0[2] + 1) * t[0];
  const double c11 = sample(i0[0], i0[1] + 1, i0[2] + 1) * (1 - t[0]) +
                     sample(i0[0] + 1, i0[1] + 1, i0[2] + 1) * t[0];
  const double c0 = c00 * (1 - t[1]) + c10 * t[1];
  const double c1 = c01 * (1 - t[1]) + c11 * t[1];
  return c0 * (1 - t[2]) + c1 * t[2] + outside;
}

Vec3 SignedDistanceField::gradient(const Vec3& p) const {
  const double e = 0.5 * h_;
  Vec3 g;
  for (int a = 0; a < 3; ++a) {
    Vec3 d = Vec3::Zero();
    d[a] = e;
    g[a] = (*this)(p + d) - (*this)(p - d);
  }
  const double n = g.norm();
  return n > 0.0 ? Vec3(g / n) : Vec3(Vec3::UnitZ());
}

}  // namespace binpick::geometry
