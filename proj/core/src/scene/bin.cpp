#include "binpick/scene/bin.hpp"

#include <cmath>

#include "binpick/errors.hpp"

namespace binpick::scene {

void BinModel::validate() const {
  if (!(cavity.array() > 0.0).all() || !cavity.allFinite()) {
    throw ArgumentError("bin cavity extents must be positive");
  }
  if (!(wall > 0.0)) throw ArgumentError("bin wall thickness must be positive");
  if (!pose.is_valid()) throw ArgumentError("bin pose is not a rigid transform");
}

std::vector<OrientedBox> BinModel::boxes() const {
  const Vec3 h = 0.5 * cavity;
  const double w = wall;
  auto box = [](const Vec3& c, const Vec3& half) {
    return OrientedBox{RigidTransform::from_translation(c), half};
  };
  return {
      box(Vec3(0, 0, -0.5 * w), Vec3(h.x() + w, h.y() + w, 0.5 * w)),
      box(Vec3(h.x() + 0.5 * w, 0, h.z()), Vec3(0.5 * w, h.y() + w, h.z())),
      box(Vec3(-h.x() - 0.5 * w, 0, h.z()), Vec3(0.5 * w, h.y() + w, h.z())),
      box(Vec3(0, h.y() + 0.5 * w, h.z()), Vec3(h.x(), 0.5 * w, h.z())),
      box(Vec3(0, -h.y() - 0.5 * w, h.z()), Vec3(h.x(), 0.5 * w, h.z())),
  };
}

std::vector<OrientedBox> BinModel::world_boxes() const {
  auto out = boxes();
  for (auto& b : out) b = b.transformed(pose);
  return out;
}

TriangleMesh BinModel::mesh() const {
  TriangleMesh m;
  for (const auto& b : boxes()) geometry::append(m, b.mesh());
  return m;
}

std::vector<Vec3> BinModel::inner_surface_samples(double spacing) const {
  if (!(spacing > 0.0)) throw ArgumentError("sample spacing must be positive");
  const Vec3 h = 0.5 * cavity;
  std::vector<Vec3> out;
  auto steps = [&](double len) { return std::max(1, static_cast<int>(std::ceil(len / spacing))); };
  // Rectangle spanned by corner + s*u + t*v.
  auto patch = [&](const Vec3& corner, const Vec3& u, const Vec3& v) {
    const int nu = steps(u.norm()), nv = steps(v.norm());
    for (int i = 0; i <= nu; ++i) {
      for (int j = 0; j <= nv; ++j) out.push_back(corner + (double(i) / nu) * u + (double(j) / nv) * v);
    }
  };
  patch(Vec3(-h.x(), -h.y(), 0), Vec3(cavity.x(), 0, 0), Vec3(0, cavity.y(), 0));
  for (double sx : {-1.0, 1.0}) {
    patch(Vec3(sx * h.x(), -h.y(), 0), Vec3(0, cavity.y(), 0), Vec3(0, 0, cavity.z()));
  }
  for (double sy : {-1.0, 1.0}) {
    patch(Vec3(-h.x(), sy * h.y(), 0), Vec3(cavity.x(), 0, 0), Vec3(0, 0, cavity.z()));
  }
  for (double sx : {-1.0, 1.0}) {
    patch(Vec3(sx * h.x() + (sx > 0 ? 0.0 : -wall), -h.y() - wall, cavity.z()), Vec3(wall, 0, 0),
          Vec3(0, cavity.y() + 2 * wall, 0));
  }
  for (double sy : {-1.0, 1.0}) {
    patch(Vec3(-h.x(), sy * h.y() + (sy > 0 ? 0.0 : -wall), cavity.z()), Vec3(cavity.x(), 0, 0),
          Vec3(0, wall, 0));
  }
  return out;
}

bool BinModel::in_cavity(const Vec3& p, double margin) const {
  const Vec3 h = 0.5 * cavity;
  return std::abs(p.x()) <= h.x() - margin && std::abs(p.y()) <= h.y() - margin &&
         p.z() >= margin && p.z() <= cavity.z() - margin;
}

}  // namespace binpick::scene
