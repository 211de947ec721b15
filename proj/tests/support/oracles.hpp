#pragma once

// Brute-force reference implementations used only by tests. They avoid the
// library's acceleration structures on purpose.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "binpick/geometry/mesh.hpp"
#include "binpick/geometry/transform.hpp"

namespace binpick::testing {

using geometry::Mat3;
using geometry::RigidTransform;
using geometry::Vec3;

inline RigidTransform random_transform(std::mt19937_64& rng, double max_translation,
                                       double max_angle) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vec3 axis(u(rng), u(rng), u(rng));
  while (axis.norm() < 1e-3) axis = Vec3(u(rng), u(rng), u(rng));
  const double angle = max_angle * std::abs(u(rng));
  Vec3 t(u(rng), u(rng), u(rng));
  if (t.norm() > 1.0) t /= t.norm();
  return RigidTransform::from_axis_angle(axis, angle, max_translation * t);
}

inline std::vector<Vec3> random_points(std::mt19937_64& rng, std::size_t n, double half) {
  std::uniform_real_distribution<double> u(-half, half);
  std::vector<Vec3> pts;
  for (std::size_t i = 0; i < n; ++i) pts.emplace_back(u(rng), u(rng), u(rng));
  return pts;
}

/// O(N^2) ADD-S.
inline double brute_add_s(const std::vector<Vec3>& model, const RigidTransform& est,
                          const RigidTransform& gt) {
  std::vector<Vec3> g;
  for (const auto& p : model) g.push_back(gt.apply(p));
  double sum = 0.0;
  for (const auto& p : model) {
    const Vec3 e = est.apply(p);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : g) best = std::min(best, (e - q).squaredNorm());
    sum += std::sqrt(best);
  }
  return sum / static_cast<double>(model.size());
}

/// Ray/triangle via plane intersection and same-side edge tests.
inline std::optional<double> oracle_ray_triangle(const Vec3& o, const Vec3& d, const Vec3& a,
                                                 const Vec3& b, const Vec3& c) {
  const Vec3 n = (b - a).cross(c - a);
  const double denom = n.dot(d);
  if (std::abs(denom) < 1e-15) return std::nullopt;
  const double t = n.dot(a - o) / denom;
  if (!(t > 1e-12)) return std::nullopt;
  const Vec3 p = o + t * d;
  const double tol = -1e-12 * n.squaredNorm();
  if ((b - a).cross(p - a).dot(n) < tol) return std::nullopt;
  if ((c - b).cross(p - b).dot(n) < tol) return std::nullopt;
  if ((a - c).cross(p - c).dot(n) < tol) return std::nullopt;
  return t;
}

struct OracleHit {
  double distance;
  std::size_t mesh;
};

inline std::optional<OracleHit> oracle_ray_scene(
    const std::vector<std::pair<geometry::TriangleMesh, RigidTransform>>& scene, const Vec3& o,
    const Vec3& d) {
  std::optional<OracleHit> best;
  for (std::size_t m = 0; m < scene.size(); ++m) {
    const auto& [mesh, pose] = scene[m];
    for (const auto& t : mesh.triangles) {
      auto hit = oracle_ray_triangle(o, d, pose.apply(mesh.vertices[t[0]]),
                                     pose.apply(mesh.vertices[t[1]]),
                                     pose.apply(mesh.vertices[t[2]]));
      if (hit && (!best || *hit < best->distance)) best = OracleHit{*hit, m};
    }
  }
  return best;
}

/// Exhaustive greedy farthest-point selection, evaluating every candidate's
/// distance to every selected point from scratch.
inline std::vector<std::size_t> oracle_fps(const std::vector<Vec3>& pts, std::size_t k) {
  Vec3 c = Vec3::Zero();
  for (const auto& p : pts) c += p;
  c /= static_cast<double>(pts.size());
  std::size_t seed = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if ((pts[i] - c).norm() < (pts[seed] - c).norm()) seed = i;
  }
  std::vector<std::size_t> sel{seed};
  while (sel.size() < k) {
    std::size_t best = pts.size();
    double best_d = -1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (std::find(sel.begin(), sel.end(), i) != sel.end()) continue;
      double dmin = std::numeric_limits<double>::infinity();
      for (auto s : sel) dmin = std::min(dmin, (pts[i] - pts[s]).norm());
      if (dmin > best_d) {
        best_d = dmin;
        best = i;
      }
    }
    sel.push_back(best);
  }
  return sel;
}

/// Exact signed distance to a closed mesh: brute-force closest point, sign by
/// winding number.
inline double oracle_signed_distance(const geometry::TriangleMesh& mesh, const Vec3& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& t : mesh.triangles) {
    const Vec3 q = geometry::closest_point_on_triangle(p, mesh.vertices[t[0]], mesh.vertices[t[1]],
                                                       mesh.vertices[t[2]]);
    best = std::min(best, (q - p).norm());
  }
  return geometry::winding_number(mesh, p) > 0.5 ? -best : best;
}

inline double chebyshev_wrapped(const std::array<double, 6>& a, const std::array<double, 6>& b) {
  double m = 0.0;
  for (int i = 0; i < 6; ++i) {
    double d = std::fmod(std::abs(a[i] - b[i]), 2.0 * M_PI);
    d = std::min(d, 2.0 * M_PI - d);
    m = std::max(m, d);
  }
  return m;
}


/// Deepest point of posed mesh `a` (probed at `probes`, object frame) inside
/// posed mesh `b`, by winding number and brute-force surface distance.
/// Returns 0 when no probe is inside.
inline double oracle_penetration(const geometry::TriangleMesh& mesh, const std::vector<Vec3>& probes,
                                 const RigidTransform& a, const RigidTransform& b) {
  const RigidTransform a_in_b = b.inverse() * a;
  double deepest = 0.0;
  for (const auto& s : probes) {
    const Vec3 q = a_in_b.apply(s);
    const double d = oracle_signed_distance(mesh, q);
    deepest = std::max(deepest, -d);
  }
  return deepest;
}

/// Smallest distance from posed probes of `a` to the surface of posed `b`.
inline double oracle_separation(const geometry::TriangleMesh& mesh, const std::vector<Vec3>& probes,
                                const RigidTransform& a, const RigidTransform& b) {
  const RigidTransform a_in_b = b.inverse() * a;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& s : probes) best = std::min(best, oracle_signed_distance(mesh, a_in_b.apply(s)));
  return best;
}

}  // namespace binpick::testing
