#include "binpick/geometry/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <unordered_map>

#include "binpick/errors.hpp"

namespace binpick::geometry {

void TriangleMesh::validate() const {
  for (const auto& v : vertices) {
    if (!v.allFinite()) throw ArgumentError("mesh vertex is not finite");
  }
  for (const auto& t : triangles) {
    for (auto i : t) {
      if (i >= vertices.size()) {
        throw ArgumentError("triangle index " + std::to_string(i) + " out of range (" +
                            std::to_string(vertices.size()) + " vertices)");
      }
    }
  }
}

std::size_t TriangleMesh::remove_degenerate(double min_area) {
  const auto before = triangles.size();
  std::erase_if(triangles, [&](const Triangle& t) {
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) return true;
    const Vec3 n = (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]);
    return 0.5 * n.norm() <= min_area;
  });
  return before - triangles.size();
}

Aabb TriangleMesh::bounds() const {
  Aabb box;
  for (const auto& v : vertices) box.extend(v);
  return box;
}

double TriangleMesh::area() const {
  double a = 0.0;
  for (const auto& t : triangles) {
    a += 0.5 * (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]).norm();
  }
  return a;
}

Vec3 TriangleMesh::centroid() const {
  Vec3 sum = Vec3::Zero();
  double total = 0.0;
  for (const auto& t : triangles) {
    const Vec3& a = vertices[t[0]];
    const Vec3& b = vertices[t[1]];
    const Vec3& c = vertices[t[2]];
    const double w = 0.5 * (b - a).cross(c - a).norm();
    sum += w * (a + b + c) / 3.0;
    total += w;
  }
  if (!(total > 0.0)) throw EmptyInputError("centroid of a mesh without area");
  return sum / total;
}

double TriangleMesh::bounding_radius() const {
  const Vec3 c = centroid();
  double r = 0.0;
  for (const auto& v : vertices) r = std::max(r, (v - c).norm());
  return r;
}

Vec3 TriangleMesh::normal(std::size_t tri) const {
  const auto& t = triangles[tri];
  return (vertices[t[1]] - vertices[t[0]]).cross(vertices[t[2]] - vertices[t[0]]).normalized();
}

TriangleMesh transformed(const TriangleMesh& mesh, const RigidTransform& t) {
  TriangleMesh out = mesh;
  for (auto& v : out.vertices) v = t.apply(v);
  return out;
}

void append(TriangleMesh& a, const TriangleMesh& b) {
  const auto offset = static_cast<std::uint32_t>(a.vertices.size());
  a.vertices.insert(a.vertices.end(), b.vertices.begin(), b.vertices.end());
  for (const auto& t : b.triangles) a.triangles.push_back({t[0] + offset, t[1] + offset, t[2] + offset});
}

TriangleMesh make_box(const Vec3& h) {
  TriangleMesh m;
  for (int i = 0; i < 8; ++i) {
    m.vertices.emplace_back((i & 1) ? h.x() : -h.x(), (i & 2) ? h.y() : -h.y(),
                            (i & 4) ? h.z() : -h.z());
  }
  // outward winding
  m.triangles = {{0, 2, 1}, {1, 2, 3}, {4, 5, 6}, {5, 7, 6}, {0, 1, 4}, {1, 5, 4},
                 {2, 6, 3}, {3, 6, 7}, {0, 4, 2}, {2, 4, 6}, {1, 3, 5}, {3, 7, 5}};
  return m;
}

TriangleMesh make_cylinder(double radius, double length, int segments) {
  if (segments < 3 || !(radius > 0.0) || !(length > 0.0)) {
    throw ArgumentError("make_cylinder: invalid dimensions");
  }
  TriangleMesh m;
  const double hz = 0.5 * length;
  const auto n = static_cast<std::uint32_t>(segments);
  for (std::uint32_t i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * i / n;
    m.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a), -hz);
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * i / n;
    m.vertices.emplace_back(radius * std::cos(a), radius * std::sin(a), hz);
  }
  const std::uint32_t bottom = 2 * n;
  const std::uint32_t top = 2 * n + 1;
  m.vertices.emplace_back(0.0, 0.0, -hz);
  m.vertices.emplace_back(0.0, 0.0, hz);
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint32_t j = (i + 1) % n;
    m.triangles.push_back({i, j, n + j});
    m.triangles.push_back({i, n + j, n + i});
    m.triangles.push_back({bottom, j, i});
    m.triangles.push_back({top, n + i, n + j});
  }
  return m;
}

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  // Ericson, Real-Time Collision Detection, 5.1.5
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;
  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);
  }
  const double denom = 1.0 / (va + vb + vc);
  return a + ab * (vb * denom) + ac * (vc * denom);
}

double winding_number(const TriangleMesh& mesh, const Vec3& p) {
  double total = 0.0;
  for (const auto& t : mesh.triangles) {
    const Vec3 a = mesh.vertices[t[0]] - p;
    const Vec3 b = mesh.vertices[t[1]] - p;
    const Vec3 c = mesh.vertices[t[2]] - p;
    const double la = a.norm(), lb = b.norm(), lc = c.norm();
    const double num = a.dot(b.cross(c));
    const double den = la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
    total += 2.0 * std::atan2(num, den);
  }
  return total / (4.0 * std::numbers::pi);
}

double surface_distance(const TriangleMesh& mesh, const Vec3& p) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& t : mesh.triangles) {
    const Vec3 q = closest_point_on_triangle(p, mesh.vertices[t[0]], mesh.vertices[t[1]],
                                             mesh.vertices[t[2]]);
    best = std::min(best, (q - p).squaredNorm());
  }
  return std::sqrt(best);
}

PointCloud sample_surface_uniform(const TriangleMesh& mesh, std::size_t count,
                                  std::uint64_t seed, std::vector<Vec3>* normals) {
  if (mesh.triangles.empty()) throw EmptyInputError("sample_surface_uniform: empty mesh");
  std::vector<double> cumulative;
  cumulative.reserve(mesh.triangles.size());
  double total = 0.0;
  for (const auto& t : mesh.triangles) {
    total += 0.5 * (mesh.vertices[t[1]] - mesh.vertices[t[0]])
                       .cross(mesh.vertices[t[2]] - mesh.vertices[t[0]])
                       .norm();
    cumulative.push_back(total);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PointCloud out;
  out.frame = "model";
  out.points.reserve(count);
  if (normals) normals->clear();
  for (std::size_t k = 0; k < count; ++k) {
    const double pick = unit(rng) * total;
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    const std::size_t tri =
        std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()),
                              mesh.triangles.size() - 1);
    double u = unit(rng);
    double v = unit(rng);
    if (u + v > 1.0) {
      u = 1.0 - u;
      v = 1.0 - v;
    }
    const auto& t = mesh.triangles[tri];
    const Vec3& a = mesh.vertices[t[0]];
    out.points.push_back(a + u * (mesh.vertices[t[1]] - a) + v * (mesh.vertices[t[2]] - a));
    if (normals) normals->push_back(mesh.normal(tri));
  }
  return out;
}

PointCloud sample_surface_poisson(const TriangleMesh& mesh, double radius, std::uint64_t seed,
                                  std::vector<Vec3>* normals) {
  if (!(radius > 0.0)) throw ArgumentError("sample_surface_poisson: radius must be positive");
  const double area = mesh.area();
  // Oversample so the greedy pass reaches near-maximal coverage.
  const auto candidates =
      static_cast<std::size_t>(std::ceil(10.0 * area / (radius * radius))) + 16;
  std::vector<Vec3> cand_normals;
  const PointCloud pool = sample_surface_uniform(mesh, candidates, seed, &cand_normals);

  struct KeyHash {
    std::size_t operator()(const std::array<long long, 3>& k) const noexcept {
      return static_cast<std::size_t>(k[0] * 73856093LL ^ k[1] * 19349663LL ^ k[2] * 83492791LL);
    }
  };
  std::unordered_map<std::array<long long, 3>, std::vector<std::size_t>, KeyHash> grid;
  auto key_of = [&](const Vec3& p) {
    return std::array<long long, 3>{static_cast<long long>(std::floor(p.x() / radius)),
                                    static_cast<long long>(std::floor(p.y() / radius)),
                                    static_cast<long long>(std::floor(p.z() / radius))};
  };
  PointCloud out;
  out.frame = "model";
  if (normals) normals->clear();
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const Vec3& p = pool.points[i];
    const auto k = key_of(p);
    bool blocked = false;
    for (long long dz = -1; dz <= 1 && !blocked; ++dz) {
      for (long long dy = -1; dy <= 1 && !blocked; ++dy) {
        for (long long dx = -1; dx <= 1 && !blocked; ++dx) {
          auto it = grid.find({k[0] + dx, k[1] + dy, k[2] + dz});
          if (it == grid.end()) continue;
          for (auto j : it->second) {
            if ((out.points[j] - p).squaredNorm() < r2) {
              blocked = true;
              break;
            }
          }
        }
      }
    }
    if (blocked) continue;
    grid[k].push_back(out.points.size());
    out.points.push_back(p);
    if (normals) normals->push_back(cand_normals[i]);
  }
  return out;
}

PointCloud sample_feature_edges(const TriangleMesh& mesh, double min_angle, double spacing) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::size_t>> edges;
  for (std::size_t f = 0; f < mesh.triangles.size(); ++f) {
    const auto& t = mesh.triangles[f];
    for (int e = 0; e < 3; ++e) {
      auto a = t[e];
      auto b = t[(e + 1) % 3];
      if (a > b) std::swap(a, b);
      edges[{a, b}].push_back(f);
    }
  }
  const double cos_limit = std::cos(min_angle);
  PointCloud out;
  out.frame = "model";
  for (const auto& [edge, faces] : edges) {
    bool sharp = faces.size() != 2;
    if (!sharp) sharp = mesh.normal(faces[0]).dot(mesh.normal(faces[1])) < cos_limit;
    if (!sharp) continue;
    const Vec3& a = mesh.vertices[edge.first];
    const Vec3& b = mesh.vertices[edge.second];
    const int n = std::max(1, static_cast<int>(std::ceil((b - a).norm() / spacing)));
    for (int i = 0; i < n; ++i) out.points.push_back(a + (b - a) * (static_cast<double>(i) / n));
  }
  return out;
}

}  // namespace binpick::geometry
