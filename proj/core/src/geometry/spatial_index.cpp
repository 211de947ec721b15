#include "binpick/geometry/spatial_index.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace binpick::geometry {

PointGrid::PointGrid(std::span<const Vec3> points, double cell)
    : points_(points.begin(), points.end()) {
  if (points_.empty()) return;
  Vec3 lo = points_.front();
  Vec3 hi = points_.front();
  for (const auto& p : points_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Vec3 ext = (hi - lo).cwiseMax(Vec3::Constant(1e-9));
  if (!(cell > 0.0)) {
    // Aim for roughly two points per cell on surface-like data.
    const double n = static_cast<double>(points_.size());
    const double area_like = ext.x() * ext.y() + ext.y() * ext.z() + ext.x() * ext.z();
    cell = std::max(std::sqrt(2.0 * area_like / n), 1e-6);
  }
  // Cap the cell count so sparse, widely spread clouds do not explode memory.
  constexpr double kMaxCells = 4.0e6;
  while ((std::floor(ext.x() / cell) + 1) * (std::floor(ext.y() / cell) + 1) *
             (std::floor(ext.z() / cell) + 1) >
         kMaxCells) {
    cell *= 1.5;
  }
  cell_ = cell;
  origin_ = lo;
  for (int a = 0; a < 3; ++a) dims_[a] = static_cast<int>(std::floor(ext[a] / cell_)) + 1;

  const std::size_t ncell = static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
  std::vector<std::uint32_t> cell_of(points_.size());
  starts_.assign(ncell + 1, 0);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto c = clamp_cell(points_[i]);
    cell_of[i] = static_cast<std::uint32_t>(linear(c[0], c[1], c[2]));
    ++starts_[cell_of[i] + 1];
  }
  for (std::size_t c = 0; c < ncell; ++c) starts_[c + 1] += starts_[c];
  order_.resize(points_.size());
  std::vector<std::uint32_t> fill(starts_.begin(), starts_.end() - 1);
  for (std::size_t i = 0; i < points_.size(); ++i) {
    order_[fill[cell_of[i]]++] = static_cast<std::uint32_t>(i);
  }
}

std::array<int, 3> PointGrid::clamp_cell(const Vec3& p) const {
  std::array<int, 3> c{};
  for (int a = 0; a < 3; ++a) {
    const double f = std::floor((p[a] - origin_[a]) / cell_);
    c[a] = static_cast<int>(std::clamp(f, 0.0, static_cast<double>(dims_[a] - 1)));
  }
  return c;
}

std::optional<PointGrid::Hit> PointGrid::nearest(const Vec3& q) const {
  return nearest_within(q, std::numeric_limits<double>::infinity());
}

std::optional<PointGrid::Hit> PointGrid::nearest_within(const Vec3& q,
                                                         double max_distance) const {
  if (points_.empty()) return std::nullopt;
  const auto c = clamp_cell(q);
  const double max_d2 = max_distance * max_distance;
  std::size_t best_i = 0;
  double best = std::numeric_limits<double>::infinity();

  const int max_ring = std::max({dims_[0], dims_[1], dims_[2]});
  for (int r = 0; r <= max_ring; ++r) {
    const int x0 = c[0] - r, x1 = c[0] + r;
    const int y0 = c[1] - r, y1 = c[1] + r;
    const int z0 = c[2] - r, z1 = c[2] + r;
    auto scan_cell = [&](int x, int y, int z) {
      const std::size_t cell = linear(x, y, z);
      for (std::uint32_t k = starts_[cell]; k < starts_[cell + 1]; ++k) {
        const std::size_t i = order_[k];
        const double d = (points_[i] - q).squaredNorm();
        if (d < best || (d == best && i < best_i)) {
          best = d;
          best_i = i;
        }
      }
    };
    for (int z = std::max(z0, 0); z <= std::min(z1, dims_[2] - 1); ++z) {
      for (int y = std::max(y0, 0); y <= std::min(y1, dims_[1] - 1); ++y) {
        if (z == z0 || z == z1 || y == y0 || y == y1) {
          for (int x = std::max(x0, 0); x <= std::min(x1, dims_[0] - 1); ++x) scan_cell(x, y, z);
        } else {
          // interior of the shell was visited by earlier rings
          if (x0 >= 0) scan_cell(x0, y, z);
          if (x1 != x0 && x1 < dims_[0]) scan_cell(x1, y, z);
        }
      }
    }
    // Distance from q to the region not yet visited.
    double bound = std::numeric_limits<double>::infinity();
    const int lo[3] = {x0, y0, z0};
    const int hi[3] = {x1, y1, z1};
    for (int a = 0; a < 3; ++a) {
      if (lo[a] > 0) bound = std::min(bound, q[a] - (origin_[a] + lo[a] * cell_));
      if (hi[a] < dims_[a] - 1) bound = std::min(bound, origin_[a] + (hi[a] + 1) * cell_ - q[a]);
    }
    if (bound == std::numeric_limits<double>::infinity()) break;  // whole grid visited
    bound = std::max(bound, 0.0);
    if (best <= bound * bound) break;
    if (bound * bound > max_d2) break;
  }
  if (best > max_d2 || best == std::numeric_limits<double>::infinity()) return std::nullopt;
  return Hit{best_i, best};
}

std::vector<std::size_t> PointGrid::radius_search(const Vec3& q, double radius) const {
  std::vector<std::size_t> out;
  const double r2 = radius * radius;
  for_each_in_box(q - Vec3::Constant(radius), q + Vec3::Constant(radius), [&](std::size_t i) {
    if ((points_[i] - q).squaredNorm() <= r2) out.push_back(i);
  });
  std::sort(out.begin(), out.end());
  return out;
}

bool PointGrid::any_within(const Vec3& q, double radius) const {
  auto hit = nearest_within(q, radius);
  return hit.has_value();
}

}  // namespace binpick::geometry
