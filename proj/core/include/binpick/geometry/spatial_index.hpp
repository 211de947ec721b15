#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "binpick/geometry/transform.hpp"

namespace binpick::geometry {

/// Uniform-grid index over a fixed point set. Nearest-neighbor queries are
/// exact: the returned squared distance equals the brute-force minimum.
class PointGrid {
 public:
  struct Hit {
    std::size_t index;
    double squared_distance;
  };

  PointGrid() = default;
  /// `cell` <= 0 picks a size from the bounding box and point count.
  explicit PointGrid(std::span<const Vec3> points, double cell = 0.0);

  bool empty() const noexcept { return points_.empty(); }
  std::size_t size() const noexcept { return points_.size(); }
  const std::vector<Vec3>& points() const noexcept { return points_; }

  std::optional<Hit> nearest(const Vec3& q) const;
  /// Nearest neighbor restricted to distance <= max_distance.
  std::optional<Hit> nearest_within(const Vec3& q, double max_distance) const;

  /// Calls fn(index) for every point inside the axis-aligned box [lo, hi].
  template <typename Fn>
  void for_each_in_box(const Vec3& lo, const Vec3& hi, Fn&& fn) const {
    if (points_.empty()) return;
    const auto a = clamp_cell(lo);
    const auto b = clamp_cell(hi);
    for (int z = a[2]; z <= b[2]; ++z) {
      for (int y = a[1]; y <= b[1]; ++y) {
        for (int x = a[0]; x <= b[0]; ++x) {
          const std::size_t c = linear(x, y, z);
          for (std::uint32_t k = starts_[c]; k < starts_[c + 1]; ++k) {
            const std::size_t i = order_[k];
            const Vec3& p = points_[i];
            if ((p.array() >= lo.array()).all() && (p.array() <= hi.array()).all()) fn(i);
          }
        }
      }
    }
  }

  /// Indices of all points within `radius` of `q`, ascending.
  std::vector<std::size_t> radius_search(const Vec3& q, double radius) const;
  bool any_within(const Vec3& q, double radius) const;

 private:
  std::array<int, 3> clamp_cell(const Vec3& p) const;
  std::size_t linear(int x, int y, int z) const {
    return (static_cast<std::size_t>(z) * dims_[1] + static_cast<std::size_t>(y)) * dims_[0] +
           static_cast<std::size_t>(x);
  }

  std::vector<Vec3> points_;
  Vec3 origin_ = Vec3::Zero();
  double cell_ = 1.0;
  std::array<int, 3> dims_{1, 1, 1};
  std::vector<std::uint32_t> starts_;
  std::vector<std::uint32_t> order_;
};

}  // namespace binpick::geometry
