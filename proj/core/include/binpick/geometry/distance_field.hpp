#pragma once

#include <array>
#include <vector>

#include "binpick/geometry/mesh.hpp"

namespace binpick::geometry {

/// Sampled signed distance to a closed mesh (negative inside), trilinearly
/// interpolated. Outside the sampled box the value is the distance to the box
/// plus the clamped sample, which never underestimates the true distance by
/// more than one cell.
class SignedDistanceField {
 public:
  SignedDistanceField() = default;
  SignedDistanceField(const TriangleMesh& mesh, double resolution, double padding);

  double operator()(const Vec3& p) const;
  /// Finite-difference gradient (unit length where defined).
  Vec3 gradient(const Vec3& p) const;
  double resolution() const noexcept { return h_; }
  const Aabb& bounds() const noexcept { return box_; }

 private:
  double sample(int x, int y, int z) const {
    return values_[(static_cast<std::size_t>(z) * dims_[1] + y) * dims_[0] + x];
  }

  Aabb box_;
  double h_ = 1.0;
  std::array<int, 3> dims_{0, 0, 0};
  std::vector<float> values_;
};

}  // namespace binpick::geometry
