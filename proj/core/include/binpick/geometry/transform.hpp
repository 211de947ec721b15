#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace binpick::geometry {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Proper rigid motion x -> R x + t. Rotation is kept orthonormal with det +1.
class RigidTransform {
 public:
  RigidTransform() : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}

  /// Throws ArgumentError if `rotation` is not a proper rotation within 1e-9.
  RigidTransform(const Mat3& rotation, const Vec3& translation);

  static RigidTransform identity() { return {}; }
  static RigidTransform from_matrix(const Mat4& m);
  static RigidTransform from_translation(const Vec3& t);
  /// Rotation by `angle` radians about `axis` (need not be unit length).
  static RigidTransform from_axis_angle(const Vec3& axis, double angle,
                                        const Vec3& translation = Vec3::Zero());
  static RigidTransform rot_x(double angle) { return from_axis_angle(Vec3::UnitX(), angle); }
  static RigidTransform rot_y(double angle) { return from_axis_angle(Vec3::UnitY(), angle); }
  static RigidTransform rot_z(double angle) { return from_axis_angle(Vec3::UnitZ(), angle); }

  const Mat3& rotation() const noexcept { return rotation_; }
  const Vec3& translation() const noexcept { return translation_; }
  Mat4 matrix() const;

  RigidTransform inverse() const;
  Vec3 apply(const Vec3& p) const { return rotation_ * p + translation_; }
  Vec3 apply_direction(const Vec3& d) const { return rotation_ * d; }

  bool is_valid(double tol = 1e-9) const;

 private:
  struct Unchecked {};
  RigidTransform(const Mat3& r, const Vec3& t, Unchecked) : rotation_(r), translation_(t) {}
  friend RigidTransform compose(const RigidTransform& a, const RigidTransform& b);

  Mat3 rotation_;
  Vec3 translation_;
};

/// a * b: applies b first, then a.
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);

inline RigidTransform operator*(const RigidTransform& a, const RigidTransform& b) {
  return compose(a, b);
}

/// Closest proper rotation (polar decomposition via SVD).
Mat3 orthonormalize(const Mat3& m);

bool is_rotation(const Mat3& r, double tol = 1e-9);

/// Geodesic angle between the rotations of `a` and `b`, radians in [0, pi].
double rotation_angle_between(const RigidTransform& a, const RigidTransform& b);

double translation_distance(const RigidTransform& a, const RigidTransform& b);

/// Rotation taking unit vector `from` onto unit vector `to` (shortest arc).
Mat3 rotation_between(const Vec3& from, const Vec3& to);

}  // namespace binpick::geometry
