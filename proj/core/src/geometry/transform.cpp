#include "binpick/geometry/transform.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "binpick/errors.hpp"

namespace binpick::geometry {

namespace {
constexpr double kDriftTol = 1e-9;
}

RigidTransform::RigidTransform(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
  if (!is_rotation(rotation, kDriftTol)) {
    throw ArgumentError("rotation matrix is not orthonormal with det +1");
  }
  if (!translation.allFinite()) {
    throw ArgumentError("translation is not finite");
  }
}

RigidTransform RigidTransform::from_matrix(const Mat4& m) {
  if (std::abs(m(3, 0)) > kDriftTol || std::abs(m(3, 1)) > kDriftTol ||
      std::abs(m(3, 2)) > kDriftTol || std::abs(m(3, 3) - 1.0) > kDriftTol) {
    throw ArgumentError("bottom row of a rigid transform must be [0 0 0 1]");
  }
  return RigidTransform(m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>());
}

RigidTransform RigidTransform::from_translation(const Vec3& t) {
  return RigidTransform(Mat3::Identity(), t);
}

RigidTransform RigidTransform::from_axis_angle(const Vec3& axis, double angle,
                                               const Vec3& translation) {
  const double n = axis.norm();
  if (!(n > 0.0)) {
    throw ArgumentError("rotation axis must be non-zero");
  }
  Mat3 r = Eigen::AngleAxisd(angle, axis / n).toRotationMatrix();
  return RigidTransform(r, translation, Unchecked{});
}

Mat4 RigidTransform::matrix() const {
  Mat4 m = Mat4::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

RigidTransform RigidTransform::inverse() const {
  Mat3 rt = rotation_.transpose();
  return RigidTransform(rt, -(rt * translation_), Unchecked{});
}

bool RigidTransform::is_valid(double tol) const {
  return is_rotation(rotation_, tol) && translation_.allFinite();
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  Mat3 r = a.rotation_ * b.rotation_;
  if ((r * r.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() > kDriftTol) {
    r = orthonormalize(r);
  }
  return RigidTransform(r, a.rotation_ * b.translation_ + a.translation_,
                        RigidTransform::Unchecked{});
}

Mat3 orthonormalize(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0 ? -1.0 : 1.0;
  return svd.matrixU() * d * svd.matrixV().transpose();
}

bool is_rotation(const Mat3& r, double tol) {
  if (!r.allFinite()) return false;
  if ((r * r.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(r.determinant() - 1.0) <= tol;
}

double rotation_angle_between(const RigidTransform& a, const RigidTransform& b) {
  const Mat3 rel = a.rotation().transpose() * b.rotation();
  const double c = std::clamp((rel.trace() - 1.0) / 2.0, -1.0, 1.0);
  // acos loses precision near 0; fall back to the skew part there.
  if (c > 0.99) {
    const Vec3 w(rel(2, 1) - rel(1, 2), rel(0, 2) - rel(2, 0), rel(1, 0) - rel(0, 1));
    return std::asin(std::min(1.0, w.norm() / 2.0));
  }
  return std::acos(c);
}

double translation_distance(const RigidTransform& a, const RigidTransform& b) {
  return (a.translation() - b.translation()).norm();
}

Mat3 rotation_between(const Vec3& from, const Vec3& to) {
  return Eigen::Quaterniond::FromTwoVectors(from, to).toRotationMatrix();
}

}  // namespace binpick::geometry
