#include "binpick/geometry/registration.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/SVD>

#include "binpick/errors.hpp"

namespace binpick::geometry {

void IcpParams::validate() const {
  if (max_iterations == 0 || !(convergence_tol > 0.0) || !(max_correspondence_dist > 0.0)) {
    throw ArgumentError("IcpParams: all fields must be strictly positive");
  }
}

RigidTransform fit_rigid(std::span<const Vec3> from, std::span<const Vec3> to) {
  if (from.size() != to.size()) throw ArgumentError("fit_rigid: size mismatch");
  if (from.size() < 3) {
    throw DegenerateGeometryError("fewer than 3 correspondences (" + std::to_string(from.size()) +
                                  ")");
  }
  const double n = static_cast<double>(from.size());
  Vec3 cf = Vec3::Zero();
  Vec3 ct = Vec3::Zero();
  for (std::size_t i = 0; i < from.size(); ++i) {
    cf += from[i];
    ct += to[i];
  }
  cf /= n;
  ct /= n;
  Mat3 h = Mat3::Zero();
  Mat3 spread = Mat3::Zero();
  for (std::size_t i = 0; i < from.size(); ++i) {
    const Vec3 a = from[i] - cf;
    h += a * (to[i] - ct).transpose();
    spread += a * a.transpose();
  }
  // Collinear (or coincident) source points leave a rotation about the line free.
  Eigen::JacobiSVD<Mat3> spread_svd(spread);
  const Vec3 sv = spread_svd.singularValues();
  if (!(sv(1) > 1e-12 * std::max(sv(0), 1e-300)) || sv(0) <= 0.0) {
    throw DegenerateGeometryError("correspondences are collinear");
  }
  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() < 0 ? -1.0 : 1.0;
  const Mat3 r = orthonormalize(svd.matrixV() * d * svd.matrixU().transpose());
  return RigidTransform(r, ct - r * cf);
}

IcpResult icp(const PointCloud& source, const PointCloud& target, const RigidTransform& init,
              const IcpParams& params) {
  if (target.empty()) throw EmptyInputError("icp: empty target cloud");
  return icp(source, PointGrid(target.points), init, params);
}

IcpResult icp(const PointCloud& source, const PointGrid& target, const RigidTransform& init,
              const IcpParams& params) {
  params.validate();
  if (source.empty()) throw EmptyInputError("icp: empty source cloud");
  if (target.empty()) throw EmptyInputError("icp: empty target cloud");

  IcpResult result;
  result.transform = init;
  std::vector<Vec3> from;
  std::vector<Vec3> to;
  from.reserve(source.size());
  to.reserve(source.size());
  double previous = std::numeric_limits<double>::infinity();

  for (std::size_t it = 0; it < params.max_iterations; ++it) {
    from.clear();
    to.clear();
    double sum = 0.0;
    for (const auto& p : source.points) {
      const Vec3 moved = result.transform.apply(p);
      auto hit = target.nearest_within(moved, params.max_correspondence_dist);
      if (!hit) continue;
      from.push_back(moved);
      to.push_back(target.points()[hit->index]);
      sum += std::sqrt(hit->squared_distance);
    }
    result.iterations = it + 1;
    result.correspondences = from.size();
    if (from.size() < 3) {
      throw DegenerateGeometryError("icp: " + std::to_string(from.size()) +
                                    " correspondences within " +
                                    std::to_string(params.max_correspondence_dist) + " m");
    }
    result.residual = sum / static_cast<double>(from.size());
    if (std::abs(previous - result.residual) < params.convergence_tol) {
      result.converged = true;
      break;
    }
    previous = result.residual;
    if (it + 1 == params.max_iterations) break;  // keep transform consistent with residual
    result.transform = fit_rigid(from, to) * result.transform;
  }
  return result;
}

IcpResult icp_point_to_plane(const PointCloud& source, const PointGrid& target,
                             std::span<const Vec3> target_normals, const RigidTransform& init,
                             const IcpParams& params) {
  params.validate();
  if (source.empty()) throw EmptyInputError("icp: empty source cloud");
  if (target.empty()) throw EmptyInputError("icp: empty target cloud");
  if (target_normals.size() != target.size()) throw ArgumentError("icp: one normal per target point");

  IcpResult result;
  result.transform = init;
  double previous = std::numeric_limits<double>::infinity();
  using Vec6 = Eigen::Matrix<double, 6, 1>;
  using Mat6 = Eigen::Matrix<double, 6, 6>;

  for (std::size_t it = 0; it < params.max_iterations; ++it) {
    Mat6 ata = Mat6::Zero();
    Vec6 atb = Vec6::Zero();
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& p : source.points) {
      const Vec3 moved = result.transform.apply(p);
      auto hit = target.nearest_within(moved, params.max_correspondence_dist);
      if (!hit) continue;
      const Vec3& n = target_normals[hit->index];
      const double r = (target.points()[hit->index] - moved).dot(n);
      Vec6 row;
      row << moved.cross(n), n;
      ata += row * row.transpose();
      atb += row * r;
      sum += std::abs(r);
      ++count;
    }
    result.iterations = it + 1;
    result.correspondences = count;
    if (count < 6) {
      throw DegenerateGeometryError("icp: " + std::to_string(count) + " correspondences within " +
                                    std::to_string(params.max_correspondence_dist) + " m");
    }
    result.residual = sum / static_cast<double>(count);
    if (std::abs(previous - result.residual) < params.convergence_tol) {
      result.converged = true;
      break;
    }
    previous = result.residual;
    if (it + 1 == params.max_iterations) break;
    ata.diagonal().array() += 1e-9 * ata.trace() + 1e-12;
    const Vec6 x = ata.ldlt().solve(atb);
    const Vec3 w = x.head<3>();
    const double angle = w.norm();
    const RigidTransform step = angle > 0.0 ? RigidTransform::from_axis_angle(w / angle, angle, x.tail<3>())
                                            : RigidTransform::from_translation(x.tail<3>());
    result.transform = step * result.transform;
  }
  return result;
}

}  // namespace binpick::geometry
