#include "binpick/geometry/metrics.hpp"

#include <cmath>

#include "binpick/errors.hpp"

namespace binpick::geometry {

double add_s_distance(const PointCloud& model, const RigidTransform& t_est,
                      const RigidTransform& t_gt) {
  if (model.empty()) throw EmptyInputError("add_s_distance: empty model");
  std::vector<Vec3> gt_points;
  gt_points.reserve(model.size());
  for (const auto& p : model.points) gt_points.push_back(t_gt.apply(p));
  const PointGrid index(gt_points);
  double sum = 0.0;
  for (const auto& p : model.points) {
    sum += std::sqrt(index.nearest(t_est.apply(p))->squared_distance);
  }
  return sum / static_cast<double>(model.size());
}

double add_s_distance(const PointCloud& model, const PointGrid& model_index,
                      const RigidTransform& t_est, const RigidTransform& t_gt) {
  if (model.empty()) throw EmptyInputError("add_s_distance: empty model");
  const RigidTransform rel = t_gt.inverse() * t_est;
  double sum = 0.0;
  for (const auto& p : model.points) {
    sum += std::sqrt(model_index.nearest(rel.apply(p))->squared_distance);
  }
  return sum / static_cast<double>(model.size());
}

double add_distance(const PointCloud& model, const RigidTransform& t_est,
                    const RigidTransform& t_gt) {
  if (model.empty()) throw EmptyInputError("add_distance: empty model");
  double sum = 0.0;
  for (const auto& p : model.points) sum += (t_est.apply(p) - t_gt.apply(p)).norm();
  return sum / static_cast<double>(model.size());
}

}  // namespace binpick::geometry
