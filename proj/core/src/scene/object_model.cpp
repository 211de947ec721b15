#include "binpick/scene/object_model.hpp"

#include <algorithm>

#include "binpick/errors.hpp"

namespace binpick::scene {

std::shared_ptr<const ObjectModel> make_object_model(TriangleMesh mesh,
                                                     const ObjectModelParams& params) {
  mesh.validate();
  mesh.remove_degenerate();
  if (mesh.triangles.empty()) throw EmptyInputError("object mesh has no triangles");
  auto model = std::make_shared<ObjectModel>();
  model->centroid = mesh.centroid();
  model->radius = mesh.bounding_radius();
  model->sdf = geometry::SignedDistanceField(mesh, params.sdf_resolution, params.sdf_padding);
  model->samples = mesh.vertices;
  const auto edges = geometry::sample_feature_edges(mesh, params.feature_angle, params.edge_spacing);
  model->samples.insert(model->samples.end(), edges.points.begin(), edges.points.end());
  const auto faces = geometry::sample_surface_poisson(mesh, params.face_spacing, params.seed);
  model->samples.insert(model->samples.end(), faces.points.begin(), faces.points.end());
  model->bvh = std::make_shared<const geometry::MeshBvh>(mesh);
  model->mesh = std::move(mesh);
  return model;
}

double pair_clearance(const ObjectModel& model, const RigidTransform& a, const RigidTransform& b,
                      double cap) {
  const double gap = (a.apply(model.centroid) - b.apply(model.centroid)).norm() - 2.0 * model.radius;
  if (gap >= cap) return cap;
  double best = cap;
  const RigidTransform a_in_b = b.inverse() * a;
  const RigidTransform b_in_a = a_in_b.inverse();
  for (const auto& s : model.samples) best = std::min(best, model.sdf(a_in_b.apply(s)));
  for (const auto& s : model.samples) best = std::min(best, model.sdf(b_in_a.apply(s)));
  return best;
}

double bin_clearance(const ObjectModel& model, const RigidTransform& pose,
                     std::span<const OrientedBox> bin_boxes, double cap) {
  const Vec3 c = pose.apply(model.centroid);
  double best = cap;
  for (const auto& box : bin_boxes) {
    if (box.distance(c) - model.radius >= cap) continue;
    for (const auto& s : model.samples) best = std::min(best, box.signed_distance(pose.apply(s)));
  }
  return best;
}

double clearance(const ObjectModel& model, const RigidTransform& pose,
                 std::span<const RigidTransform> others, std::span<const OrientedBox> bin_boxes,
                 double cap) {
  double best = bin_clearance(model, pose, bin_boxes, cap);
  for (const auto& o : others) best = std::min(best, pair_clearance(model, pose, o, best));
  return best;
}

}  // namespace binpick::scene
