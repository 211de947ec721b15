#pragma once

#include <memory>
#include <span>
#include <vector>

#include "binpick/geometry/distance_field.hpp"
#include "binpick/geometry/mesh.hpp"
#include "binpick/geometry/raycast.hpp"
#include "binpick/scene/bin.hpp"

namespace binpick::scene {

struct ObjectModelParams {
  double sdf_resolution = 0.001;
  double sdf_padding = 0.006;
  double face_spacing = 0.004;   // Poisson radius for contact samples
  double edge_spacing = 0.0015;  // along feature edges
  double feature_angle = 0.35;   // dihedral threshold for feature edges (rad)
  std::uint64_t seed = 1;
};

/// Rigid object with precomputed collision data, all in the object frame.
struct ObjectModel {
  TriangleMesh mesh;
  std::shared_ptr<const geometry::MeshBvh> bvh;
  geometry::SignedDistanceField sdf;
  /// Vertices, feature-edge points and surface points used as contact probes.
  std::vector<Vec3> samples;
  Vec3 centroid = Vec3::Zero();
  double radius = 0.0;  // bounding sphere about centroid
};

/// Validates the mesh (closed, non-degenerate) and builds collision data.
std::shared_ptr<const ObjectModel> make_object_model(TriangleMesh mesh,
                                                     const ObjectModelParams& params = {});

/// Smallest probed separation between two posed copies of `model`; negative
/// when they interpenetrate. Values above `cap` are reported as `cap`.
double pair_clearance(const ObjectModel& model, const RigidTransform& a, const RigidTransform& b,
                      double cap);

/// Smallest signed distance from the posed object's probes to the bin boxes
/// (world frame boxes), capped at `cap`.
double bin_clearance(const ObjectModel& model, const RigidTransform& pose,
                     std::span<const OrientedBox> bin_boxes, double cap);

/// Minimum of the bin clearance and the pair clearance against every pose in
/// `others`.
double clearance(const ObjectModel& model, const RigidTransform& pose,
                 std::span<const RigidTransform> others, std::span<const OrientedBox> bin_boxes,
                 double cap);

}  // namespace binpick::scene
