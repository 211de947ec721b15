#pragma once

#include <memory>
#include <vector>

#include "binpick/geometry/point_cloud.hpp"
#include "binpick/geometry/raycast.hpp"
#include "binpick/geometry/registration.hpp"
#include "binpick/geometry/spatial_index.hpp"
#include "binpick/scene/bin.hpp"
#include "binpick/scene/camera.hpp"

namespace binpick::pose {

using geometry::IcpParams;
using geometry::PointCloud;
using geometry::PointGrid;
using geometry::RigidTransform;
using geometry::TriangleMesh;
using geometry::Vec3;
using scene::BinModel;
using scene::VirtualCamera;

struct PoseHypothesis {
  RigidTransform pose;  // object -> world
  double score = 0.0;   // depth-check inlier fraction in [0, 1]
  std::size_t anchor = 0;
  double icp_residual = 0.0;
};

struct EstimatorParams {
  std::size_t anchor_count = 8;
  double anchor_radius = 0.0;  // 0: 1.2 x model bounding radius
  /// Initial centroid lies this far behind the anchor along the viewing ray.
  double anchor_depth = -1.0;  // negative: half the model bounding radius
  std::size_t hypotheses_per_anchor = 12;
  double nms_threshold = 0.0;  // 0: 0.1 x model diameter
  double inlier_distance = 0.003;
  /// Final ICP stage (point-to-plane); earlier stages are point-to-point with
  /// `coarse_distances` as correspondence gates.
  IcpParams icp{20, 1e-6, 0.002};
  std::vector<double> coarse_distances{0.02, 0.005};
  std::size_t coarse_iterations = 10;
  double crop_voxel = 0.005;  // local crops are thinned to this voxel size
  /// Best hypotheses re-fitted against the unthinned points around them.
  std::size_t refine_count = 12;
  std::vector<double> refine_distances{0.006, 0.003};
  /// Before re-fitting, translations along the hypothesis axes by these
  /// fractions of the bounding radius are kept whenever they raise the score.
  std::vector<double> refine_shifts{0.4, 0.2, 0.1};
  std::size_t min_points = 30;

  /// Throws ArgumentError when a value is out of range for `model_radius`.
  void validate(double model_radius) const;
  double resolved_anchor_radius(double model_radius) const;
  double resolved_anchor_depth(double model_radius) const;
  double resolved_nms_threshold(double model_radius) const;
};

/// Object geometry prepared for estimation: surface samples and indices in the
/// object frame, and a BVH for depth-check rendering.
struct PoseModel {
  TriangleMesh mesh;
  std::shared_ptr<const geometry::MeshBvh> bvh;
  PointCloud points;  // Poisson-disk surface samples
  std::vector<Vec3> normals;  // outward unit normal per sample
  PointGrid index;
  PointCloud nms_points;  // decimated subset for hypothesis comparison
  PointGrid nms_index;
  Vec3 centroid = Vec3::Zero();
  double radius = 0.0;
};

std::shared_ptr<const PoseModel> make_pose_model(const TriangleMesh& mesh,
                                                 double sample_radius = 0.002,
                                                 std::size_t nms_points = 200);

/// Refines the bin pose by registering the scene cloud (world frame) against
/// the bin's inner surfaces. Throws LocalizationError when registration does
/// not converge or too few points agree with the bin.
RigidTransform locate_bin(const PointCloud& cloud, const BinModel& bin, const RigidTransform& prior);

/// World points inside the bin cavity, at least `wall_margin` away from the
/// walls and the floor.
PointCloud crop_to_bin(const PointCloud& cloud, const RigidTransform& bin_pose, const BinModel& bin,
                       double wall_margin = 0.0025);

/// Fraction of the model's camera-visible surface points (rendered alone at
/// `pose`) that have a scene point within `inlier_distance`. 0 when nothing
/// is visible.
double depth_check_score(const RigidTransform& pose, const PoseModel& model,
                         const PointGrid& scene_index, const VirtualCamera& camera,
                         double inlier_distance);
double depth_check_score(const RigidTransform& pose, const TriangleMesh& model,
                         const PointCloud& cloud, const VirtualCamera& camera,
                         double inlier_distance = 0.003);

/// Greedy ADD-S suppression over hypotheses sorted by descending score.
std::vector<PoseHypothesis> nms_adds(const std::vector<PoseHypothesis>& hypotheses,
                                     double threshold, const PointCloud& model_points);
std::vector<PoseHypothesis> nms_adds(const std::vector<PoseHypothesis>& hypotheses,
                                     double threshold, const PointCloud& model_points,
                                     const PointGrid& model_index);

/// Initial orientations: object z axis pointed at icosahedron vertices, then
/// face centres, then edge midpoints (first `count` of the 62 directions).
std::vector<geometry::Mat3> orientation_set(std::size_t count);

/// Anchor-based hypothesis generation, ICP refinement, depth-check scoring and
/// ADD-S suppression on a cropped world-frame cloud. Result sorted by score.
/// Throws InsufficientDataError when the cloud has fewer than min_points.
std::vector<PoseHypothesis> estimate_poses(const PointCloud& cloud, const PoseModel& model,
                                           const VirtualCamera& camera,
                                           const EstimatorParams& params);
std::vector<PoseHypothesis> estimate_poses(const PointCloud& cloud, const TriangleMesh& model,
                                           const VirtualCamera& camera,
                                           const EstimatorParams& params = {});

}  // namespace binpick::pose
