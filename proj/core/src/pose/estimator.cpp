#include "binpick/pose/estimator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>

#include "binpick/errors.hpp"
#include "binpick/geometry/metrics.hpp"

namespace binpick::pose {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<Vec3> icosahedron_directions() {
  const double phi = 0.5 * (1.0 + std::sqrt(5.0));
  std::vector<Vec3> v;
  for (double a : {-1.0, 1.0}) {
    for (double b : {-1.0, 1.0}) {
      v.emplace_back(0.0, a, b * phi);
      v.emplace_back(a, b * phi, 0.0);
      v.emplace_back(b * phi, 0.0, a);
    }
  }
  const double edge2 = 4.0;  // squared edge length of this icosahedron
  auto adjacent = [&](std::size_t i, std::size_t j) {
    return std::abs((v[i] - v[j]).squaredNorm() - edge2) < 1e-9;
  };
  std::vector<Vec3> out;
  for (const auto& p : v) out.push_back(p.normalized());
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      for (std::size_t k = j + 1; k < v.size(); ++k) {
        if (adjacent(i, j) && adjacent(j, k) && adjacent(i, k)) {
          out.push_back((v[i] + v[j] + v[k]).normalized());
        }
      }
    }
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      if (adjacent(i, j)) out.push_back((v[i] + v[j]).normalized());
    }
  }
  return out;
}

/// ICP stages: point-to-point with coarse gates, then point-to-plane with the
/// final parameters.
std::optional<geometry::IcpResult> staged_icp(const PointCloud& source, const PointGrid& target,
                                              std::span<const Vec3> normals, RigidTransform init,
                                              const std::vector<double>& coarse,
                                              std::size_t coarse_iterations,
                                              const IcpParams& final_params) {
  try {
    for (double gate : coarse) {
      IcpParams p{coarse_iterations, final_params.convergence_tol, gate};
      init = geometry::icp(source, target, init, p).transform;
    }
    return geometry::icp_point_to_plane(source, target, normals, init, final_params);
  } catch (const DegenerateGeometryError&) {
    return std::nullopt;
  }
}

/// ADD-S(est, gt) < threshold, stopping as soon as the partial sum decides it.
bool add_s_below(const PointCloud& model, const PointGrid& model_index, const RigidTransform& est,
                 const RigidTransform& gt, double threshold) {
  const RigidTransform rel = gt.inverse() * est;
  const double budget = threshold * static_cast<double>(model.size());
  double sum = 0.0;
  for (const auto& p : model.points) {
    const auto hit = model_index.nearest_within(rel.apply(p), budget - sum);
    if (!hit) return false;
    sum += std::sqrt(hit->squared_distance);
    if (sum >= budget) return false;
  }
  return true;
}

}  // namespace

void EstimatorParams::validate(double model_radius) const {
  if (anchor_count == 0 || hypotheses_per_anchor == 0 || min_points == 0 || coarse_iterations == 0) {
    throw ArgumentError("estimator counts must be positive");
  }
  if (hypotheses_per_anchor > 62) throw ArgumentError("at most 62 hypotheses per anchor");
  if (anchor_radius < 0.0 || nms_threshold < 0.0 || !(inlier_distance > 0.0) || !(crop_voxel > 0.0)) {
    throw ArgumentError("estimator distances must be positive");
  }
  if (resolved_anchor_radius(model_radius) < 0.5 * model_radius) {
    throw ArgumentError("anchor radius must be at least half the object bounding radius");
  }
  for (double d : coarse_distances) {
    if (!(d > 0.0)) throw ArgumentError("ICP correspondence gates must be positive");
  }
  icp.validate();
}

double EstimatorParams::resolved_anchor_depth(double model_radius) const {
  return anchor_depth >= 0.0 ? anchor_depth : 0.5 * model_radius;
}

double EstimatorParams::resolved_anchor_radius(double model_radius) const {
  return anchor_radius > 0.0 ? anchor_radius : 1.2 * model_radius;
}

double EstimatorParams::resolved_nms_threshold(double model_radius) const {
  return nms_threshold > 0.0 ? nms_threshold : 0.1 * 2.0 * model_radius;
}

std::vector<geometry::Mat3> orientation_set(std::size_t count) {
  static const std::vector<Vec3> dirs = icosahedron_directions();
  if (count == 0 || count > dirs.size()) {
    throw ArgumentError("orientation count must be in [1, " + std::to_string(dirs.size()) + "]");
  }
  std::vector<geometry::Mat3> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(geometry::rotation_between(Vec3::UnitZ(), dirs[i]));
  return out;
}

std::shared_ptr<const PoseModel> make_pose_model(const TriangleMesh& mesh, double sample_radius,
                                                 std::size_t nms_points) {
  mesh.validate();
  auto m = std::make_shared<PoseModel>();
  m->mesh = mesh;
  m->bvh = std::make_shared<const geometry::MeshBvh>(mesh);
  m->points = geometry::sample_surface_poisson(mesh, sample_radius, 7, &m->normals);
  m->points.frame = "object";
  if (m->points.empty()) throw EmptyInputError("object mesh produced no surface samples");
  m->index = PointGrid(m->points.points);
  const auto picks = geometry::farthest_point_sampling(m->points, std::min(nms_points, m->points.size()));
  m->nms_points = geometry::select(m->points, picks);
  m->nms_index = PointGrid(m->nms_points.points);
  m->centroid = mesh.centroid();
  m->radius = mesh.bounding_radius();
  return m;
}

RigidTransform locate_bin(const PointCloud& cloud, const BinModel& bin, const RigidTransform& prior) {
  bin.validate();
  const auto boxes = bin.boxes();
  const RigidTransform prior_inv = prior.inverse();
  const Vec3 reach = 0.5 * bin.cavity + Vec3::Constant(bin.wall + 0.03);
  PointCloud near;
  for (const auto& p : cloud.points) {
    const Vec3 q = prior_inv.apply(p);
    if (std::abs(q.x()) <= reach.x() && std::abs(q.y()) <= reach.y() && q.z() >= -0.03 &&
        q.z() <= bin.cavity.z() + 0.03) {
      near.points.push_back(p);
    }
  }
  near = geometry::voxel_downsample(near, 0.004);
  if (near.size() < 30) throw LocalizationError("too few scene points near the bin prior", kInf);

  // Point-to-point ICP whose correspondences are exact closest points on the
  // bin's box surfaces (bin frame), so flat faces do not quantize the fit.
  RigidTransform t = prior_inv;  // world -> bin
  std::vector<Vec3> from, to;
  double residual = kInf;
  bool converged = false;
  std::size_t matched = 0;
  const std::array<std::pair<double, int>, 3> stages{{{0.02, 30}, {0.005, 30}, {0.002, 200}}};
  for (std::size_t s = 0; s < stages.size(); ++s) {
    const auto [gate, iterations] = stages[s];
    double prev = kInf;
    for (int it = 0; it < iterations; ++it) {
      from.clear();
      to.clear();
      double sum = 0.0;
      for (const auto& p : near.points) {
        const Vec3 q = t.apply(p);
        double best = kInf;
        Vec3 closest;
        for (const auto& b : boxes) {
          const Vec3 c = b.closest_surface_point(q);
          const double d = (c - q).norm();
          if (d < best) {
            best = d;
            closest = c;
          }
        }
        if (best <= gate) {
          from.push_back(q);
          to.push_back(closest);
          sum += best;
        }
      }
      if (from.size() < 3) throw LocalizationError("bin registration found no correspondences", kInf);
      residual = sum / static_cast<double>(from.size());
      matched = from.size();
      if (std::abs(prev - residual) < 1e-9) {
        converged = s + 1 == stages.size();
        break;
      }
      prev = residual;
      try {
        t = geometry::fit_rigid(from, to) * t;
      } catch (const DegenerateGeometryError&) {
        throw LocalizationError("bin registration is degenerate", residual);
      }
    }
  }
  if (!converged) throw LocalizationError("bin registration did not converge", residual);
  const double inliers = static_cast<double>(matched) / static_cast<double>(near.size());
  if (inliers < 0.5) {
    throw LocalizationError("only " + std::to_string(static_cast<int>(100 * inliers)) +
                                "% of scene points agree with the bin",
                            residual);
  }
  const RigidTransform pose = t.inverse();
  if (geometry::translation_distance(pose, prior) > 0.05 ||
      geometry::rotation_angle_between(pose, prior) > 0.2) {
    throw LocalizationError("bin registration left the prior's basin", residual);
  }
  return pose;
}

PointCloud crop_to_bin(const PointCloud& cloud, const RigidTransform& bin_pose, const BinModel& bin,
                       double wall_margin) {
  const RigidTransform inv = bin_pose.inverse();
  const Vec3 h = 0.5 * bin.cavity;
  PointCloud out;
  out.frame = cloud.frame;
  for (const auto& p : cloud.points) {
    const Vec3 q = inv.apply(p);
    if (std::abs(q.x()) <= h.x() - wall_margin && std::abs(q.y()) <= h.y() - wall_margin &&
        q.z() >= wall_margin && q.z() <= bin.cavity.z()) {
      out.points.push_back(p);
    }
  }
  return out;
}

double depth_check_score(const RigidTransform& pose, const PoseModel& model,
                         const PointGrid& scene_index, const VirtualCamera& camera,
                         double inlier_distance) {
  const geometry::RayCaster caster({{model.bvh, pose}});
  const auto window = scene::sphere_window(camera, pose.apply(model.centroid), model.radius);
  const auto visible = scene::render_window(caster, camera, window, 0.0, 0);
  if (visible.empty()) return 0.0;
  std::size_t inliers = 0;
  for (const auto& p : visible.points) {
    if (scene_index.any_within(camera.pose.apply(p), inlier_distance)) ++inliers;
  }
  return static_cast<double>(inliers) / static_cast<double>(visible.size());
}

double depth_check_score(const RigidTransform& pose, const TriangleMesh& model,
                         const PointCloud& cloud, const VirtualCamera& camera,
                         double inlier_distance) {
  const auto pm = make_pose_model(model);
  const PointGrid index(cloud.points);
  return depth_check_score(pose, *pm, index, camera, inlier_distance);
}

std::vector<PoseHypothesis> nms_adds(const std::vector<PoseHypothesis>& hypotheses,
                                     double threshold, const PointCloud& model_points,
                                     const PointGrid& model_index) {
  if (hypotheses.empty()) return {};
  // Mean distance is at least |centroid offset| - spread, so far pairs are skipped.
  const Vec3 center = model_points.centroid();
  double spread = 0.0;
  for (const auto& p : model_points.points) spread = std::max(spread, (p - center).norm());
  std::vector<PoseHypothesis> kept;
  for (const auto& h : hypotheses) {
    bool suppressed = false;
    const Vec3 hc = h.pose.apply(center);
    for (const auto& k : kept) {
      if ((hc - k.pose.apply(center)).norm() - spread >= threshold) continue;
      if (add_s_below(model_points, model_index, h.pose, k.pose, threshold)) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(h);
  }
  return kept;
}

std::vector<PoseHypothesis> nms_adds(const std::vector<PoseHypothesis>& hypotheses,
                                     double threshold, const PointCloud& model_points) {
  if (hypotheses.empty()) return {};
  return nms_adds(hypotheses, threshold, model_points, PointGrid(model_points.points));
}

std::vector<PoseHypothesis> estimate_poses(const PointCloud& cloud, const PoseModel& model,
                                           const VirtualCamera& camera,
                                           const EstimatorParams& params) {
  params.validate(model.radius);
  if (cloud.size() < params.min_points) {
    throw InsufficientDataError("cropped cloud has " + std::to_string(cloud.size()) +
                                " points, need " + std::to_string(params.min_points));
  }
  const PointGrid scene_index(cloud.points);
  const double crop_radius = params.resolved_anchor_radius(model.radius);
  const double anchor_depth = params.resolved_anchor_depth(model.radius);
  const auto rotations = orientation_set(params.hypotheses_per_anchor);
  const auto anchors =
      geometry::farthest_point_sampling(cloud, std::min(params.anchor_count, cloud.size()));

  std::vector<PoseHypothesis> hyps;
  for (std::size_t a = 0; a < anchors.size(); ++a) {
    const Vec3 anchor = cloud.points[anchors[a]];
    const Vec3 ray = (anchor - camera.pose.translation()).normalized();
    const Vec3 start = anchor + anchor_depth * ray;
    const PointCloud local =
        geometry::voxel_downsample(geometry::radius_crop(cloud, anchor, crop_radius), params.crop_voxel);
    if (local.size() < 3) continue;
    for (const auto& r : rotations) {
      const RigidTransform init(r, start - r * model.centroid);
      const auto fit = staged_icp(local, model.index, model.normals, init.inverse(), params.coarse_distances,
                                  params.coarse_iterations, params.icp);
      if (!fit) continue;
      PoseHypothesis h;
      h.pose = fit->transform.inverse();
      h.anchor = a;
      h.icp_residual = fit->residual;
      h.score = depth_check_score(h.pose, model, scene_index, camera, params.inlier_distance);
      hyps.push_back(h);
    }
  }
  auto by_score = [](const PoseHypothesis& x, const PoseHypothesis& y) { return x.score > y.score; };
  const double nms = params.resolved_nms_threshold(model.radius);
  std::stable_sort(hyps.begin(), hyps.end(), by_score);
  hyps = nms_adds(hyps, nms, model.nms_points, model.nms_index);

  const std::size_t refine = std::min(params.refine_count, hyps.size());
  for (std::size_t i = 0; i < refine && !params.refine_distances.empty(); ++i) {
    auto& h = hyps[i];
    for (double f : params.refine_shifts) {
      for (int axis = 0; axis < 3; ++axis) {
        for (double sign : {1.0, -1.0}) {
          const RigidTransform moved =
              h.pose * RigidTransform::from_translation(sign * f * model.radius * Vec3::Unit(axis));
          const double score = depth_check_score(moved, model, scene_index, camera, params.inlier_distance);
          if (score > h.score) {
            h.pose = moved;
            h.score = score;
          }
        }
      }
    }
    const Vec3 centre = h.pose.apply(model.centroid);
    const PointCloud local = geometry::radius_crop(cloud, centre, model.radius + params.refine_distances.front());
    if (local.size() < 3) continue;
    std::optional<geometry::IcpResult> fit;
    try {
      RigidTransform t = h.pose.inverse();
      for (double gate : params.refine_distances) {
        IcpParams p = params.icp;
        p.max_correspondence_dist = gate;
        fit = geometry::icp_point_to_plane(local, model.index, model.normals, t, p);
        t = fit->transform;
      }
    } catch (const DegenerateGeometryError&) {
      continue;
    }
    const RigidTransform pose = fit->transform.inverse();
    const double score = depth_check_score(pose, model, scene_index, camera, params.inlier_distance);
    if (score >= h.score) {
      h.pose = pose;
      h.score = score;
      h.icp_residual = fit->residual;
    }
  }
  std::stable_sort(hyps.begin(), hyps.end(), by_score);
  return nms_adds(hyps, nms, model.nms_points, model.nms_index);
}

std::vector<PoseHypothesis> estimate_poses(const PointCloud& cloud, const TriangleMesh& model,
                                           const VirtualCamera& camera,
                                           const EstimatorParams& params) {
  return estimate_poses(cloud, *make_pose_model(model), camera, params);
}

}  // namespace binpick::pose
