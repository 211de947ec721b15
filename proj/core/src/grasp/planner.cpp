#include "binpick/grasp/planner.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>

#include "binpick/errors.hpp"

namespace binpick::grasp {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool cloud_hits_box(const PlanningScene& world, const OrientedBox& box,
                    const std::function<bool(const Vec3&)>& ignore = {}) {
  const auto bounds = box.world_bounds();
  bool hit = false;
  world.index.for_each_in_box(bounds.lo, bounds.hi, [&](std::size_t i) {
    if (hit) return;
    const Vec3& p = world.index.points()[i];
    if (box.contains(p) && !(ignore && ignore(p))) hit = true;
  });
  return hit;
}

bool hits_bin(const PlanningScene& world, const OrientedBox& box) {
  return std::any_of(world.bin_boxes.begin(), world.bin_boxes.end(),
                     [&](const OrientedBox& b) { return geometry::intersects(box, b); });
}

bool below_table(const PlanningScene& world, const OrientedBox& box) {
  return box.world_bounds().lo.z() < world.table_height;
}

std::array<OrientedBox, 2> world_fingers(const GripperModel& g, const RigidTransform& tcp, double gap) {
  auto f = g.fingers(gap);
  return {f[0].transformed(tcp), f[1].transformed(tcp)};
}

/// Finger box extended back along the approach and dilated (TCP frame).
OrientedBox swept_finger(const OrientedBox& finger, double sweep, double margin) {
  OrientedBox s = finger;
  s.pose = RigidTransform::from_translation(finger.pose.translation() - Vec3(0, 0, 0.5 * sweep));
  s.half_extents.z() += 0.5 * sweep;
  return s.dilated(margin);
}

bool gripper_hits_bin(const PlanningScene& world, const RigidTransform& tcp, double gap) {
  for (const auto& f : world_fingers(world.gripper, tcp, gap)) {
    if (hits_bin(world, f)) return true;
  }
  return hits_bin(world, world.gripper.body().transformed(tcp));
}

}  // namespace

const char* to_string(CollisionClass c) {
  switch (c) {
    case CollisionClass::None: return "none";
    case CollisionClass::Object: return "object";
    case CollisionClass::Bin: return "bin";
    case CollisionClass::Rejected: return "rejected";
  }
  return "?";
}

void PlannerParams::validate() const {
  const bool ok = target_exclusion >= 0.0 && finger_margin >= 0.0 && sweep_length >= 0.0 &&
                  retreat > 0.0 && pre_open_margin >= 0.0 && joint_step > 0.0 &&
                  pregrasp_distance > 0.0 && contact_zone >= 0.0 &&
                  std::all_of(link_radius.begin(), link_radius.end(), [](double r) { return r > 0.0; });
  if (!ok) throw ArgumentError("invalid planner parameters");
}

double PlannerParams::approach_gap(double opening, double stroke) const {
  return std::min(opening + pre_open_margin, stroke);
}

PlanningScene make_planning_scene(PointCloud cloud, const scene::BinModel& bin,
                                  const RigidTransform& bin_pose, const GripperModel& gripper,
                                  std::shared_ptr<const scene::ObjectModel> object,
                                  std::vector<RigidTransform> object_poses) {
  gripper.validate();
  PlanningScene w;
  w.cloud = std::move(cloud);
  w.index = geometry::PointGrid(w.cloud.points);
  w.bin = bin;
  w.bin.pose = bin_pose;
  w.bin_boxes = w.bin.world_boxes();
  w.table_height = bin_pose.translation().z() - bin.wall;
  w.gripper = gripper;
  w.object = std::move(object);
  w.object_poses = std::move(object_poses);
  return w;
}

std::vector<GraspCandidate> compose_candidates(std::span<const RigidTransform> object_poses,
                                               std::span<const std::vector<GraspPose>> grasp_sets,
                                               const RobotModel& robot) {
  if (grasp_sets.size() != object_poses.size()) {
    throw ArgumentError("need one grasp set per object pose");
  }
  std::vector<GraspCandidate> out;
  for (std::size_t n = 0; n < object_poses.size(); ++n) {
    for (std::size_t m = 0; m < grasp_sets[n].size(); ++m) {
      const auto& g = grasp_sets[n][m];
      GraspCandidate c;
      c.object = n;
      c.grasp = m;
      c.tcp = object_poses[n] * g.object_to_tcp;
      c.ik = kinematics::ik(robot, c.tcp);
      c.type_id = g.type_id;
      c.opening = g.opening;
      if (c.ik.empty()) {
        c.collision = CollisionClass::Rejected;
        c.reason = RejectReason::Unreachable;
      }
      out.push_back(std::move(c));
    }
  }
  return out;
}

CollisionClass classify_collision(const GraspCandidate& candidate, const PlanningScene& world,
                                  const PlannerParams& params, RejectReason* reason) {
  auto result = [&](CollisionClass c, RejectReason r) {
    if (reason) *reason = r;
    return c;
  };
  const auto& g = world.gripper;
  const double gap = params.approach_gap(candidate.opening, g.stroke);
  const auto body = g.body().transformed(candidate.tcp);
  if (hits_bin(world, body) || below_table(world, body) || cloud_hits_box(world, body)) {
    return result(CollisionClass::Rejected, RejectReason::BodyCollision);
  }
  if (gripper_hits_bin(world, candidate.tcp, gap)) {
    const RigidTransform back = candidate.tcp * RigidTransform::from_translation(Vec3(0, 0, -params.retreat));
    if (gripper_hits_bin(world, back, gap)) {
      return result(CollisionClass::Rejected, RejectReason::BinNotCleared);
    }
    return result(CollisionClass::Bin, RejectReason::None);
  }
  std::function<bool(const Vec3&)> ignore;
  if (world.object && candidate.object < world.object_poses.size()) {
    const RigidTransform inv = world.object_poses[candidate.object].inverse();
    ignore = [&, inv](const Vec3& p) { return world.object->sdf(inv.apply(p)) <= params.target_exclusion; };
  }
  for (const auto& f : g.fingers(gap)) {
    const auto swept = swept_finger(f, params.sweep_length, params.finger_margin).transformed(candidate.tcp);
    if (cloud_hits_box(world, swept, ignore)) return result(CollisionClass::Object, RejectReason::None);
  }
  return result(CollisionClass::None, RejectReason::None);
}

void classify_all(std::vector<GraspCandidate>& candidates, const PlanningScene& world,
                  const PlannerParams& params) {
  for (auto& c : candidates) {
    if (c.ik.empty()) continue;
    c.collision = classify_collision(c, world, params, &c.reason);
  }
}

std::vector<RankedGrasp> order_candidates(std::span<const GraspCandidate> candidates,
                                          const JointConfig& current) {
  std::vector<RankedGrasp> out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& c = candidates[i];
    if (c.collision == CollisionClass::Rejected) continue;
    for (const auto& s : c.ik) {
      out.push_back({i, s, c.collision, kinematics::joint_distance(s.q, current)});
    }
  }
  if (out.empty()) throw NoGraspError("no reachable grasp candidate");
  std::sort(out.begin(), out.end(), [&](const RankedGrasp& a, const RankedGrasp& b) {
    if (a.collision != b.collision) return a.collision < b.collision;
    if (a.distance != b.distance) return a.distance < b.distance;
    const auto& ca = candidates[a.candidate];
    const auto& cb = candidates[b.candidate];
    if (ca.object != cb.object) return ca.object < cb.object;
    if (ca.grasp != cb.grasp) return ca.grasp < cb.grasp;
    if (a.solution.branch != b.solution.branch) return a.solution.branch < b.solution.branch;
    return a.candidate < b.candidate;
  });
  return out;
}

JointConfig nearest_equivalent(const RobotModel& robot, const JointConfig& start,
                               const JointConfig& goal) {
  JointConfig out = goal;
  for (std::size_t j = 0; j < 6; ++j) {
    const double base = start[j] + kinematics::wrap_angle(goal[j] - start[j]);
    double best = goal[j];
    double best_d = std::abs(goal[j] - start[j]);
    for (double v : {base, base - kTwoPi, base + kTwoPi}) {
      if (v < robot.limits[j].min || v > robot.limits[j].max) continue;
      const double d = std::abs(v - start[j]);
      if (d < best_d) {
        best = v;
        best_d = d;
      }
    }
    out[j] = best;
  }
  return out;
}

bool in_collision(const JointConfig& q, const PlanningScene& world, const RobotModel& robot,
                  const PlannerParams& params, const GraspCandidate* target) {
  const auto frames = kinematics::link_frames(robot, q);
  for (std::size_t i = 0; i < 6; ++i) {
    const Vec3 a = frames[i].translation();
    const Vec3 b = frames[i + 1].translation();
    const double r = params.link_radius[i];
    const int n = std::max(1, static_cast<int>(std::ceil((b - a).norm() / (0.5 * r))));
    for (int k = 0; k <= n; ++k) {
      const Vec3 c = a + (b - a) * (static_cast<double>(k) / n);
      if (i > 0 && c.z() - r < world.table_height) return true;
      for (const auto& box : world.bin_boxes) {
        if (box.distance(c) < r) return true;
      }
      if (world.index.any_within(c, r)) return true;
    }
  }
  const RigidTransform tcp = frames[6] * robot.tcp;
  const auto& g = world.gripper;
  const auto body = g.body().transformed(tcp);
  if (hits_bin(world, body) || below_table(world, body) || cloud_hits_box(world, body)) return true;
  const double gap = target ? params.approach_gap(target->opening, g.stroke) : g.stroke;
  if (target && (tcp.translation() - target->tcp.translation()).norm() <= params.contact_zone) {
    return false;
  }
  for (const auto& f : world_fingers(g, tcp, gap)) {
    if (hits_bin(world, f) || below_table(world, f) || cloud_hits_box(world, f)) return true;
  }
  return false;
}

std::optional<JointPath> plan_path(const JointConfig& start, const JointConfig& goal,
                                   const PlanningScene& world, const RobotModel& robot,
                                   const PlannerParams& params, const GraspCandidate* target) {
  const JointConfig end = nearest_equivalent(robot, start, goal);
  double dist = 0.0;
  for (std::size_t j = 0; j < 6; ++j) dist = std::max(dist, std::abs(end[j] - start[j]));
  const auto steps = static_cast<std::size_t>(std::ceil(dist / params.joint_step - 1e-12));
  JointPath path;
  path.waypoints.reserve(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) {
    JointConfig q = end;
    if (k < steps) {
      const double t = static_cast<double>(k) / static_cast<double>(steps);
      for (std::size_t j = 0; j < 6; ++j) q[j] = start[j] + t * (end[j] - start[j]);
    }
    if (in_collision(q, world, robot, params, target)) return std::nullopt;
    path.waypoints.push_back(q);
  }
  return path;
}

std::optional<GraspMotion> plan_grasp_motion(const JointConfig& start, const GraspCandidate& candidate,
                                             const IkSolution& solution, const PlanningScene& world,
                                             const RobotModel& robot, const PlannerParams& params) {
  const RigidTransform pre =
      candidate.tcp * RigidTransform::from_translation(Vec3(0, 0, -params.pregrasp_distance));
  const auto pre_ik = kinematics::ik(robot, pre);
  if (pre_ik.empty()) return std::nullopt;
  const auto nearest = std::min_element(pre_ik.begin(), pre_ik.end(), [&](const auto& a, const auto& b) {
    return kinematics::joint_distance(a.q, solution.q) < kinematics::joint_distance(b.q, solution.q);
  });
  auto transfer = plan_path(start, nearest->q, world, robot, params);
  if (!transfer) return std::nullopt;
  auto approach = plan_path(transfer->waypoints.back(), solution.q, world, robot, params, &candidate);
  if (!approach) return std::nullopt;
  GraspMotion m;
  m.path = std::move(*transfer);
  m.approach_start = m.path.waypoints.size() - 1;
  m.path.waypoints.insert(m.path.waypoints.end(), approach->waypoints.begin() + 1,
                          approach->waypoints.end());
  return m;
}

}  // namespace binpick::grasp
