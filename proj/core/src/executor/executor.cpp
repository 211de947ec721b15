#include "binpick/executor/executor.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Geometry>

#include "binpick/errors.hpp"

namespace binpick::executor {

namespace {

using geometry::OrientedBox;

constexpr int kPushRounds = 4;
constexpr double kWedgeMargin = 1e-4;

struct Contact {
  bool bin = false;
  std::vector<std::pair<std::size_t, Vec3>> pushes;  // object index, displacement
  bool any() const { return bin || !pushes.empty(); }
};

/// Gripper boxes and their surface probes in the TCP frame for one gap.
struct HandShape {
  std::vector<OrientedBox> boxes;
  std::vector<std::vector<Vec3>> probes;

  HandShape(const grasp::GripperModel& g, double gap) {
    for (const auto& f : g.fingers(gap)) {
      boxes.push_back(f);
      probes.push_back(f.surface_samples(0.003));
    }
    boxes.push_back(g.body());
    probes.push_back(g.body().surface_samples(0.005));
  }
};

Contact find_contact(const scene::SceneState& scene, const std::vector<OrientedBox>& bin_boxes,
                     const HandShape& hand, const RigidTransform& tcp) {
  Contact c;
  const auto& model = *scene.object;
  for (std::size_t b = 0; b < hand.boxes.size(); ++b) {
    const OrientedBox box = hand.boxes[b].transformed(tcp);
    for (const auto& bb : bin_boxes) {
      if (geometry::intersects(box, bb)) c.bin = true;
    }
  }
  for (std::size_t o = 0; o < scene.poses.size(); ++o) {
    const RigidTransform& pose = scene.poses[o];
    const RigidTransform inv = pose.inverse();
    const Vec3 centre = pose.apply(model.centroid);
    double deepest = 0.0;
    Vec3 push = Vec3::Zero();
    for (std::size_t b = 0; b < hand.boxes.size(); ++b) {
      const OrientedBox box = hand.boxes[b].transformed(tcp);
      if ((centre - box.pose.translation()).norm() > model.radius + box.half_extents.norm()) continue;
      for (const auto& s : hand.probes[b]) {
        const Vec3 q = inv.apply(tcp.apply(s));
        const double d = model.sdf(q);
        if (d < 0.0 && -d > deepest) {
          deepest = -d;
          push = -pose.apply_direction(model.sdf.gradient(q));
        }
      }
      for (const auto& s : model.samples) {
        const Vec3 p = pose.apply(s);
        const double d = box.signed_distance(p);
        if (d < 0.0 && -d > deepest) {
          deepest = -d;
          push = (box.closest_surface_point(p) - p).normalized();
        }
      }
    }
    if (deepest > 0.0) c.pushes.emplace_back(o, push * deepest);
  }
  return c;
}

RigidTransform shifted(const RigidTransform& pose, const Vec3& d) {
  return RigidTransform(pose.rotation(), pose.translation() + d);
}

/// Tries to clear the hand at `tcp` by pushing objects. Returns false if the
/// bin is hit or an object would have to move too far or into something.
bool try_clear(scene::SceneState& scene, const std::vector<OrientedBox>& bin_boxes,
               const HandShape& hand, const RigidTransform& tcp, const ExecutorParams& params) {
  std::vector<Vec3> moved(scene.poses.size(), Vec3::Zero());
  for (int round = 0; round < kPushRounds; ++round) {
    const Contact c = find_contact(scene, bin_boxes, hand, tcp);
    if (!c.any()) return true;
    if (c.bin) return false;
    for (const auto& [o, disp] : c.pushes) {
      const double len = disp.norm() + params.contact_tolerance;
      Vec3 dir = disp.normalized();
      std::vector<RigidTransform> others;
      for (std::size_t k = 0; k < scene.poses.size(); ++k) {
        if (k != o) others.push_back(scene.poses[k]);
      }
      const double before = scene::clearance(*scene.object, scene.poses[o], others, bin_boxes, 0.01);
      bool placed = false;
      for (int attempt = 0; attempt < 2 && !placed; ++attempt) {
        Vec3 step = dir * len;
        if (attempt == 1) {
          const Vec3 h(dir.x(), dir.y(), 0.0);
          if (h.norm() < 0.3) break;
          step = h / h.squaredNorm() * len;
        }
        if ((moved[o] + step).norm() > params.push_limit) continue;
        const RigidTransform next = shifted(scene.poses[o], step);
        const double after = scene::clearance(*scene.object, next, others, bin_boxes, 0.01);
        if (after < std::min(before, 0.0) - kWedgeMargin) continue;
        scene.poses[o] = next;
        moved[o] += step;
        placed = true;
      }
      if (!placed) return false;
    }
  }
  return !find_contact(scene, bin_boxes, hand, tcp).any();
}

RigidTransform interpolate(const RigidTransform& a, const RigidTransform& b, double t) {
  const Eigen::Quaterniond qa(a.rotation());
  const Eigen::Quaterniond qb(b.rotation());
  const Eigen::Quaterniond q = qa.slerp(t, qb).normalized();
  return RigidTransform(geometry::orthonormalize(q.toRotationMatrix()),
                        a.translation() + t * (b.translation() - a.translation()));
}

}  // namespace

const char* to_string(GraspResult r) {
  switch (r) {
    case GraspResult::Success: return "success";
    case GraspResult::FailedEmpty: return "failed_empty";
    case GraspResult::FailedTimeout: return "failed_timeout";
    case GraspResult::FailedUnreachable: return "failed_unreachable";
  }
  return "?";
}

void ExecutorParams::validate(double stroke) const {
  const bool ok = force_max_advance > 0.0 && force_step > 0.0 && timeout_steps > 0 &&
                  pre_open_margin > 0.0 && pre_open_margin < stroke && closed_gap_threshold > 0.0 &&
                  push_limit > 0.0 && contact_tolerance > 0.0 && check_spacing > 0.0;
  if (!ok) throw ArgumentError("invalid executor parameters");
}

bool verify_grasp(double gap, double threshold) { return gap > threshold; }

std::pair<double, std::optional<std::size_t>> closure_gap(const scene::SceneState& scene,
                                                          const grasp::GripperModel& gripper,
                                                          const RigidTransform& tcp, double open_gap,
                                                          double tolerance) {
  const RigidTransform inv = tcp.inverse();
  const double half_w = 0.5 * gripper.finger_width;
  const double z_hi = gripper.tip_offset;
  const double z_lo = gripper.tip_offset - gripper.finger_length;
  const double reach = 0.5 * open_gap + tolerance;
  double lo_all = 0.0, hi_all = 0.0;
  bool any = false;
  double best = 0.0;
  std::optional<std::size_t> held;
  for (std::size_t o = 0; o < scene.poses.size(); ++o) {
    const RigidTransform to_tcp = inv * scene.poses[o];
    double lo = 0.0, hi = 0.0;
    bool inside = false;
    for (const auto& s : scene.object->samples) {
      const Vec3 p = to_tcp.apply(s);
      if (std::abs(p.y()) > half_w || p.z() < z_lo || p.z() > z_hi || std::abs(p.x()) > reach) continue;
      lo = inside ? std::min(lo, p.x()) : p.x();
      hi = inside ? std::max(hi, p.x()) : p.x();
      inside = true;
    }
    if (!inside) continue;
    lo_all = any ? std::min(lo_all, lo) : lo;
    hi_all = any ? std::max(hi_all, hi) : hi;
    any = true;
    if (hi - lo > best || !held) {
      best = hi - lo;
      held = o;
    }
  }
  if (!any) return {0.0, std::nullopt};
  return {std::min(hi_all - lo_all, open_gap), held};
}

std::pair<GraspOutcome, WorldState> execute_grasp(const grasp::JointPath& path,
                                                  const grasp::GraspCandidate& candidate,
                                                  const WorldState& world,
                                                  const kinematics::RobotModel& robot,
                                                  const grasp::GripperModel& gripper,
                                                  const ExecutorParams& params,
                                                  std::vector<TraceStep>* trace) {
  params.validate(gripper.stroke);
  if (path.waypoints.empty()) throw ArgumentError("empty path");
  if (!world.scene.object) throw ArgumentError("world has no object model");
  WorldState state = world;
  state.grasped.reset();
  GraspOutcome out;
  out.predicted = candidate.collision;
  out.grasp_type = candidate.type_id;

  const double open_gap = std::min(candidate.opening + params.pre_open_margin, gripper.stroke);
  const HandShape hand(gripper, open_gap);
  const auto bin_boxes = state.scene.bin.world_boxes();
  auto log = [&](const char* phase, const RigidTransform& t, bool contact) {
    if (trace) trace->push_back({out.steps, phase, t.translation(), contact});
  };

  // Approach along the planned path.
  RigidTransform tcp = kinematics::fk(robot, path.waypoints.front());
  bool reached = false;
  {
    const Contact c0 = find_contact(state.scene, bin_boxes, hand, tcp);
    ++out.steps;
    log("path", tcp, c0.any());
    out.collision = c0.any();
  }
  for (std::size_t i = 1; i < path.waypoints.size() && !out.collision; ++i) {
    const auto& qa = path.waypoints[i - 1];
    const auto& qb = path.waypoints[i];
    const RigidTransform ta = kinematics::fk(robot, qa);
    const RigidTransform tb = kinematics::fk(robot, qb);
    const double travel = (tb.translation() - ta.translation()).norm() +
                          0.1 * geometry::rotation_angle_between(ta, tb);
    const int n = std::max(1, static_cast<int>(std::ceil(travel / params.check_spacing)));
    for (int k = 1; k <= n; ++k) {
      kinematics::JointConfig q;
      for (std::size_t j = 0; j < 6; ++j) q[j] = qa[j] + (qb[j] - qa[j]) * (static_cast<double>(k) / n);
      const RigidTransform t = kinematics::fk(robot, q);
      const bool hit = find_contact(state.scene, bin_boxes, hand, t).any();
      ++out.steps;
      log("path", t, hit);
      if (hit) {
        out.collision = true;
        break;
      }
      tcp = t;
    }
  }
  if (!out.collision) {
    reached = true;
    tcp = candidate.tcp;
  }

  // Force mode: compliant Cartesian advance, pushing movable objects aside.
  if (!reached) {
    const RigidTransform goal = candidate.tcp;
    double advanced = 0.0;
    int used = 0;
    while (true) {
      const double remaining = (goal.translation() - tcp.translation()).norm();
      if (remaining <= 1e-9) {
        tcp = goal;
        reached = true;
        break;
      }
      if (used >= params.timeout_steps) break;
      const double adv = std::min(params.force_step, remaining);
      if (advanced + adv > params.force_max_advance + 1e-12) break;
      const RigidTransform next = interpolate(tcp, goal, adv / remaining);
      ++used;
      ++out.steps;
      scene::SceneState trial = state.scene;
      if (try_clear(trial, bin_boxes, hand, next, params)) {
        state.scene = std::move(trial);
        tcp = next;
        advanced += adv;
        log("force", tcp, true);
      } else {
        // The world is unchanged after a stall, so every later step stalls too.
        log("stall", next, true);
        out.steps += params.timeout_steps - used;
        used = params.timeout_steps;
      }
    }
    out.timeout = !reached;
  }

  // Close and verify.
  const auto [gap, held] = closure_gap(state.scene, gripper, tcp, open_gap, params.contact_tolerance);
  out.final_gap = gap;
  log("close", tcp, held.has_value());
  if (verify_grasp(gap, params.closed_gap_threshold) && held) {
    out.result = GraspResult::Success;
    state.grasped = *held;
    state.scene.poses.erase(state.scene.poses.begin() + static_cast<std::ptrdiff_t>(*held));
  } else {
    out.result = out.timeout ? GraspResult::FailedTimeout : GraspResult::FailedEmpty;
  }
  return {out, std::move(state)};
}

}  // namespace binpick::executor
