#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "binpick/grasp/gripper.hpp"
#include "binpick/grasp/planner.hpp"
#include "binpick/kinematics/robot.hpp"
#include "binpick/scene/scene.hpp"

namespace binpick::executor {

using geometry::RigidTransform;
using geometry::Vec3;

enum class GraspResult { Success, FailedEmpty, FailedTimeout, FailedUnreachable };

const char* to_string(GraspResult r);

struct ExecutorParams {
  double force_max_advance = 0.04;   // Cartesian distance allowed in force mode (m)
  double force_step = 0.002;         // per force-mode step (m)
  int timeout_steps = 20;
  double pre_open_margin = 0.01;     // added to the grasp opening
  double closed_gap_threshold = 0.002;
  double push_limit = 0.005;         // largest object displacement per step (m)
  double contact_tolerance = 0.0005; // closure proximity and push clearance (m)
  double check_spacing = 0.002;      // TCP travel between contact checks on the path (m)

  void validate(double stroke) const;
};

struct GraspOutcome {
  GraspResult result = GraspResult::FailedEmpty;
  bool collision = false;
  grasp::CollisionClass predicted = grasp::CollisionClass::None;
  bool timeout = false;
  int grasp_type = 0;
  int steps = 0;             // contact checks on the path plus force-mode steps
  double final_gap = 0.0;
};

struct WorldState {
  scene::SceneState scene;
  std::optional<std::size_t> grasped;  // index the picked object had before removal
};

struct TraceStep {
  int step = 0;
  std::string phase;  // "path", "force", "stall", "close"
  Vec3 tcp = Vec3::Zero();
  bool contact = false;
};

/// Runs the approach, force mode, closure and verification against the
/// ground-truth scene. On success the grasped object is removed from the
/// returned world.
std::pair<GraspOutcome, WorldState> execute_grasp(const grasp::JointPath& path,
                                                  const grasp::GraspCandidate& candidate,
                                                  const WorldState& world,
                                                  const kinematics::RobotModel& robot,
                                                  const grasp::GripperModel& gripper,
                                                  const ExecutorParams& params,
                                                  std::vector<TraceStep>* trace = nullptr);

/// Fingers stopped short of closing: gap strictly above the threshold.
bool verify_grasp(double gap, double threshold);

/// Width the fingers close to when centred at `tcp` (world), and the object
/// they hold (largest enclosed width), if any.
std::pair<double, std::optional<std::size_t>> closure_gap(const scene::SceneState& scene,
                                                          const grasp::GripperModel& gripper,
                                                          const RigidTransform& tcp, double open_gap,
                                                          double tolerance);

}  // namespace binpick::executor
