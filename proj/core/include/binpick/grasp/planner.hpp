#pragma once

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "binpick/geometry/point_cloud.hpp"
#include "binpick/geometry/spatial_index.hpp"
#include "binpick/grasp/grasps.hpp"
#include "binpick/grasp/gripper.hpp"
#include "binpick/kinematics/robot.hpp"
#include "binpick/scene/bin.hpp"
#include "binpick/scene/object_model.hpp"

namespace binpick::grasp {

using geometry::PointCloud;
using kinematics::IkSolution;
using kinematics::JointConfig;
using kinematics::RobotModel;

/// Predicted contact class, in priority order.
enum class CollisionClass { None = 0, Object = 1, Bin = 2, Rejected = 3 };

enum class RejectReason { None, Unreachable, BinNotCleared, BodyCollision };

const char* to_string(CollisionClass c);

struct GraspCandidate {
  std::size_t object = 0;  // index into the estimated object poses
  std::size_t grasp = 0;   // index into that object's grasp set
  RigidTransform tcp;      // base -> TCP
  std::vector<IkSolution> ik;
  CollisionClass collision = CollisionClass::None;
  RejectReason reason = RejectReason::None;
  int type_id = 0;
  double opening = 0.0;
};

struct PlannerParams {
  double target_exclusion = 0.003;  // scene points this close to the target are ignored
  double finger_margin = 0.002;     // dilation of the finger volume
  double sweep_length = 0.03;       // approach length covered by the object test
  double retreat = 0.02;            // bin-test retreat along TCP -z
  double pre_open_margin = 0.01;    // added to the grasp opening
  double joint_step = 0.02;         // path interpolation step (rad)
  double pregrasp_distance = 0.05;  // start of the straight approach (m)
  double contact_zone = 0.03;       // finger contact tolerated this close to the goal TCP
  std::array<double, 6> link_radius{0.06, 0.06, 0.05, 0.045, 0.045, 0.045};

  void validate() const;
  /// Finger gap used while approaching a grasp of width `opening`.
  double approach_gap(double opening, double stroke) const;
};

/// Perceived world for one planning cycle (all world frame).
struct PlanningScene {
  PointCloud cloud;  // scene points inside the bin cavity
  geometry::PointGrid index;
  scene::BinModel bin;  // pose = estimated bin pose
  std::vector<OrientedBox> bin_boxes;
  double table_height = 0.0;  // links must stay above this plane
  GripperModel gripper;
  std::shared_ptr<const scene::ObjectModel> object;
  std::vector<RigidTransform> object_poses;  // estimated
};

PlanningScene make_planning_scene(PointCloud cloud, const scene::BinModel& bin,
                                  const RigidTransform& bin_pose, const GripperModel& gripper,
                                  std::shared_ptr<const scene::ObjectModel> object,
                                  std::vector<RigidTransform> object_poses);

/// One candidate per (object, grasp) pair with its IK solutions. Candidates
/// without a solution are Rejected as unreachable.
std::vector<GraspCandidate> compose_candidates(std::span<const RigidTransform> object_poses,
                                               std::span<const std::vector<GraspPose>> grasp_sets,
                                               const RobotModel& robot);

/// Predicted class of a reachable candidate.
CollisionClass classify_collision(const GraspCandidate& candidate, const PlanningScene& world,
                                  const PlannerParams& params, RejectReason* reason = nullptr);

/// Classifies every reachable candidate in place.
void classify_all(std::vector<GraspCandidate>& candidates, const PlanningScene& world,
                  const PlannerParams& params);

struct RankedGrasp {
  std::size_t candidate = 0;  // index into the candidate list
  IkSolution solution;
  CollisionClass collision = CollisionClass::None;
  double distance = 0.0;  // joint distance to the current configuration
};

/// Rejected candidates removed, the rest flattened to (candidate, solution)
/// pairs and sorted by class, joint distance, object, grasp and branch.
/// Throws NoGraspError when nothing remains.
std::vector<RankedGrasp> order_candidates(std::span<const GraspCandidate> candidates,
                                          const JointConfig& current);

struct JointPath {
  std::vector<JointConfig> waypoints;
};

/// Per-joint representative of `goal` (modulo 2 pi, within limits) nearest to
/// `start`.
JointConfig nearest_equivalent(const RobotModel& robot, const JointConfig& start,
                               const JointConfig& goal);

/// Straight joint-space line from start to the nearest equivalent of goal with
/// ceil(distance / step) + 1 evenly spaced waypoints, every one collision
/// checked. With `target`, finger contact within the contact zone of its TCP
/// is tolerated and the fingers use its approach gap.
std::optional<JointPath> plan_path(const JointConfig& start, const JointConfig& goal,
                                   const PlanningScene& world, const RobotModel& robot,
                                   const PlannerParams& params,
                                   const GraspCandidate* target = nullptr);

/// True if the robot at q touches the bin, the table or the scene cloud.
bool in_collision(const JointConfig& q, const PlanningScene& world, const RobotModel& robot,
                  const PlannerParams& params, const GraspCandidate* target = nullptr);

struct GraspMotion {
  JointPath path;
  std::size_t approach_start = 0;  // waypoint index of the pregrasp configuration
};

/// Transfer to the pregrasp pose followed by the straight approach.
std::optional<GraspMotion> plan_grasp_motion(const JointConfig& start, const GraspCandidate& candidate,
                                             const IkSolution& solution, const PlanningScene& world,
                                             const RobotModel& robot, const PlannerParams& params);

}  // namespace binpick::grasp
