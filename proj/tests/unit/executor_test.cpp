#include <gtest/gtest.h>

#include "binpick/errors.hpp"
#include "binpick/executor/executor.hpp"
#include "workcell.hpp"

using namespace binpick;
using namespace binpick::executor;
using geometry::RigidTransform;
using geometry::Vec3;
namespace tk = binpick::testing;

namespace {

struct Cell {
  kinematics::RobotModel robot = kinematics::RobotModel::ur5();
  grasp::GripperModel gripper;
  grasp::PlannerParams planner;
  ExecutorParams params;
  std::vector<grasp::GraspPose> grasps = tk::test_grasps();
  scene::BinModel bin = tk::test_bin();
};

WorldState make_world(const Cell& s, std::vector<RigidTransform> truth, const scene::BinModel& bin) {
  WorldState w;
  w.scene.bin = bin;
  w.scene.object = tk::test_cylinder();
  w.scene.poses = std::move(truth);
  return w;
}

struct Attempt {
  grasp::GraspCandidate candidate;
  grasp::JointPath path;
};

/// Plans the downward side grasp on `estimate` in a world that only knows the
/// bin floor, so the executor meets any clutter unannounced.
Attempt plan_top_grasp(const Cell& s, const RigidTransform& estimate, const scene::BinModel& bin) {
  const auto world = grasp::make_planning_scene(tk::sampled_cloud({}), bin, bin.pose, s.gripper,
                                                tk::test_cylinder(), {estimate});
  auto cands = grasp::compose_candidates(std::vector<RigidTransform>{estimate},
                                         std::vector<std::vector<grasp::GraspPose>>{s.grasps}, s.robot);
  auto c = cands[tk::top_side_grasp(s.grasps, estimate)];
  c.collision = grasp::classify_collision(c, world, s.planner);
  const auto scan = tk::scan_config(s.robot);
  for (const auto& sol : c.ik) {
    if (auto m = grasp::plan_grasp_motion(scan, c, sol, world, s.robot, s.planner)) {
      return {c, m->path};
    }
  }
  throw std::runtime_error("no motion for the test grasp");
}

void expect_invariants(const WorldState& before, const GraspOutcome& out, const WorldState& after) {
  const bool success = out.result == GraspResult::Success;
  EXPECT_EQ(after.scene.poses.size() + (success ? 1 : 0), before.scene.poses.size());
  EXPECT_EQ(after.grasped.has_value(), success);
  if (!out.collision) EXPECT_FALSE(out.timeout);
  if (success) EXPECT_TRUE(verify_grasp(out.final_gap, ExecutorParams{}.closed_gap_threshold));
  EXPECT_NE(out.result, GraspResult::FailedUnreachable);
}

}  // namespace

TEST(VerifyGrasp, StrictThreshold) {
  EXPECT_FALSE(verify_grasp(0.0, 0.002));
  EXPECT_FALSE(verify_grasp(0.002, 0.002));
  EXPECT_TRUE(verify_grasp(0.0021, 0.002));
  EXPECT_TRUE(verify_grasp(2 * tk::kRadius, 0.002));
}

TEST(ExecutorParams, Validation) {
  ExecutorParams p;
  EXPECT_NO_THROW(p.validate(0.05));
  p.pre_open_margin = 0.05;
  EXPECT_THROW(p.validate(0.05), ArgumentError);
  p = ExecutorParams{};
  p.force_step = 0.0;
  EXPECT_THROW(p.validate(0.05), ArgumentError);
  p = ExecutorParams{};
  p.timeout_steps = 0;
  EXPECT_THROW(p.validate(0.05), ArgumentError);
}

TEST(Executor, NominalGraspSucceedsWithoutContact) {
  Cell s;
  const auto obj = tk::lying_pose(0.45, 0.0);
  const auto world = make_world(s, {obj, tk::lying_pose(0.40, 0.06)}, s.bin);
  const auto a = plan_top_grasp(s, obj, s.bin);
  EXPECT_EQ(a.candidate.collision, grasp::CollisionClass::None);
  const auto [out, next] = execute_grasp(a.path, a.candidate, world, s.robot, s.gripper, s.params);
  EXPECT_EQ(out.result, GraspResult::Success);
  EXPECT_FALSE(out.collision);
  EXPECT_FALSE(out.timeout);
  EXPECT_EQ(out.grasp_type, 1);
  EXPECT_EQ(out.predicted, grasp::CollisionClass::None);
  EXPECT_NEAR(out.final_gap, 2 * tk::kRadius, 2e-3);
  ASSERT_TRUE(next.grasped.has_value());
  EXPECT_EQ(*next.grasped, 0u);
  ASSERT_EQ(next.scene.poses.size(), 1u);
  EXPECT_TRUE(geometry::is_rotation(next.scene.poses[0].rotation()));
  EXPECT_LT((next.scene.poses[0].translation() - Vec3(0.40, 0.06, tk::kRadius)).norm(), 1e-12);
  expect_invariants(world, out, next);
}

TEST(Executor, EstimateAboveObjectClosesEmpty) {
  Cell s;
  const auto obj = tk::lying_pose(0.45, 0.0);
  const auto world = make_world(s, {obj}, s.bin);
  // 3 cm pose error: the fingertips stop above the object.
  const auto est = RigidTransform::from_translation({0, 0, 0.03}) * obj;
  const auto a = plan_top_grasp(s, est, s.bin);
  const auto [out, next] = execute_grasp(a.path, a.candidate, world, s.robot, s.gripper, s.params);
  EXPECT_EQ(out.result, GraspResult::FailedEmpty);
  EXPECT_FALSE(out.collision);
  EXPECT_DOUBLE_EQ(out.final_gap, 0.0);
  EXPECT_EQ(next.scene.poses.size(), 1u);
  expect_invariants(world, out, next);
}

TEST(Executor, WedgedNeighboursTimeOut) {
  Cell s;
  // Narrow bin: neighbours sit 2 mm from the target and touch the side walls,
  // so the 8 mm fingers cannot get between them.
  auto bin = s.bin;
  bin.cavity.y() = 0.094;
  const auto obj = tk::lying_pose(0.45, 0.0);
  const auto world = make_world(s, {obj, tk::lying_pose(0.45, 0.032), tk::lying_pose(0.45, -0.032)}, bin);
  const auto a = plan_top_grasp(s, obj, bin);
  std::vector<TraceStep> trace;
  const auto [out, next] = execute_grasp(a.path, a.candidate, world, s.robot, s.gripper, s.params, &trace);
  EXPECT_EQ(out.result, GraspResult::FailedTimeout);
  EXPECT_TRUE(out.collision);
  EXPECT_TRUE(out.timeout);
  EXPECT_EQ(next.scene.poses.size(), 3u);
  ASSERT_FALSE(trace.empty());
  EXPECT_EQ(trace.back().phase, "close");
  bool forced = false;
  for (const auto& t : trace) forced = forced || t.phase == "force" || t.phase == "stall";
  EXPECT_TRUE(forced);
  expect_invariants(world, out, next);
}

TEST(Executor, LooseNeighbourIsPushedAside) {
  Cell s;
  const auto obj = tk::lying_pose(0.45, 0.0);
  // 5 mm surface gap: a finger clips the neighbour, which is free to move.
  const auto neighbour = tk::lying_pose(0.45, 0.035);
  const auto world = make_world(s, {obj, neighbour}, s.bin);
  const auto a = plan_top_grasp(s, obj, s.bin);
  const auto [out, next] = execute_grasp(a.path, a.candidate, world, s.robot, s.gripper, s.params);
  EXPECT_TRUE(out.collision);
  EXPECT_EQ(out.result, GraspResult::Success);
  ASSERT_EQ(next.scene.poses.size(), 1u);
  const double moved = (next.scene.poses[0].translation() - neighbour.translation()).norm();
  EXPECT_GT(moved, 0.0);
  EXPECT_LE(moved, s.params.timeout_steps * s.params.push_limit);
  expect_invariants(world, out, next);
}

TEST(Executor, RepeatedExecutionIsIdentical) {
  Cell s;
  const auto obj = tk::lying_pose(0.45, 0.0);
  for (const auto& truth : {std::vector<RigidTransform>{obj},
                            std::vector<RigidTransform>{obj, tk::lying_pose(0.45, 0.035)}}) {
    const auto world = make_world(s, truth, s.bin);
    const auto a = plan_top_grasp(s, obj, s.bin);
    const auto [o1, w1] = execute_grasp(a.path, a.candidate, world, s.robot, s.gripper, s.params);
    const auto [o2, w2] = execute_grasp(a.path, a.candidate, world, s.robot, s.gripper, s.params);
    EXPECT_EQ(o1.result, o2.result);
    EXPECT_EQ(o1.collision, o2.collision);
    EXPECT_EQ(o1.timeout, o2.timeout);
    EXPECT_EQ(o1.steps, o2.steps);
    EXPECT_EQ(o1.final_gap, o2.final_gap);
    ASSERT_EQ(w1.scene.poses.size(), w2.scene.poses.size());
    for (std::size_t i = 0; i < w1.scene.poses.size(); ++i) {
      EXPECT_EQ(w1.scene.poses[i].matrix(), w2.scene.poses[i].matrix());
    }
  }
}

TEST(ClosureGap, MeasuresEnclosedWidth) {
  Cell s;
  const auto obj = tk::lying_pose(0.45, 0.0);
  auto world = make_world(s, {obj}, s.bin);
  const auto tcp = obj * s.grasps[tk::top_side_grasp(s.grasps, obj)].object_to_tcp;
  const auto [gap, held] = closure_gap(world.scene, s.gripper, tcp, 0.04, s.params.contact_tolerance);
  EXPECT_NEAR(gap, 2 * tk::kRadius, 2e-3);
  ASSERT_TRUE(held.has_value());
  EXPECT_EQ(*held, 0u);
  const auto far = RigidTransform::from_translation({0.05, 0.0, 0.0}) * tcp;
  const auto [gap2, held2] = closure_gap(world.scene, s.gripper, far, 0.04, s.params.contact_tolerance);
  EXPECT_DOUBLE_EQ(gap2, 0.0);
  EXPECT_FALSE(held2.has_value());
}
