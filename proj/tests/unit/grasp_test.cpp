#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "binpick/errors.hpp"
#include "binpick/grasp/grasps.hpp"
#include "binpick/grasp/gripper.hpp"
#include "binpick/grasp/planner.hpp"
#include "oracles.hpp"
#include "planning_oracles.hpp"
#include "workcell.hpp"

using namespace binpick;
using namespace binpick::grasp;
using binpick::geometry::Mat3;
namespace tk = binpick::testing;

namespace {

constexpr double kPi = std::numbers::pi;

GraspDefinition side_definition(double step) {
  return cylinder_grasps(tk::kRadius, tk::kLength, 0.01, step)[0];
}

bool same_pose(const RigidTransform& a, const RigidTransform& b, double tol) {
  return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff() <= tol;
}

double axis_distance(const Vec3& p, const Vec3& axis) {
  return (p - p.dot(axis) * axis).norm();
}

double fk_residual(const kinematics::RobotModel& robot, const kinematics::JointConfig& q,
                   const RigidTransform& target) {
  return (kinematics::fk(robot, q).matrix() - target.matrix()).cwiseAbs().maxCoeff();
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("binpick_grasp_" + name);
}

struct Fixture {
  kinematics::RobotModel robot = kinematics::RobotModel::ur5();
  GripperModel gripper;
  PlannerParams params;
  std::vector<GraspPose> grasps = tk::test_grasps();
};

GraspCandidate single_candidate(const Fixture& f, const RigidTransform& object, std::size_t grasp) {
  const std::vector<RigidTransform> poses{object};
  const std::vector<std::vector<GraspPose>> sets{f.grasps};
  auto c = compose_candidates(poses, sets, f.robot);
  return c[grasp];
}

}  // namespace

// Generation

TEST(Grasps, ThirtyDegreeStepGivesTwentyFour) {
  EXPECT_EQ(generate_cylindrical_grasps(side_definition(kPi / 6)).size(), 24u);
}

TEST(Grasps, FullTurnStepGivesSeedAndFlip) {
  const auto def = side_definition(2 * kPi);
  const auto out = generate_cylindrical_grasps(def);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_TRUE(same_pose(out[0], def.seed, 1e-12));
  EXPECT_TRUE(same_pose(out[1], def.seed * RigidTransform::rot_z(kPi), 1e-12));
}

TEST(Grasps, EndGraspFlipCoincidesWithRotation) {
  const auto defs = cylinder_grasps(tk::kRadius, tk::kLength, 0.01, kPi / 6);
  ASSERT_EQ(defs.size(), 3u);
  EXPECT_EQ(generate_cylindrical_grasps(defs[1]).size(), 12u);
  EXPECT_EQ(generate_cylindrical_grasps(defs[2]).size(), 12u);
}

TEST(Grasps, NoDuplicatePoses) {
  for (const auto& def : cylinder_grasps(tk::kRadius, tk::kLength, 0.01, kPi / 6)) {
    const auto out = generate_cylindrical_grasps(def);
    for (std::size_t i = 0; i < out.size(); ++i) {
      for (std::size_t j = i + 1; j < out.size(); ++j) EXPECT_FALSE(same_pose(out[i], out[j], 1e-9));
    }
  }
}

TEST(Grasps, OrderIsRotationThenFlip) {
  const auto def = side_definition(kPi / 2);
  const auto out = generate_cylindrical_grasps(def);
  ASSERT_EQ(out.size(), 8u);
  for (int k = 0; k < 4; ++k) {
    const auto r = RigidTransform::from_axis_angle(def.axis, k * kPi / 2) * def.seed;
    EXPECT_TRUE(same_pose(out[2 * k], r, 1e-12));
    EXPECT_TRUE(same_pose(out[2 * k + 1], r * RigidTransform::rot_z(kPi), 1e-12));
  }
}

TEST(Grasps, TcpToAxisDistancePreserved) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    GraspDefinition def;
    def.seed = tk::random_transform(rng, 0.05, kPi);
    def.axis = tk::random_transform(rng, 0.0, kPi).rotation().col(0);
    def.step = 2 * kPi / (1 + trial % 12);
    def.opening = 0.02;
    const double expected = axis_distance(def.seed.translation(), def.axis);
    for (const auto& g : generate_cylindrical_grasps(def)) {
      EXPECT_NEAR(axis_distance(g.translation(), def.axis), expected, 1e-12);
    }
  }
}

TEST(Grasps, SetInvariantUnderAxisStep) {
  for (const auto& def : cylinder_grasps(tk::kRadius, tk::kLength, 0.01, kPi / 6)) {
    const auto out = generate_cylindrical_grasps(def);
    const auto step = RigidTransform::from_axis_angle(def.axis, def.step);
    std::vector<bool> hit(out.size(), false);
    for (const auto& g : out) {
      const auto moved = step * g;
      std::size_t matches = 0;
      for (std::size_t j = 0; j < out.size(); ++j) {
        if (same_pose(moved, out[j], 1e-9)) {
          ++matches;
          hit[j] = true;
        }
      }
      EXPECT_EQ(matches, 1u);
    }
    for (bool h : hit) EXPECT_TRUE(h);
  }
}

TEST(Grasps, StepMustDivideFullTurn) {
  auto def = side_definition(kPi / 6);
  def.step = 7.0 * kPi / 180.0;
  EXPECT_THROW(generate_cylindrical_grasps(def), ArgumentError);
  def.step = 0.0;
  EXPECT_THROW(generate_cylindrical_grasps(def), ArgumentError);
}

TEST(Grasps, OpeningMustFitStroke) {
  auto def = side_definition(kPi / 6);
  def.opening = 0.06;
  EXPECT_THROW(def.validate(0.05), ArgumentError);
  EXPECT_NO_THROW(def.validate(0.06));
}

TEST(Grasps, ExpandCarriesTypeAndOpening) {
  const auto defs = cylinder_grasps(tk::kRadius, tk::kLength, 0.01, kPi / 6);
  const auto all = expand_grasps(defs, 0.05);
  ASSERT_EQ(all.size(), 48u);
  EXPECT_EQ(all.front().type_id, 1);
  EXPECT_EQ(all.back().type_id, 3);
  for (const auto& g : all) EXPECT_DOUBLE_EQ(g.opening, 2 * tk::kRadius);
}

// File format

TEST(GraspFile, RoundTrip) {
  const auto defs = cylinder_grasps(tk::kRadius, tk::kLength, 0.01, kPi / 6);
  const auto path = temp_file("roundtrip.grasps");
  save_grasps(defs, path);
  const auto back = load_grasps(path);
  ASSERT_EQ(back.size(), defs.size());
  for (std::size_t i = 0; i < defs.size(); ++i) {
    EXPECT_EQ(back[i].type_id, defs[i].type_id);
    EXPECT_TRUE(same_pose(back[i].seed, defs[i].seed, 1e-12));
    EXPECT_NEAR((back[i].axis - defs[i].axis).norm(), 0.0, 1e-12);
    EXPECT_NEAR(back[i].step, defs[i].step, 1e-12);
    EXPECT_NEAR(back[i].opening, defs[i].opening, 1e-12);
  }
  std::filesystem::remove(path);
}

TEST(GraspFile, ShippedFileLoads) {
  const char* dir = std::getenv("BINPICK_DATA_DIR");
  if (!dir) GTEST_SKIP() << "BINPICK_DATA_DIR not set";
  const auto defs = load_grasps(std::filesystem::path(dir) / "cylinder.grasps");
  EXPECT_EQ(defs.size(), 3u);
  EXPECT_EQ(expand_grasps(defs, 0.05).size(), 48u);
}

TEST(GraspFile, MalformedInputThrowsParseError) {
  const auto path = temp_file("bad.grasps");
  {
    std::ofstream out(path);
    out << "grasp 1\nseed 1 0 0\n";
  }
  EXPECT_THROW(load_grasps(path), ParseError);
  {
    std::ofstream out(path);
    out << "# nothing here\n";
  }
  EXPECT_THROW(load_grasps(path), ParseError);
  {
    std::ofstream out(path);
    out << "grasp 1\nseed 1 0 0 0 0 1 0 0 0 0 1 0 0 0 0 1\naxis 0 0 1\nstep abc\nopening 30\n";
  }
  EXPECT_THROW(load_grasps(path), ParseError);
  std::filesystem::remove(path);
}

// Composition

TEST(Compose, IdentityObjectGivesGraspSet) {
  Fixture f;
  const std::vector<RigidTransform> poses{RigidTransform::identity()};
  const std::vector<std::vector<GraspPose>> sets{f.grasps};
  const auto c = compose_candidates(poses, sets, f.robot);
  ASSERT_EQ(c.size(), f.grasps.size());
  for (std::size_t m = 0; m < c.size(); ++m) {
    EXPECT_TRUE(same_pose(c[m].tcp, f.grasps[m].object_to_tcp, 1e-15));
    EXPECT_EQ(c[m].grasp, m);
    EXPECT_EQ(c[m].type_id, f.grasps[m].type_id);
  }
}

TEST(Compose, CandidatesAreProductsWithVerifiedIk) {
  Fixture f;
  const std::vector<RigidTransform> poses{tk::lying_pose(0.45, 0.0),
                                          tk::lying_pose(0.40, 0.03)};
  const std::vector<std::vector<GraspPose>> sets{f.grasps, f.grasps};
  const auto c = compose_candidates(poses, sets, f.robot);
  ASSERT_EQ(c.size(), 2 * f.grasps.size());
  std::size_t reachable = 0;
  for (const auto& cand : c) {
    EXPECT_TRUE(same_pose(cand.tcp, poses[cand.object] * f.grasps[cand.grasp].object_to_tcp, 1e-15));
    EXPECT_LE(cand.ik.size(), 8u);
    for (const auto& s : cand.ik) EXPECT_LT(fk_residual(f.robot, s.q, cand.tcp), 1e-6);
    if (cand.ik.empty()) {
      EXPECT_EQ(cand.collision, CollisionClass::Rejected);
      EXPECT_EQ(cand.reason, RejectReason::Unreachable);
    } else {
      ++reachable;
    }
  }
  EXPECT_GT(reachable, 0u);
}

TEST(Compose, MismatchedSetsThrow) {
  Fixture f;
  const std::vector<RigidTransform> poses{RigidTransform::identity(), RigidTransform::identity()};
  const std::vector<std::vector<GraspPose>> sets{f.grasps};
  EXPECT_THROW(compose_candidates(poses, sets, f.robot), ArgumentError);
}

TEST(Compose, FarAwayObjectIsUnreachable) {
  Fixture f;
  const std::vector<RigidTransform> poses{RigidTransform::from_translation({3.0, 0.0, 0.0})};
  const std::vector<std::vector<GraspPose>> sets{f.grasps};
  for (const auto& c : compose_candidates(poses, sets, f.robot)) {
    EXPECT_EQ(c.collision, CollisionClass::Rejected);
    EXPECT_EQ(c.reason, RejectReason::Unreachable);
  }
}

// Collision classification

TEST(Classify, IsolatedObjectTopGraspIsNone) {
  Fixture f;
  const auto obj = tk::lying_pose(0.45, 0.0);
  const auto world = tk::test_world(tk::sampled_cloud({obj}), {obj});
  const auto c = single_candidate(f, obj, tk::top_side_grasp(f.grasps, obj));
  ASSERT_FALSE(c.ik.empty());
  RejectReason r;
  EXPECT_EQ(classify_collision(c, world, f.params, &r), CollisionClass::None);
  EXPECT_EQ(r, RejectReason::None);
}

TEST(Classify, NeighbourInFingerVolumeIsObject) {
  Fixture f;
  const auto obj = tk::lying_pose(0.45, 0.0);
  const auto c = single_candidate(f, obj, tk::top_side_grasp(f.grasps, obj));
  const double gap = f.params.approach_gap(c.opening, f.gripper.stroke);
  const auto finger = f.gripper.fingers(gap)[0].transformed(c.tcp);
  auto cloud = tk::sampled_cloud({obj});
  cloud.points.push_back(finger.pose.translation());
  const auto world = tk::test_world(cloud, {obj});
  EXPECT_EQ(classify_collision(c, world, f.params), CollisionClass::Object);
}

TEST(Classify, TargetPointsAreIgnored) {
  Fixture f;
  const auto obj = tk::lying_pose(0.45, 0.0);
  // Dense target samples, some of them touch the swept volume near the pads.
  const auto world = tk::test_world(tk::sampled_cloud({obj}, 0.0015), {obj});
  const auto c = single_candidate(f, obj, tk::top_side_grasp(f.grasps, obj));
  EXPECT_EQ(classify_collision(c, world, f.params), CollisionClass::None);
}

TEST(Classify, FingertipsInFloorClearedByRetreatIsBin) {
  Fixture f;
  // Estimate sunk 1 cm: the fingertips end inside the floor slab.
  const auto est = tk::lying_pose(0.45, 0.0) * RigidTransform::from_translation({0.01, 0, 0});
  const auto world = tk::test_world(tk::sampled_cloud({}), {est});
  const auto c = single_candidate(f, est, tk::top_side_grasp(f.grasps, est));
  RejectReason r;
  EXPECT_EQ(classify_collision(c, world, f.params, &r), CollisionClass::Bin);
  EXPECT_EQ(r, RejectReason::None);
}

TEST(Classify, FingerInsideWallIsRejected) {
  Fixture f;
  // Axis along y next to the +x wall: the outer finger overlaps the wall for
  // its full height, so retreating does not help.
  const auto est = RigidTransform::from_axis_angle(Vec3::UnitX(), kPi / 2,
                                                   {0.45 + 0.12 - 0.02, 0.0, tk::kRadius});
  const auto world = tk::test_world(tk::sampled_cloud({}), {est});
  const auto c = single_candidate(f, est, tk::top_side_grasp(f.grasps, est));
  ASSERT_FALSE(c.ik.empty());
  RejectReason r;
  EXPECT_EQ(classify_collision(c, world, f.params, &r), CollisionClass::Rejected);
  EXPECT_EQ(r, RejectReason::BinNotCleared);
}

TEST(Classify, BodyTouchingCloudIsRejected) {
  Fixture f;
  const auto obj = tk::lying_pose(0.45, 0.0);
  const auto c = single_candidate(f, obj, tk::top_side_grasp(f.grasps, obj));
  auto cloud = tk::sampled_cloud({obj});
  cloud.points.push_back(f.gripper.body().transformed(c.tcp).pose.translation());
  const auto world = tk::test_world(cloud, {obj});
  RejectReason r;
  EXPECT_EQ(classify_collision(c, world, f.params, &r), CollisionClass::Rejected);
  EXPECT_EQ(r, RejectReason::BodyCollision);
}

TEST(Classify, MonotoneInClutter) {
  Fixture f;
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> ux(0.40, 0.50), uy(-0.04, 0.04), u(-1.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const auto obj = tk::lying_pose(ux(rng), uy(rng)) * RigidTransform::rot_z(kPi * u(rng));
    const auto cloud = tk::sampled_cloud({obj});
    const auto base_world = tk::test_world(cloud, {obj});
    auto cands = compose_candidates(std::vector<RigidTransform>{obj},
                                    std::vector<std::vector<GraspPose>>{f.grasps}, f.robot);
    for (auto& c : cands) {
      if (c.ik.empty()) continue;
      const auto before = classify_collision(c, base_world, f.params);
      const double gap = f.params.approach_gap(c.opening, f.gripper.stroke);
      const auto finger = f.gripper.fingers(gap)[trial % 2];
      auto cluttered = cloud;
      for (int k = 0; k < 5; ++k) {
        const Vec3 local(finger.half_extents.x() * u(rng), finger.half_extents.y() * u(rng),
                         finger.half_extents.z() * u(rng));
        cluttered.points.push_back(c.tcp.apply(finger.pose.apply(local)));
      }
      const auto after = classify_collision(c, tk::test_world(cluttered, {obj}), f.params);
      EXPECT_NE(after, CollisionClass::None);
      if (before == CollisionClass::Object || before == CollisionClass::Rejected) {
        EXPECT_NE(after, CollisionClass::None);
      }
    }
  }
}

TEST(Classify, ClassifyAllLeavesUnreachableAlone) {
  Fixture f;
  const std::vector<RigidTransform> poses{tk::lying_pose(0.45, 0.0),
                                          RigidTransform::from_translation({3.0, 0, 0})};
  auto c = compose_candidates(poses, std::vector<std::vector<GraspPose>>{f.grasps, f.grasps}, f.robot);
  const auto world = tk::test_world(tk::sampled_cloud({poses[0]}), poses);
  classify_all(c, world, f.params);
  for (const auto& cand : c) {
    if (cand.object == 1) EXPECT_EQ(cand.reason, RejectReason::Unreachable);
    if (!cand.ik.empty()) {
      RejectReason r;
      EXPECT_EQ(cand.collision, classify_collision(cand, world, f.params, &r));
      EXPECT_EQ(cand.reason, r);
    }
  }
}

// Ordering

TEST(Order, ClassDominatesDistance) {
  GraspCandidate near_obj, far_none;
  near_obj.collision = CollisionClass::Object;
  near_obj.ik.push_back({kinematics::JointConfig{}, 0});
  far_none.collision = CollisionClass::None;
  kinematics::JointConfig far;
  far[0] = 2.0;
  far_none.ik.push_back({far, 0});
  far_none.object = 1;
  const std::vector<GraspCandidate> c{near_obj, far_none};
  const auto r = order_candidates(c, kinematics::JointConfig{});
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0].candidate, 1u);
  EXPECT_EQ(r[0].collision, CollisionClass::None);
}

TEST(Order, SmallerChebyshevDistanceFirst) {
  GraspCandidate a, b;
  kinematics::JointConfig qa, qb;
  qa[0] = 0.3;
  qa[1] = 0.3;  // Chebyshev 0.3, L1 0.6
  qb[2] = 0.5;  // Chebyshev 0.5, L1 0.5
  a.ik.push_back({qa, 0});
  b.ik.push_back({qb, 0});
  const std::vector<GraspCandidate> c{b, a};
  const auto r = order_candidates(c, kinematics::JointConfig{});
  EXPECT_EQ(r[0].candidate, 1u);
  EXPECT_DOUBLE_EQ(r[0].distance, 0.3);
}

TEST(Order, RejectedDroppedAndEmptyThrows) {
  GraspCandidate rej;
  rej.collision = CollisionClass::Rejected;
  rej.ik.push_back({kinematics::JointConfig{}, 0});
  const std::vector<GraspCandidate> c{rej};
  EXPECT_THROW(order_candidates(c, kinematics::JointConfig{}), NoGraspError);
  EXPECT_THROW(order_candidates(std::vector<GraspCandidate>{}, kinematics::JointConfig{}), NoGraspError);
}

TEST(Order, MatchesBruteForceOracle) {
  std::mt19937_64 rng(23);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto cands = tk::random_candidates(rng, 100);
    kinematics::JointConfig current;
    for (std::size_t j = 0; j < 6; ++j) current[j] = 0.25 * static_cast<int>(rng() % 9) - 1.0;
    const auto expected = tk::oracle_order(cands, current);
    if (expected.empty()) {
      EXPECT_THROW(order_candidates(cands, current), NoGraspError);
      continue;
    }
    const auto got = order_candidates(cands, current);
    ASSERT_EQ(got.size(), expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      EXPECT_EQ(got[i].candidate, expected[i].candidate);
      EXPECT_EQ(got[i].solution.branch, expected[i].branch);
    }
    for (std::size_t i = 1; i < got.size(); ++i) {
      EXPECT_LE(static_cast<int>(got[i - 1].collision), static_cast<int>(got[i].collision));
      if (got[i - 1].collision == got[i].collision) EXPECT_LE(got[i - 1].distance, got[i].distance);
    }
    ++checked;
  }
  EXPECT_GT(checked, 150);
}

TEST(Order, SelectedSolutionsReachTheirTcp) {
  Fixture f;
  const auto obj = tk::lying_pose(0.45, 0.0);
  auto c = compose_candidates(std::vector<RigidTransform>{obj},
                              std::vector<std::vector<GraspPose>>{f.grasps}, f.robot);
  classify_all(c, tk::test_world(tk::sampled_cloud({obj}), {obj}), f.params);
  for (const auto& r : order_candidates(c, tk::scan_config(f.robot))) {
    EXPECT_LT(fk_residual(f.robot, r.solution.q, c[r.candidate].tcp), 1e-6);
  }
}

// Paths

TEST(Path, StartEqualsGoalIsSingleWaypoint) {
  Fixture f;
  const auto world = tk::test_world(tk::sampled_cloud({}), {});
  const auto q = tk::scan_config(f.robot);
  const auto p = plan_path(q, q, world, f.robot, f.params);
  ASSERT_TRUE(p.has_value());
  ASSERT_EQ(p->waypoints.size(), 1u);
  EXPECT_EQ(p->waypoints[0], q);
}

TEST(Path, FreeLiftHasExpectedWaypointCount) {
  Fixture f;
  const auto world = tk::test_world(tk::sampled_cloud({}), {});
  const auto start = tk::scan_config(f.robot);
  Mat3 r;
  r << 1, 0, 0, 0, -1, 0, 0, 0, -1;
  const auto goal_sols = kinematics::ik(f.robot, RigidTransform(r, {0.45, 0.0, 0.5}));
  const kinematics::IkSolution* same_branch = nullptr;
  for (const auto& s : goal_sols) {
    if (!same_branch || kinematics::joint_distance(s.q, start) < kinematics::joint_distance(same_branch->q, start)) {
      same_branch = &s;
    }
  }
  ASSERT_NE(same_branch, nullptr);
  const auto goal = nearest_equivalent(f.robot, start, same_branch->q);
  const auto p = plan_path(start, same_branch->q, world, f.robot, f.params);
  ASSERT_TRUE(p.has_value());
  const double d = kinematics::joint_distance(start, goal);
  EXPECT_EQ(p->waypoints.size(), static_cast<std::size_t>(std::ceil(d / f.params.joint_step)) + 1);
  EXPECT_EQ(p->waypoints.front(), start);
  EXPECT_LT(kinematics::joint_distance(p->waypoints.back(), goal), 1e-12);
  for (std::size_t i = 1; i < p->waypoints.size(); ++i) {
    EXPECT_LE(kinematics::joint_distance(p->waypoints[i - 1], p->waypoints[i]), f.params.joint_step + 1e-12);
  }
}

TEST(Path, GoalInsideWallIsInfeasible) {
  Fixture f;
  const auto world = tk::test_world(tk::sampled_cloud({}), {});
  Mat3 r;
  r << 0, 1, 0, 1, 0, 0, 0, 0, -1;
  // TCP in the middle of the +x wall, half way up, fingers along the wall.
  const auto goal_sols = kinematics::ik(f.robot, RigidTransform(r, {0.45 + 0.1225, 0.0, 0.05}));
  ASSERT_FALSE(goal_sols.empty());
  const auto start = tk::scan_config(f.robot);
  for (const auto& s : goal_sols) {
    EXPECT_TRUE(in_collision(s.q, world, f.robot, f.params));
    EXPECT_FALSE(plan_path(start, s.q, world, f.robot, f.params).has_value());
  }
}

TEST(Path, NearestEquivalentStaysWithinPi) {
  Fixture f;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2 * kPi, 2 * kPi);
  for (int trial = 0; trial < 200; ++trial) {
    kinematics::JointConfig a, b;
    for (std::size_t j = 0; j < 6; ++j) {
      a[j] = u(rng);
      b[j] = u(rng);
    }
    const auto n = nearest_equivalent(f.robot, a, b);
    EXPECT_TRUE(f.robot.within_limits(n));
    for (std::size_t j = 0; j < 6; ++j) {
      EXPECT_NEAR(kinematics::wrap_angle(n[j] - b[j]), 0.0, 1e-9);
    }
    EXPECT_NEAR(kinematics::joint_distance(a, n), kinematics::joint_distance(a, b), 1e-9);
  }
}

TEST(Path, GraspMotionEndsAtSolution) {
  Fixture f;
  const auto obj = tk::lying_pose(0.45, 0.0);
  const auto world = tk::test_world(tk::sampled_cloud({obj}), {obj});
  auto c = compose_candidates(std::vector<RigidTransform>{obj},
                              std::vector<std::vector<GraspPose>>{f.grasps}, f.robot);
  classify_all(c, world, f.params);
  const auto scan = tk::scan_config(f.robot);
  const auto ranked = order_candidates(c, scan);
  std::optional<GraspMotion> m;
  std::size_t used = 0;
  for (std::size_t i = 0; i < ranked.size() && !m; ++i) {
    m = plan_grasp_motion(scan, c[ranked[i].candidate], ranked[i].solution, world, f.robot, f.params);
    used = i;
  }
  ASSERT_TRUE(m.has_value());
  EXPECT_EQ(ranked[used].collision, CollisionClass::None);
  EXPECT_EQ(m->path.waypoints.front(), scan);
  EXPECT_LT(fk_residual(f.robot, m->path.waypoints.back(), c[ranked[used].candidate].tcp), 1e-6);
  ASSERT_LT(m->approach_start, m->path.waypoints.size());
  const auto pre = kinematics::fk(f.robot, m->path.waypoints[m->approach_start]);
  const auto tcp = c[ranked[used].candidate].tcp;
  EXPECT_NEAR((pre.translation() - tcp.translation()).norm(), f.params.pregrasp_distance, 1e-6);
}
