#include <benchmark/benchmark.h>

#include <random>

#include "binpick/bench/config.hpp"
#include "binpick/bench/harness.hpp"
#include "binpick/geometry/metrics.hpp"
#include "binpick/geometry/registration.hpp"
#include "binpick/kinematics/robot.hpp"
#include "binpick/pose/estimator.hpp"

using namespace binpick;

namespace {

const bench::BenchmarkConfig& config() {
  static const auto c = bench::load_config(std::filesystem::path(BINPICK_DATA_DIR) / "default.ini");
  return c;
}

const bench::BenchAssets& assets() {
  static const auto a = bench::load_assets(config());
  return a;
}

struct Perceived {
  scene::SceneState truth;
  geometry::PointCloud crop;
};

const Perceived& perceived() {
  static const Perceived p = [] {
    const auto& c = config();
    Perceived out;
    out.truth = scene::generate_scene(assets().object, c.objects, c.bin, 7, c.scene);
    const auto cloud = scene::camera_to_world(scene::render_depth(out.truth, c.camera, 7), c.camera);
    out.crop = pose::crop_to_bin(cloud, c.bin.pose, c.bin);
    return out;
  }();
  return p;
}

kinematics::JointConfig random_config(const kinematics::RobotModel& robot, std::mt19937_64& rng) {
  kinematics::JointConfig q;
  for (std::size_t i = 0; i < 6; ++i) {
    q[i] = std::uniform_real_distribution<double>(robot.limits[i].min, robot.limits[i].max)(rng);
  }
  return q;
}

void BM_ForwardKinematics(benchmark::State& state) {
  const auto robot = kinematics::RobotModel::ur5();
  std::mt19937_64 rng(1);
  const auto q = random_config(robot, rng);
  for (auto _ : state) benchmark::DoNotOptimize(kinematics::fk(robot, q));
}
BENCHMARK(BM_ForwardKinematics);

void BM_InverseKinematics(benchmark::State& state) {
  const auto robot = kinematics::RobotModel::ur5();
  std::mt19937_64 rng(2);
  const auto target = kinematics::fk(robot, random_config(robot, rng));
  for (auto _ : state) benchmark::DoNotOptimize(kinematics::ik(robot, target));
}
BENCHMARK(BM_InverseKinematics);

void BM_AddS(benchmark::State& state) {
  const auto& pm = *assets().pose_model;
  const auto est = geometry::RigidTransform::from_translation({0.002, 0.0, 0.001});
  for (auto _ : state) {
    benchmark::DoNotOptimize(geometry::add_s_distance(pm.points, est, geometry::RigidTransform::identity()));
  }
  state.SetLabel(std::to_string(pm.points.size()) + " points");
}
BENCHMARK(BM_AddS);

void BM_Icp(benchmark::State& state) {
  const auto& pm = *assets().pose_model;
  const auto truth =
      geometry::RigidTransform::from_axis_angle({0.3, 0.2, 1.0}, 0.05, {0.003, -0.002, 0.001});
  const auto target = geometry::transform_points(pm.points, truth);
  geometry::IcpParams params;
  params.max_correspondence_dist = 0.02;
  for (auto _ : state) {
    benchmark::DoNotOptimize(geometry::icp(pm.points, target, geometry::RigidTransform::identity(), params));
  }
}
BENCHMARK(BM_Icp);

void BM_RenderDepth(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(scene::render_depth(perceived().truth, config().camera, 3));
}
BENCHMARK(BM_RenderDepth)->Unit(benchmark::kMillisecond);

void BM_EstimatePoses(benchmark::State& state) {
  const auto& c = config();
  for (auto _ : state) {
    benchmark::DoNotOptimize(pose::estimate_poses(perceived().crop, *assets().pose_model, c.camera, c.estimator));
  }
}
BENCHMARK(BM_EstimatePoses)->Unit(benchmark::kMillisecond);

void BM_ClassifyAndOrder(benchmark::State& state) {
  const auto& c = config();
  const auto& a = assets();
  const auto targets = std::vector<geometry::RigidTransform>(perceived().truth.poses.begin(),
                                                             perceived().truth.poses.begin() + 3);
  const auto world = grasp::make_planning_scene(perceived().crop, c.bin, c.bin.pose, c.gripper, a.object,
                                                targets);
  const std::vector<std::vector<grasp::GraspPose>> sets(targets.size(), a.grasps);
  for (auto _ : state) {
    auto cands = grasp::compose_candidates(targets, sets, a.robot);
    grasp::classify_all(cands, world, c.planner);
    benchmark::DoNotOptimize(grasp::order_candidates(cands, a.scan));
  }
}
BENCHMARK(BM_ClassifyAndOrder)->Unit(benchmark::kMillisecond);

void BM_Episode(benchmark::State& state) {
  auto c = config();
  std::uint64_t seed = 100;
  for (auto _ : state) benchmark::DoNotOptimize(bench::run_episode(c, assets(), seed++));
}
BENCHMARK(BM_Episode)->Unit(benchmark::kSecond)->Iterations(3);

}  // namespace

BENCHMARK_MAIN();
