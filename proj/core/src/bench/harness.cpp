#include "binpick/bench/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <thread>

#include "binpick/errors.hpp"
#include "binpick/random.hpp"

namespace binpick::bench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

// Child seed slots inside one episode.
constexpr std::uint64_t kSceneSlot = 0;
constexpr std::uint64_t kNoiseSlot = 1;
constexpr std::uint64_t kSettleSlot = 2;
constexpr std::uint64_t kSlotsPerAttempt = 4;

std::uint64_t attempt_seed(std::uint64_t episode, std::size_t attempt, std::uint64_t slot) {
  return derive_seed(episode, 1 + attempt * kSlotsPerAttempt + slot);
}

bool near_failure(const BenchmarkConfig& config, const std::vector<geometry::RigidTransform>& failed,
                  const geometry::RigidTransform& tcp) {
  for (const auto& f : failed) {
    const double d = (f.translation() - tcp.translation()).norm();
    const Eigen::AngleAxisd rel(f.rotation().transpose() * tcp.rotation());
    if (d <= config.failure_radius && std::abs(rel.angle()) <= config.failure_angle) return true;
  }
  return false;
}

struct Plan {
  grasp::GraspCandidate candidate;
  grasp::GraspMotion motion;
};

/// Perception and planning for one scan. Empty when nothing can be executed.
std::optional<Plan> perceive_and_plan(const BenchmarkConfig& config, const BenchAssets& assets,
                                      const scene::SceneState& truth, std::uint64_t noise_seed,
                                      const std::vector<geometry::RigidTransform>& failed,
                                      EpisodeRecord& rec) {
  const auto t0 = Clock::now();
  const auto cloud = scene::camera_to_world(scene::render_depth(truth, config.camera, noise_seed),
                                            config.camera);
  std::vector<pose::PoseHypothesis> hyps;
  geometry::RigidTransform bin_pose;
  try {
    bin_pose = pose::locate_bin(cloud, config.bin, config.bin.pose);
  } catch (const LocalizationError&) {
    rec.estimate_seconds = seconds_since(t0);
    return std::nullopt;
  }
  auto crop = pose::crop_to_bin(cloud, bin_pose, config.bin);
  try {
    hyps = pose::estimate_poses(crop, *assets.pose_model, config.camera, config.estimator);
  } catch (const InsufficientDataError&) {
    rec.estimate_seconds = seconds_since(t0);
    return std::nullopt;
  }
  std::vector<geometry::RigidTransform> targets;
  for (const auto& h : hyps) {
    if (h.score >= config.min_score && targets.size() < config.max_targets) targets.push_back(h.pose);
  }
  if (targets.empty() && !hyps.empty()) targets.push_back(hyps.front().pose);
  rec.estimate_seconds = seconds_since(t0);

  const auto t1 = Clock::now();
  std::optional<Plan> plan;
  if (!targets.empty()) {
    const auto world = grasp::make_planning_scene(std::move(crop), config.bin, bin_pose, config.gripper,
                                                  assets.object, targets);
    const std::vector<std::vector<grasp::GraspPose>> sets(targets.size(), assets.grasps);
    auto candidates = grasp::compose_candidates(targets, sets, assets.robot);
    grasp::classify_all(candidates, world, config.planner);
    try {
      auto ranked = grasp::order_candidates(candidates, assets.scan);
      std::stable_partition(ranked.begin(), ranked.end(), [&](const grasp::RankedGrasp& r) {
        return !near_failure(config, failed, candidates[r.candidate].tcp);
      });
      const std::size_t limit = std::min(ranked.size(), config.max_plan_attempts);
      for (std::size_t i = 0; i < limit && !plan; ++i) {
        const auto& c = candidates[ranked[i].candidate];
        if (auto m = grasp::plan_grasp_motion(assets.scan, c, ranked[i].solution, world, assets.robot,
                                              config.planner)) {
          plan = Plan{c, std::move(*m)};
        }
      }
    } catch (const NoGraspError&) {
    }
  }
  rec.plan_seconds = seconds_since(t1);
  return plan;
}

}  // namespace

std::uint64_t episode_seed(std::uint64_t master, std::size_t episode) {
  return derive_seed(master, episode);
}

EpisodeResult run_episode(const BenchmarkConfig& config, const BenchAssets& assets,
                          std::uint64_t seed, std::size_t episode) {
  EpisodeResult result;
  result.seed = seed;
  executor::WorldState world;
  world.scene = scene::generate_scene(assets.object, config.objects, config.bin,
                                      derive_seed(seed, kSceneSlot), config.scene);

  std::vector<geometry::RigidTransform> failed;
  for (std::size_t attempt = 0;
       attempt < static_cast<std::size_t>(config.retry_budget) && !world.scene.poses.empty();
       ++attempt) {
    const auto start = Clock::now();
    EpisodeRecord rec;
    rec.seed = seed;
    rec.object_type = config.object_type;
    rec.episode = episode;
    rec.attempt = attempt;
    const auto plan = perceive_and_plan(config, assets, world.scene,
                                        attempt_seed(seed, attempt, kNoiseSlot), failed, rec);
    if (!plan) {
      rec.outcome.result = executor::GraspResult::FailedUnreachable;
      rec.pick_seconds = seconds_since(start);
      result.records.push_back(rec);
      continue;
    }
    rec.predicted = plan->candidate.collision;
    auto [outcome, next] = executor::execute_grasp(plan->motion.path, plan->candidate, world,
                                                   assets.robot, config.gripper, config.executor);
    const bool disturbed = outcome.result == executor::GraspResult::Success || outcome.collision;
    if (outcome.result != executor::GraspResult::Success && config.failure_radius > 0.0) {
      failed.push_back(plan->candidate.tcp);
    }
    world = std::move(next);
    if (disturbed && !world.scene.poses.empty()) {
      scene::settle_scene(world.scene, attempt_seed(seed, attempt, kSettleSlot), config.scene);
    }
    rec.outcome = outcome;
    rec.execution_steps = outcome.steps;
    rec.pick_seconds = seconds_since(start);
    result.records.push_back(rec);
  }
  result.remaining = world.scene.poses.size();
  result.emptied = result.remaining == 0;
  result.exhausted = !result.emptied;
  return result;
}

EpisodeResult run_episode(const BenchmarkConfig& config, std::uint64_t seed) {
  return run_episode(config, load_assets(config), seed);
}

BenchmarkResult run_benchmark(const BenchmarkConfig& config) {
  const BenchAssets assets = load_assets(config);
  const auto n = static_cast<std::size_t>(config.episodes);
  BenchmarkResult out;
  out.episodes.resize(n);

  unsigned threads = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out.episodes[i] = run_episode(config, assets, episode_seed(config.seed, i), i);
      } catch (...) {
        const std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  std::vector<EpisodeRecord> records;
  std::size_t emptied = 0;
  for (const auto& e : out.episodes) {
    records.insert(records.end(), e.records.begin(), e.records.end());
    if (e.emptied) ++emptied;
  }
  out.report = make_report(records, n, emptied);
  return out;
}

}  // namespace binpick::bench
