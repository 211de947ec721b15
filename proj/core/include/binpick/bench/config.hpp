#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "binpick/executor/executor.hpp"
#include "binpick/grasp/grasps.hpp"
#include "binpick/grasp/gripper.hpp"
#include "binpick/grasp/planner.hpp"
#include "binpick/kinematics/robot.hpp"
#include "binpick/pose/estimator.hpp"
#include "binpick/scene/bin.hpp"
#include "binpick/scene/camera.hpp"
#include "binpick/scene/scene.hpp"

namespace binpick::bench {

/// Everything one benchmark run needs. Loaded from a single INI file; see
/// data/default.ini for every key and its default.
struct BenchmarkConfig {
  std::filesystem::path object_mesh;
  std::filesystem::path grasp_file;
  std::filesystem::path robot_file;  // empty: built-in UR5

  int object_type = 1;
  int objects = 5;
  int episodes = 100;
  int retry_budget = 15;  // attempts per bin
  std::uint64_t seed = 1;
  unsigned threads = 0;   // 0: hardware concurrency
  std::size_t max_plan_attempts = 64;
  double scan_height = 0.35;  // TCP height above the bin floor at the scan pose
  int scan_branch = 0;
  // Grasps whose TCP lies this close to one that failed earlier in the episode
  // are tried last. A zero radius disables the memory.
  double failure_radius = 0.01;
  double failure_angle = 0.35;  // radians

  scene::BinModel bin;
  scene::VirtualCamera camera;
  scene::SceneParams scene;
  pose::EstimatorParams estimator;
  double min_score = 0.6;        // hypotheses below this depth-check score are dropped
  std::size_t max_targets = 3;   // best hypotheses handed to the planner
  grasp::GripperModel gripper;
  grasp::PlannerParams planner;
  executor::ExecutorParams executor;

  /// Throws ConfigError.
  void validate() const;
};

/// Defaults with asset paths inside `data_dir`.
BenchmarkConfig default_config(const std::filesystem::path& data_dir);

/// Reads an INI file. Relative paths resolve against the file's directory.
/// Unknown sections or keys, unparsable values and missing files throw
/// ConfigError.
BenchmarkConfig load_config(const std::filesystem::path& path);

/// Loaded and preprocessed assets shared by all episodes of a run.
struct BenchAssets {
  std::shared_ptr<const scene::ObjectModel> object;
  std::shared_ptr<const pose::PoseModel> pose_model;
  std::vector<grasp::GraspPose> grasps;
  kinematics::RobotModel robot;
  kinematics::JointConfig scan;  // robot configuration while imaging
};

BenchAssets load_assets(const BenchmarkConfig& config);

}  // namespace binpick::bench
