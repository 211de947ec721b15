#include "binpick/bench/config.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "binpick/errors.hpp"
#include "binpick/geometry/io.hpp"

namespace binpick::bench {

namespace {

namespace pt = boost::property_tree;
using geometry::Vec3;

constexpr double kDeg = std::numbers::pi / 180.0;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"paths", {"object_mesh", "grasps", "robot"}},
      {"run",
       {"object_type", "objects", "episodes", "retry_budget", "seed", "threads", "max_plan_attempts",
        "scan_height", "scan_branch", "failure_radius", "failure_angle_deg"}},
      {"bin", {"cavity_x", "cavity_y", "cavity_z", "wall", "x", "y", "z", "yaw_deg"}},
      {"camera", {"height", "width_px", "height_px", "fov_x_deg", "fov_y_deg", "noise_sigma"}},
      {"scene", {"contact_tolerance", "drop_retries", "settle_iterations"}},
      {"estimator",
       {"anchors", "hypotheses_per_anchor", "inlier_distance", "nms_threshold", "icp_iterations",
        "crop_voxel", "min_score", "max_targets"}},
      {"gripper", {"stroke", "finger_thickness", "finger_width", "finger_length", "tip_offset"}},
      {"planner",
       {"target_exclusion", "finger_margin", "sweep_length", "retreat", "joint_step",
        "pregrasp_distance", "contact_zone"}},
      {"executor",
       {"force_max_advance", "force_step", "timeout_steps", "pre_open_margin", "closed_gap_threshold",
        "push_limit", "contact_tolerance"}},
  };
  return keys;
}

class Reader {
 public:
  Reader(const pt::ptree& tree, std::string source) : tree_(tree), source_(std::move(source)) {}

  template <typename T>
  void get(const std::string& key, T& value) const {
    const auto node = tree_.get_child_optional(pt::ptree::path_type(key, '.'));
    if (!node) return;
    const auto parsed = node->get_value_optional<T>();
    if (!parsed) throw ConfigError(source_ + ": bad value for " + key + ": '" + node->data() + "'");
    if constexpr (std::is_floating_point_v<T>) {
      if (!std::isfinite(*parsed)) throw ConfigError(source_ + ": non-finite value for " + key);
    }
    value = *parsed;
  }

  void angle(const std::string& key, double& radians) const {
    double deg = radians / kDeg;
    get(key, deg);
    radians = deg * kDeg;
  }

 private:
  const pt::ptree& tree_;
  std::string source_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
  const std::filesystem::path p(value);
  return p.is_absolute() ? p : base / p;
}

}  // namespace

void BenchmarkConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  require(!object_mesh.empty() && std::filesystem::exists(object_mesh),
          "object mesh not found: " + object_mesh.string());
  require(!grasp_file.empty() && std::filesystem::exists(grasp_file),
          "grasp file not found: " + grasp_file.string());
  require(robot_file.empty() || std::filesystem::exists(robot_file),
          "robot file not found: " + robot_file.string());
  require(objects > 0, "objects must be positive");
  require(episodes > 0, "episodes must be positive");
  require(retry_budget >= 0, "retry_budget must not be negative");
  require(max_plan_attempts > 0, "max_plan_attempts must be positive");
  require(scan_height > 0.0, "scan_height must be positive");
  require(scan_branch >= 0 && scan_branch < 8, "scan_branch must be in 0..7");
  require(failure_radius >= 0.0 && failure_angle >= 0.0, "failure memory bounds must not be negative");
  require(min_score >= 0.0 && min_score <= 1.0, "min_score must be in [0, 1]");
  require(max_targets > 0, "max_targets must be positive");
  try {
    bin.validate();
    camera.validate();
    gripper.validate();
    planner.validate();
    executor.validate(gripper.stroke);
  } catch (const ArgumentError& e) {
    throw ConfigError(e.what());
  }
}

BenchmarkConfig default_config(const std::filesystem::path& data_dir) {
  BenchmarkConfig c;
  c.object_mesh = data_dir / "cylinder.stl";
  c.grasp_file = data_dir / "cylinder.grasps";
  c.robot_file = data_dir / "ur5.robot";
  c.bin.pose = geometry::RigidTransform::from_translation(Vec3(0.45, 0.0, 0.0));
  c.camera = scene::VirtualCamera::looking_down(c.bin.pose.translation(), 0.6);
  c.planner.pre_open_margin = c.executor.pre_open_margin;
  return c;
}

BenchmarkConfig load_config(const std::filesystem::path& path) {
  pt::ptree tree;
  try {
    pt::read_ini(path.string(), tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  const auto& keys = known_keys();
  for (const auto& [section, body] : tree) {
    const auto it = keys.find(section);
    if (it == keys.end()) throw ConfigError(path.string() + ": unknown section [" + section + "]");
    if (body.empty()) throw ConfigError(path.string() + ": key outside a section: " + section);
    for (const auto& [key, value] : body) {
      if (!it->second.contains(key)) {
        throw ConfigError(path.string() + ": unknown key " + section + "." + key);
      }
    }
  }

  const auto base = path.parent_path();
  BenchmarkConfig c = default_config(base);
  const Reader r(tree, path.string());

  std::string s;
  if (s.clear(), r.get("paths.object_mesh", s), !s.empty()) c.object_mesh = resolve(base, s);
  if (s.clear(), r.get("paths.grasps", s), !s.empty()) c.grasp_file = resolve(base, s);
  if (tree.get_child_optional(pt::ptree::path_type("paths.robot", '.'))) {
    s.clear();
    r.get("paths.robot", s);
    c.robot_file = s.empty() ? std::filesystem::path() : resolve(base, s);
  }

  r.get("run.object_type", c.object_type);
  r.get("run.objects", c.objects);
  r.get("run.episodes", c.episodes);
  r.get("run.retry_budget", c.retry_budget);
  r.get("run.seed", c.seed);
  r.get("run.threads", c.threads);
  r.get("run.max_plan_attempts", c.max_plan_attempts);
  r.get("run.scan_height", c.scan_height);
  r.get("run.scan_branch", c.scan_branch);
  r.get("run.failure_radius", c.failure_radius);
  r.angle("run.failure_angle_deg", c.failure_angle);

  r.get("bin.cavity_x", c.bin.cavity.x());
  r.get("bin.cavity_y", c.bin.cavity.y());
  r.get("bin.cavity_z", c.bin.cavity.z());
  r.get("bin.wall", c.bin.wall);
  Vec3 bin_xyz = c.bin.pose.translation();
  double yaw = 0.0;
  r.get("bin.x", bin_xyz.x());
  r.get("bin.y", bin_xyz.y());
  r.get("bin.z", bin_xyz.z());
  r.angle("bin.yaw_deg", yaw);
  c.bin.pose = geometry::RigidTransform::from_axis_angle(Vec3::UnitZ(), yaw, bin_xyz);

  double cam_height = 0.6;
  r.get("camera.height", cam_height);
  const scene::VirtualCamera defaults;
  c.camera = scene::VirtualCamera::looking_down(bin_xyz, cam_height);
  c.camera.fov_x = defaults.fov_x;
  c.camera.fov_y = defaults.fov_y;
  r.get("camera.width_px", c.camera.width);
  r.get("camera.height_px", c.camera.height);
  r.angle("camera.fov_x_deg", c.camera.fov_x);
  r.angle("camera.fov_y_deg", c.camera.fov_y);
  r.get("camera.noise_sigma", c.camera.noise_sigma);

  r.get("scene.contact_tolerance", c.scene.contact_tolerance);
  r.get("scene.drop_retries", c.scene.drop_retries);
  r.get("scene.settle_iterations", c.scene.settle_iterations);

  r.get("estimator.anchors", c.estimator.anchor_count);
  r.get("estimator.hypotheses_per_anchor", c.estimator.hypotheses_per_anchor);
  r.get("estimator.inlier_distance", c.estimator.inlier_distance);
  r.get("estimator.nms_threshold", c.estimator.nms_threshold);
  r.get("estimator.icp_iterations", c.estimator.icp.max_iterations);
  r.get("estimator.crop_voxel", c.estimator.crop_voxel);
  r.get("estimator.min_score", c.min_score);
  r.get("estimator.max_targets", c.max_targets);

  r.get("gripper.stroke", c.gripper.stroke);
  r.get("gripper.finger_thickness", c.gripper.finger_thickness);
  r.get("gripper.finger_width", c.gripper.finger_width);
  r.get("gripper.finger_length", c.gripper.finger_length);
  r.get("gripper.tip_offset", c.gripper.tip_offset);

  r.get("planner.target_exclusion", c.planner.target_exclusion);
  r.get("planner.finger_margin", c.planner.finger_margin);
  r.get("planner.sweep_length", c.planner.sweep_length);
  r.get("planner.retreat", c.planner.retreat);
  r.get("planner.joint_step", c.planner.joint_step);
  r.get("planner.pregrasp_distance", c.planner.pregrasp_distance);
  r.get("planner.contact_zone", c.planner.contact_zone);

  r.get("executor.force_max_advance", c.executor.force_max_advance);
  r.get("executor.force_step", c.executor.force_step);
  r.get("executor.timeout_steps", c.executor.timeout_steps);
  r.get("executor.pre_open_margin", c.executor.pre_open_margin);
  r.get("executor.closed_gap_threshold", c.executor.closed_gap_threshold);
  r.get("executor.push_limit", c.executor.push_limit);
  r.get("executor.contact_tolerance", c.executor.contact_tolerance);
  c.planner.pre_open_margin = c.executor.pre_open_margin;

  c.validate();
  return c;
}

BenchAssets load_assets(const BenchmarkConfig& config) {
  config.validate();
  BenchAssets a;
  try {
    const auto mesh = geometry::load_mesh(config.object_mesh);
    a.object = scene::make_object_model(mesh);
    a.pose_model = pose::make_pose_model(mesh);
    a.robot = config.robot_file.empty() ? kinematics::RobotModel::ur5()
                                        : kinematics::load_robot(config.robot_file);
    a.grasps = grasp::expand_grasps(grasp::load_grasps(config.grasp_file), config.gripper.stroke);
    config.estimator.validate(a.pose_model->radius);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  geometry::Mat3 down;
  down.col(0) = Vec3(1, 0, 0);
  down.col(1) = Vec3(0, -1, 0);
  down.col(2) = Vec3(0, 0, -1);
  const Vec3 target = config.bin.pose.apply(Vec3(0, 0, config.scan_height));
  const auto sols = kinematics::ik(a.robot, geometry::RigidTransform(down, target));
  bool found = false;
  for (const auto& s : sols) {
    if (s.branch == config.scan_branch) {
      a.scan = s.q;
      found = true;
    }
  }
  if (!found) throw ConfigError("scan pose unreachable with the configured IK branch");
  return a;
}

}  // namespace binpick::bench
