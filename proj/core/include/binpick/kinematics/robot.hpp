#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <filesystem>
#include <vector>

#include "binpick/geometry/transform.hpp"

namespace binpick::kinematics {

using geometry::RigidTransform;
using geometry::Vec3;

/// Six joint angles in radians.
struct JointConfig {
  std::array<double, 6> q{};

  double& operator[](std::size_t i) { return q[i]; }
  double operator[](std::size_t i) const { return q[i]; }
  bool finite() const;
  /// Each angle wrapped to (-pi, pi].
  JointConfig normalized() const;
  bool operator==(const JointConfig&) const = default;
};

/// Standard DH row: Rz(theta + offset) Tz(d) Tx(a) Rx(alpha).
struct DhRow {
  double a = 0.0;       // meters
  double d = 0.0;       // meters
  double alpha = 0.0;   // radians
  double offset = 0.0;  // radians, added to the joint angle
};

struct JointLimit {
  double min = -2.0 * 3.141592653589793;
  double max = 2.0 * 3.141592653589793;
};

/// A 6R arm with UR-family geometry (three parallel middle axes, spherical
/// offset wrist), which admits the closed-form eight-branch IK.
struct RobotModel {
  std::array<DhRow, 6> dh{};
  std::array<JointLimit, 6> limits{};
  RigidTransform tcp;  // flange -> TCP

  /// Throws ArgumentError for bad limits or a non UR-family layout.
  void validate() const;
  bool within_limits(const JointConfig& q) const;

  /// Published UR5 geometry with joint limits of +-2 pi.
  static RobotModel ur5();
};

/// Wrap to (-pi, pi].
double wrap_angle(double a);

/// Chebyshev (L-infinity) distance over shortest per-joint arcs, radians.
double joint_distance(const JointConfig& a, const JointConfig& b);

/// Flange pose and every intermediate frame origin (base, joints 1..6).
std::array<RigidTransform, 7> link_frames(const RobotModel& robot, const JointConfig& q);

/// TCP pose in the base frame.
RigidTransform fk(const RobotModel& robot, const JointConfig& q);

struct IkSolution {
  JointConfig q;
  int branch = 0;  // shoulder * 4 + elbow * 2 + wrist
};

/// Closed-form IK. Returns 0-8 solutions in branch-index order. Each solution
/// reproduces `target` within 1e-6 m / 1e-6 rad and lies within the joint limits.
std::vector<IkSolution> ik(const RobotModel& robot, const RigidTransform& target);

/// Robot model text file: `joint a d alpha_deg offset_deg min_deg max_deg`
/// lines (six), and `tcp` followed by 16 row-major numbers.
RobotModel load_robot(const std::filesystem::path& path);
void save_robot(const RobotModel& robot, const std::filesystem::path& path);

}  // namespace binpick::kinematics
