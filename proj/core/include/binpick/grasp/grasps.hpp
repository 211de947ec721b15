#pragma once

#include <filesystem>
#include <vector>

#include "binpick/geometry/transform.hpp"

namespace binpick::grasp {

using geometry::RigidTransform;
using geometry::Vec3;

/// One grasp type of a rotationally symmetric object. The full set is the
/// seed swept about `axis` (through the object origin) in steps of `step`,
/// each pose paired with its copy turned half a revolution about the approach
/// axis.
struct GraspDefinition {
  RigidTransform seed;        // object -> TCP
  Vec3 axis = Vec3::UnitZ();  // object frame, unit length
  double step = 0.0;          // radians
  double opening = 0.0;       // object width between the pads (m)
  int type_id = 0;

  /// Throws ArgumentError unless the step divides a full turn and the opening
  /// fits the stroke.
  void validate(double stroke) const;
};

/// An expanded grasp: object -> TCP plus the data the executor needs.
struct GraspPose {
  RigidTransform object_to_tcp;
  int type_id = 0;
  double opening = 0.0;
};

/// Poses in the order (k = 0, flip 0), (k = 0, flip 1), (k = 1, flip 0), ...
/// Poses coinciding with an earlier one within 1e-9 are dropped, so seeds whose
/// approach axis lies on the symmetry axis yield half the count.
std::vector<RigidTransform> generate_cylindrical_grasps(const GraspDefinition& def,
                                                        double stroke = 1.0);

/// Concatenation of every definition's expanded set.
std::vector<GraspPose> expand_grasps(const std::vector<GraspDefinition>& defs, double stroke);

/// Text format, one block per grasp type:
///   grasp <type id>
///   seed <16 row-major numbers>
///   axis <x y z>
///   step <degrees>
///   opening <millimetres>
std::vector<GraspDefinition> load_grasps(const std::filesystem::path& path);
void save_grasps(const std::vector<GraspDefinition>& defs, const std::filesystem::path& path);

/// Side grasp (type 1) about the centre and end grasps over the +z (type 2)
/// and -z (type 3) caps of a cylinder whose axis is object z and whose centre
/// is the object origin. End grasps place the TCP `end_depth` below the cap.
std::vector<GraspDefinition> cylinder_grasps(double radius, double length, double end_depth,
                                             double step);

}  // namespace binpick::grasp
