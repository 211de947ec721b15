#pragma once

#include "binpick/geometry/point_cloud.hpp"
#include "binpick/geometry/spatial_index.hpp"
#include "binpick/geometry/transform.hpp"

namespace binpick::geometry {

/// ADD-S: mean over model points of the distance from the point under `t_est`
/// to the nearest model point under `t_gt`. Throws EmptyInputError on an empty model.
double add_s_distance(const PointCloud& model, const RigidTransform& t_est,
                      const RigidTransform& t_gt);

/// ADD-S against a prebuilt index of the model in its own frame. Evaluates
/// the equivalent relative form, so results agree with add_s_distance up to
/// rounding only.
double add_s_distance(const PointCloud& model, const PointGrid& model_index,
                      const RigidTransform& t_est, const RigidTransform& t_gt);

/// ADD (no symmetry): mean distance between corresponding points.
double add_distance(const PointCloud& model, const RigidTransform& t_est,
                    const RigidTransform& t_gt);

}  // namespace binpick::geometry
