#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <vector>

#include "binpick/scene/bin.hpp"
#include "binpick/scene/camera.hpp"
#include "binpick/scene/object_model.hpp"

namespace binpick::scene {

/// Ground-truth bin contents: copies of one object at `poses` (object -> world).
struct SceneState {
  BinModel bin;
  std::shared_ptr<const ObjectModel> object;
  std::vector<RigidTransform> poses;
  std::uint64_t seed = 0;

  /// Ray caster over the objects, plus the bin when `with_bin` is set. The bin
  /// is mesh index 0 in that case and object i is index i + 1.
  geometry::RayCaster caster(bool with_bin = true) const;
};

struct SceneParams {
  double contact_tolerance = 0.0005;  // resting contact gap (m)
  double collision_margin = 0.0001;   // probes closer than this count as collision
  int drop_retries = 20;              // per object
  int settle_iterations = 40;
  double settle_tilt = 0.25;          // max random tilt per settle move (rad)
  double settle_shift = 0.003;        // max lateral shift per settle move (m)
  double settle_lift = 0.003;
  double drop_rotation = 0.03;        // max rotation per descent step (rad)
};

/// Sequential drop-and-settle of `count` copies of `object` into `bin`.
/// Throws CapacityError if an object cannot be placed within the retry budget.
SceneState generate_scene(std::shared_ptr<const ObjectModel> object, int count, const BinModel& bin,
                          std::uint64_t seed, const SceneParams& params = {});
SceneState generate_scene(const TriangleMesh& object, int count, const BinModel& bin,
                          std::uint64_t seed, const SceneParams& params = {});

/// Lets every object fall and settle again, lowest first (after an object was
/// removed or pushed).
void settle_scene(SceneState& scene, std::uint64_t seed, const SceneParams& params = {});

/// Depth image of the scene as a camera-frame cloud.
PointCloud render_depth(const SceneState& scene, const VirtualCamera& camera,
                        std::uint64_t noise_seed = 0);

/// Text format: version header, seed, bin geometry and pose, then one
/// row-major 4x4 pose per object. Doubles are written in shortest
/// round-trip form.
void save_scene(const SceneState& scene, const std::filesystem::path& path);
/// Reads a scene file; `object` is attached to the result as-is.
SceneState load_scene(const std::filesystem::path& path,
                      std::shared_ptr<const ObjectModel> object = nullptr);

}  // namespace binpick::scene
