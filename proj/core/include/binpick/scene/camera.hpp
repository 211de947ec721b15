#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Core>

#include "binpick/geometry/point_cloud.hpp"
#include "binpick/geometry/raycast.hpp"
#include "binpick/geometry/transform.hpp"

namespace binpick::scene {

using geometry::PointCloud;
using geometry::RigidTransform;
using geometry::Vec3;

/// Pinhole depth camera. Camera frame: +z along the optical axis, +x to the
/// right of the image, +y down.
struct VirtualCamera {
  RigidTransform pose;  // camera -> world
  double fov_x = 0.5236;
  double fov_y = 0.4189;
  int width = 160;
  int height = 128;
  double noise_sigma = 0.0003;  // along the ray (m)

  void validate() const;
  /// Unit ray direction (camera frame) through the centre of pixel (u, v).
  Vec3 pixel_ray(int u, int v) const;
  /// Continuous pixel coordinates of a camera-frame point, if in front.
  std::optional<Eigen::Vector2d> project(const Vec3& p_camera) const;
  /// Camera at `target + height * z` looking straight down (image x = world x).
  static VirtualCamera looking_down(const Vec3& target, double height);
};

/// Inclusive pixel rectangle.
struct PixelWindow {
  int u0 = 0, v0 = 0, u1 = -1, v1 = -1;
  bool empty() const { return u1 < u0 || v1 < v0; }
};

/// Casts one ray per pixel in `window` and returns hit points in the camera
/// frame (row-major pixel order). Noise is drawn per row from `noise_seed`,
/// so rows are independent.
PointCloud render_window(const geometry::RayCaster& caster, const VirtualCamera& camera,
                         const PixelWindow& window, double noise_sigma, std::uint64_t noise_seed);

/// Pixel rectangle covering a world-space sphere, clipped to the image.
PixelWindow sphere_window(const VirtualCamera& camera, const Vec3& center_world, double radius);

/// Camera-frame cloud to world.
PointCloud camera_to_world(const PointCloud& cloud, const VirtualCamera& camera);

}  // namespace binpick::scene
