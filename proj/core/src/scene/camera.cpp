#include "binpick/scene/camera.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "binpick/errors.hpp"
#include "binpick/random.hpp"

namespace binpick::scene {

void VirtualCamera::validate() const {
  const double pi = std::numbers::pi;
  if (!(fov_x > 0.0 && fov_x < pi) || !(fov_y > 0.0 && fov_y < pi)) {
    throw ArgumentError("camera field of view must lie in (0, pi)");
  }
  if (width < 1 || height < 1) throw ArgumentError("camera resolution must be at least 1x1");
  if (!(noise_sigma >= 0.0)) throw ArgumentError("camera noise sigma must be non-negative");
  if (!pose.is_valid()) throw ArgumentError("camera pose is not a rigid transform");
}

Vec3 VirtualCamera::pixel_ray(int u, int v) const {
  const double x = (2.0 * (u + 0.5) / width - 1.0) * std::tan(0.5 * fov_x);
  const double y = (2.0 * (v + 0.5) / height - 1.0) * std::tan(0.5 * fov_y);
  return Vec3(x, y, 1.0).normalized();
}

std::optional<Eigen::Vector2d> VirtualCamera::project(const Vec3& p) const {
  if (!(p.z() > 0.0)) return std::nullopt;
  const double x = p.x() / p.z() / std::tan(0.5 * fov_x);
  const double y = p.y() / p.z() / std::tan(0.5 * fov_y);
  return Eigen::Vector2d(0.5 * (x + 1.0) * width - 0.5, 0.5 * (y + 1.0) * height - 0.5);
}

VirtualCamera VirtualCamera::looking_down(const Vec3& target, double height) {
  VirtualCamera cam;
  geometry::Mat3 r;
  r.col(0) = Vec3(1, 0, 0);
  r.col(1) = Vec3(0, -1, 0);
  r.col(2) = Vec3(0, 0, -1);
  cam.pose = RigidTransform(r, target + Vec3(0, 0, height));
  return cam;
}

PointCloud render_window(const geometry::RayCaster& caster, const VirtualCamera& camera,
                         const PixelWindow& window, double noise_sigma, std::uint64_t noise_seed) {
  PointCloud out;
  out.frame = "camera";
  if (window.empty() || caster.size() == 0) return out;
  const Vec3 origin = camera.pose.translation();
  for (int v = window.v0; v <= window.v1; ++v) {
    std::mt19937_64 rng(derive_seed(noise_seed, static_cast<std::uint64_t>(v)));
    std::normal_distribution<double> noise(0.0, noise_sigma > 0.0 ? noise_sigma : 1.0);
    for (int u = window.u0; u <= window.u1; ++u) {
      const Vec3 d = camera.pixel_ray(u, v);
      const auto hit = caster.cast(origin, camera.pose.apply_direction(d));
      if (!hit) continue;
      double t = hit->distance;
      if (noise_sigma > 0.0) t += noise(rng);
      out.points.push_back(t * d);
    }
  }
  return out;
}

PixelWindow sphere_window(const VirtualCamera& camera, const Vec3& center_world, double radius) {
  const Vec3 c = camera.pose.inverse().apply(center_world);
  PixelWindow w;
  if (c.z() - radius <= 1e-6) {
    if (c.z() + radius <= 0.0) return w;  // entirely behind the camera
    return PixelWindow{0, 0, camera.width - 1, camera.height - 1};
  }
  double u_lo = 1e300, u_hi = -1e300, v_lo = 1e300, v_hi = -1e300;
  for (int i = 0; i < 8; ++i) {
    const Vec3 corner = c + radius * Vec3(i & 1 ? 1 : -1, i & 2 ? 1 : -1, i & 4 ? 1 : -1);
    const auto px = camera.project(corner);
    if (!px) return PixelWindow{0, 0, camera.width - 1, camera.height - 1};
    u_lo = std::min(u_lo, px->x());
    u_hi = std::max(u_hi, px->x());
    v_lo = std::min(v_lo, px->y());
    v_hi = std::max(v_hi, px->y());
  }
  w.u0 = std::max(0, static_cast<int>(std::floor(u_lo)));
  w.v0 = std::max(0, static_cast<int>(std::floor(v_lo)));
  w.u1 = std::min(camera.width - 1, static_cast<int>(std::ceil(u_hi)));
  w.v1 = std::min(camera.height - 1, static_cast<int>(std::ceil(v_hi)));
  return w;
}

PointCloud camera_to_world(const PointCloud& cloud, const VirtualCamera& camera) {
  PointCloud out;
  out.frame = "world";
  out.points.reserve(cloud.size());
  for (const auto& p : cloud.points) out.points.push_back(camera.pose.apply(p));
  return out;
}

}  // namespace binpick::scene
