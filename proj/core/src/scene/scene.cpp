#include "binpick/scene/scene.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

#include "binpick/errors.hpp"
#include "../detail/text_format.hpp"

namespace binpick::scene {

namespace {

using detail::fmt;
using detail::LineReader;
using detail::write_pose;

constexpr double kClearanceCap = 0.05;

using Rng = std::mt19937_64;

geometry::Mat3 random_rotation(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

geometry::Mat3 small_rotation(Rng& rng, double max_angle) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(-max_angle, max_angle);
  Vec3 axis(n(rng), n(rng), n(rng));
  if (axis.norm() < 1e-12) axis = Vec3::UnitZ();
  return Eigen::AngleAxisd(u(rng), axis.normalized()).toRotationMatrix();
}

/// Rotates `pose` by `r` (world frame) about the world point `c`.
RigidTransform rotate_about(const RigidTransform& pose, const geometry::Mat3& r, const Vec3& c) {
  return RigidTransform(geometry::orthonormalize(r * pose.rotation()),
                        c + r * (pose.translation() - c));
}

RigidTransform shifted(const RigidTransform& pose, const Vec3& d) {
  return RigidTransform(pose.rotation(), pose.translation() + d);
}

class Settler {
 public:
  Settler(const ObjectModel& model, const BinModel& bin, const SceneParams& params)
      : model_(model), bin_(bin), params_(params), boxes_(bin.world_boxes()),
        down_(-bin.pose.rotation().col(2)) {}

  void set_obstacles(std::vector<RigidTransform> others) { others_ = std::move(others); }

  double clearance_of(const RigidTransform& pose) const {
    return clearance(model_, pose, others_, boxes_, kClearanceCap);
  }

  Vec3 centroid_in_bin(const RigidTransform& pose) const {
    return bin_.pose.inverse().apply(pose.apply(model_.centroid));
  }

  double height(const RigidTransform& pose) const { return centroid_in_bin(pose).z(); }

  /// Lowers `pose` until resting contact. Small random rotations are mixed in
  /// when `rng` is given. Returns nullopt if the start pose already collides.
  std::optional<RigidTransform> descend(RigidTransform pose, Rng* rng) const {
    double c = clearance_of(pose);
    if (c < params_.collision_margin) return std::nullopt;
    for (int iter = 0; iter < 4000; ++iter) {
      const double step = std::max(c - 0.003, 0.001);
      const RigidTransform cand = shifted(pose, step * down_);
      if (rng) {
        const RigidTransform turned =
            rotate_about(cand, small_rotation(*rng, params_.drop_rotation), cand.apply(model_.centroid));
        const double ct = clearance_of(turned);
        if (ct >= params_.collision_margin) {
          pose = turned;
          c = ct;
          continue;
        }
      }
      const double cc = clearance_of(cand);
      if (cc >= params_.collision_margin) {
        pose = cand;
        c = cc;
        continue;
      }
      double lo = 0.0, hi = step;
      while (hi - lo > 1e-4) {
        const double mid = 0.5 * (lo + hi);
        if (clearance_of(shifted(pose, mid * down_)) >= params_.collision_margin) lo = mid;
        else hi = mid;
      }
      return shifted(pose, lo * down_);
    }
    return pose;
  }

  /// Random tilt/shift moves accepted when they lower the centroid.
  RigidTransform settle(RigidTransform pose, Rng& rng, int iterations) const {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const Vec3 ex = bin_.pose.rotation().col(0), ey = bin_.pose.rotation().col(1);
    for (int it = 0; it < iterations; ++it) {
      const Vec3 c = pose.apply(model_.centroid);
      RigidTransform cand = rotate_about(pose, small_rotation(rng, params_.settle_tilt), c);
      cand = shifted(cand, params_.settle_shift * (u(rng) * ex + u(rng) * ey) -
                               params_.settle_lift * down_);
      const Vec3 cb = centroid_in_bin(cand);
      if (std::abs(cb.x()) > 0.5 * bin_.cavity.x() || std::abs(cb.y()) > 0.5 * bin_.cavity.y()) {
        continue;
      }
      auto rest = descend(cand, nullptr);
      if (rest && height(*rest) < height(pose) - 1e-5) pose = *rest;
    }
    return pose;
  }

 private:
  const ObjectModel& model_;
  const BinModel& bin_;
  const SceneParams& params_;
  std::vector<OrientedBox> boxes_;
  Vec3 down_;
  std::vector<RigidTransform> others_;
};

}  // namespace

geometry::RayCaster SceneState::caster(bool with_bin) const {
  std::vector<geometry::PlacedMesh> meshes;
  if (with_bin) {
    meshes.push_back({std::make_shared<const geometry::MeshBvh>(bin.mesh()), bin.pose});
  }
  if (object) {
    for (const auto& p : poses) meshes.push_back({object->bvh, p});
  }
  return geometry::RayCaster(std::move(meshes));
}

SceneState generate_scene(std::shared_ptr<const ObjectModel> object, int count, const BinModel& bin,
                          std::uint64_t seed, const SceneParams& params) {
  if (!object) throw ArgumentError("generate_scene needs an object model");
  if (count < 1) throw ArgumentError("object count must be at least 1");
  bin.validate();
  const double r = object->radius;
  if (2.0 * r + 0.002 > std::min(bin.cavity.x(), bin.cavity.y())) {
    throw ArgumentError("object does not fit inside the bin cavity");
  }
  SceneState scene;
  scene.bin = bin;
  scene.object = object;
  scene.seed = seed;
  Rng rng(seed);
  Settler settler(*object, scene.bin, params);
  const double hx = 0.5 * bin.cavity.x() - r - 0.001;
  const double hy = 0.5 * bin.cavity.y() - r - 0.001;
  std::uniform_real_distribution<double> ux(-hx, hx), uy(-hy, hy);

  for (int k = 0; k < count; ++k) {
    settler.set_obstacles(scene.poses);
    double top = bin.cavity.z();
    for (const auto& p : scene.poses) top = std::max(top, settler.height(p) + r);
    bool placed = false;
    for (int attempt = 0; attempt < params.drop_retries && !placed; ++attempt) {
      const geometry::Mat3 rot = bin.pose.rotation() * random_rotation(rng);
      const double x = ux(rng), y = uy(rng);
      const Vec3 c = bin.pose.apply(Vec3(x, y, top + r + 0.005));
      const RigidTransform start(rot, c - rot * object->centroid);
      auto rest = settler.descend(start, &rng);
      if (!rest) continue;
      const RigidTransform pose = settler.settle(*rest, rng, params.settle_iterations);
      if (!bin.in_cavity(settler.centroid_in_bin(pose))) continue;
      scene.poses.push_back(pose);
      placed = true;
    }
    if (!placed) throw CapacityError(scene.poses.size(), static_cast<std::size_t>(count));
  }
  return scene;
}

SceneState generate_scene(const TriangleMesh& object, int count, const BinModel& bin,
                          std::uint64_t seed, const SceneParams& params) {
  return generate_scene(make_object_model(object), count, bin, seed, params);
}

void settle_scene(SceneState& scene, std::uint64_t seed, const SceneParams& params) {
  if (!scene.object || scene.poses.empty()) return;
  Settler settler(*scene.object, scene.bin, params);
  std::vector<std::size_t> order(scene.poses.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return settler.height(scene.poses[a]) < settler.height(scene.poses[b]);
  });
  Rng rng(seed);
  for (std::size_t idx : order) {
    std::vector<RigidTransform> others;
    for (std::size_t j = 0; j < scene.poses.size(); ++j) {
      if (j != idx) others.push_back(scene.poses[j]);
    }
    settler.set_obstacles(std::move(others));
    auto rest = settler.descend(scene.poses[idx], nullptr);
    if (!rest) continue;
    scene.poses[idx] = settler.settle(*rest, rng, params.settle_iterations / 2);
  }
}

PointCloud render_depth(const SceneState& scene, const VirtualCamera& camera,
                        std::uint64_t noise_seed) {
  camera.validate();
  const auto caster = scene.caster(true);
  return render_window(caster, camera, PixelWindow{0, 0, camera.width - 1, camera.height - 1},
                       camera.noise_sigma, noise_seed);
}

void save_scene(const SceneState& scene, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "binpick-scene 1\n";
  out << "seed " << scene.seed << '\n';
  out << "bin_cavity " << fmt(scene.bin.cavity.x()) << ' ' << fmt(scene.bin.cavity.y()) << ' '
      << fmt(scene.bin.cavity.z()) << '\n';
  out << "bin_wall " << fmt(scene.bin.wall) << '\n';
  write_pose(out, "bin_pose", scene.bin.pose);
  out << "objects " << scene.poses.size() << '\n';
  for (const auto& p : scene.poses) write_pose(out, "pose", p);
  if (!out) throw Error("write failed: " + path.string());
}

SceneState load_scene(const std::filesystem::path& path, std::shared_ptr<const ObjectModel> object) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open scene file");
  LineReader r{in, path.string()};
  auto header = r.next("binpick-scene");
  if (r.integer(header, 1) != 1) r.fail("unsupported scene file version");
  SceneState scene;
  scene.object = std::move(object);
  scene.seed = r.integer(r.next("seed"), 1);
  auto cav = r.next("bin_cavity");
  scene.bin.cavity = Vec3(r.number(cav, 1), r.number(cav, 2), r.number(cav, 3));
  scene.bin.wall = r.number(r.next("bin_wall"), 1);
  scene.bin.pose = r.pose(r.next("bin_pose"));
  try {
    scene.bin.validate();
  } catch (const ArgumentError& e) {
    r.fail(e.what());
  }
  const std::uint64_t n = r.integer(r.next("objects"), 1);
  for (std::uint64_t i = 0; i < n; ++i) scene.poses.push_back(r.pose(r.next("pose")));
  return scene;
}

}  // namespace binpick::scene
