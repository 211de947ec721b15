#include <gtest/gtest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <random>

#include "binpick/errors.hpp"
#include "binpick/geometry/raycast.hpp"
#include "binpick/scene/scene.hpp"
#include "oracles.hpp"

using namespace binpick;
using namespace binpick::scene;
using geometry::Vec3;

namespace {

std::shared_ptr<const ObjectModel> cylinder() {
  static auto model = make_object_model(geometry::make_cylinder(0.015, 0.05, 24));
  return model;
}

BinModel default_bin() {
  BinModel bin;
  bin.pose = RigidTransform::from_translation(Vec3(0.45, 0.0, 0.0));
  return bin;
}

std::vector<Vec3> dense_probes(const geometry::TriangleMesh& mesh, std::size_t n) {
  auto pts = geometry::sample_surface_uniform(mesh, n, 99).points;
  pts.insert(pts.end(), mesh.vertices.begin(), mesh.vertices.end());
  return pts;
}

double floor_gap(const SceneState& s, std::size_t i) {
  double lo = 1e9;
  for (const auto& v : s.object->mesh.vertices) {
    lo = std::min(lo, s.bin.pose.inverse().apply(s.poses[i].apply(v)).z());
  }
  return lo;
}

}  // namespace

TEST(Bin, BoxesEncloseCavity) {
  const auto bin = default_bin();
  bin.validate();
  const auto boxes = bin.boxes();
  ASSERT_EQ(boxes.size(), 5u);
  // Cavity interior is free, points just beyond each face are inside a box.
  EXPECT_TRUE(bin.in_cavity(Vec3(0, 0, 0.05)));
  for (const auto& b : boxes) EXPECT_FALSE(b.contains(Vec3(0, 0, 0.05)));
  auto inside_any = [&](const Vec3& p) {
    for (const auto& b : boxes) {
      if (b.contains(p)) return true;
    }
    return false;
  };
  EXPECT_TRUE(inside_any(Vec3(0, 0, -0.001)));
  EXPECT_TRUE(inside_any(Vec3(0.121, 0, 0.05)));
  EXPECT_TRUE(inside_any(Vec3(0, -0.091, 0.05)));
  EXPECT_FALSE(inside_any(Vec3(0.119, 0.089, 0.001)));
}

TEST(Bin, InnerSamplesLieOnSurfaces) {
  const auto bin = default_bin();
  const auto pts = bin.inner_surface_samples(0.01);
  EXPECT_GT(pts.size(), 500u);
  for (const auto& p : pts) {
    double d = 1e9;
    for (const auto& b : bin.boxes()) d = std::min(d, std::abs(b.signed_distance(p)));
    EXPECT_LT(d, 1e-12);
  }
}

TEST(Bin, RejectsInvalidGeometry) {
  BinModel bin;
  bin.wall = 0.0;
  EXPECT_THROW(bin.validate(), ArgumentError);
  bin = BinModel{};
  bin.cavity.y() = -1.0;
  EXPECT_THROW(bin.validate(), ArgumentError);
}

TEST(Camera, PixelRayAndProjectionAreInverse) {
  auto cam = VirtualCamera::looking_down(Vec3(0.45, 0, 0), 0.6);
  cam.validate();
  for (int v = 0; v < cam.height; v += 7) {
    for (int u = 0; u < cam.width; u += 11) {
      const auto px = cam.project(0.4 * cam.pixel_ray(u, v));
      ASSERT_TRUE(px.has_value());
      EXPECT_NEAR(px->x(), u, 1e-9);
      EXPECT_NEAR(px->y(), v, 1e-9);
    }
  }
  EXPECT_FALSE(cam.project(Vec3(0, 0, -1)).has_value());
  EXPECT_NEAR(cam.pose.apply_direction(Vec3::UnitZ()).z(), -1.0, 1e-12);
}

TEST(Camera, RejectsInvalidParameters) {
  VirtualCamera cam;
  cam.fov_x = 3.2;
  EXPECT_THROW(cam.validate(), ArgumentError);
  cam = VirtualCamera{};
  cam.width = 0;
  EXPECT_THROW(cam.validate(), ArgumentError);
  cam = VirtualCamera{};
  cam.noise_sigma = -1.0;
  EXPECT_THROW(cam.validate(), ArgumentError);
}

TEST(Render, EmptySceneGivesEmptyCloud) {
  SceneState s;
  const auto cam = VirtualCamera::looking_down(Vec3::Zero(), 0.6);
  const auto caster = s.caster(false);
  EXPECT_TRUE(render_window(caster, cam, {0, 0, cam.width - 1, cam.height - 1}, 0.0, 1).empty());
}

TEST(Render, BoxFillingViewHasConstantDepth) {
  auto box = std::make_shared<const geometry::MeshBvh>(geometry::make_box(Vec3(5, 5, 0.1)));
  geometry::RayCaster caster({{box, RigidTransform::identity()}});
  const auto cam = VirtualCamera::looking_down(Vec3::Zero(), 0.6);
  const auto cloud = render_window(caster, cam, {0, 0, cam.width - 1, cam.height - 1}, 0.0, 1);
  ASSERT_EQ(cloud.size(), static_cast<std::size_t>(cam.width * cam.height));
  for (const auto& p : cloud.points) EXPECT_NEAR(p.z(), 0.5, 1e-9);
}

TEST(Render, OccludedObjectContributesNothing) {
  const auto model = cylinder();
  SceneState s;
  s.object = model;
  s.bin = default_bin();
  // Upright cylinder under a lying one; both on the camera axis.
  s.poses = {RigidTransform::from_translation(Vec3(0.45, 0, 0.3)),
             RigidTransform::from_translation(Vec3(0.45, 0, 0.2))};
  auto cam = VirtualCamera::looking_down(Vec3(0.45, 0, 0), 0.6);
  cam.noise_sigma = 0.0;
  cam.width = 60;
  cam.height = 48;
  const auto cloud = camera_to_world(render_depth(s, cam), cam);
  std::vector<std::pair<geometry::TriangleMesh, RigidTransform>> oracle_scene{
      {s.bin.mesh(), s.bin.pose}, {model->mesh, s.poses[0]}, {model->mesh, s.poses[1]}};
  std::size_t k = 0, from_occluded = 0;
  for (int v = 0; v < cam.height; ++v) {
    for (int u = 0; u < cam.width; ++u) {
      const Vec3 d = cam.pose.apply_direction(cam.pixel_ray(u, v));
      const auto hit = binpick::testing::oracle_ray_scene(oracle_scene, cam.pose.translation(), d);
      if (!hit) continue;
      ASSERT_LT(k, cloud.size());
      EXPECT_LT((cloud.points[k] - (cam.pose.translation() + hit->distance * d)).norm(), 1e-9);
      if (hit->mesh == 2) ++from_occluded;
      ++k;
    }
  }
  EXPECT_EQ(k, cloud.size());
  EXPECT_EQ(from_occluded, 0u);
}

TEST(Scene, SingleObjectRestsOnFloor) {
  BinModel bin = default_bin();
  bin.cavity.z() = 0.3;
  const auto s = generate_scene(cylinder(), 1, bin, 42);
  ASSERT_EQ(s.poses.size(), 1u);
  const double gap = floor_gap(s, 0);
  EXPECT_LE(gap, SceneParams{}.contact_tolerance);
  EXPECT_GE(gap, -0.001);
  EXPECT_TRUE(bin.in_cavity(bin.pose.inverse().apply(s.poses[0].apply(s.object->centroid))));
}

TEST(Scene, SameSeedIsBitwiseIdentical) {
  const auto a = generate_scene(cylinder(), 3, default_bin(), 7);
  const auto b = generate_scene(cylinder(), 3, default_bin(), 7);
  const auto c = generate_scene(cylinder(), 3, default_bin(), 8);
  ASSERT_EQ(a.poses.size(), b.poses.size());
  for (std::size_t i = 0; i < a.poses.size(); ++i) {
    EXPECT_TRUE((a.poses[i].matrix().array() == b.poses[i].matrix().array()).all());
  }
  EXPECT_FALSE((a.poses[0].matrix().array() == c.poses[0].matrix().array()).all());
}

TEST(Scene, SixCylindersDoNotInterpenetrate) {
  const auto model = cylinder();
  const auto probes = dense_probes(model->mesh, 3000);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto s = generate_scene(model, 6, default_bin(), seed);
    ASSERT_EQ(s.poses.size(), 6u);
    for (std::size_t i = 0; i < 6; ++i) {
      for (std::size_t j = 0; j < 6; ++j) {
        if (i == j) continue;
        EXPECT_LE(binpick::testing::oracle_penetration(model->mesh, probes, s.poses[i], s.poses[j]), 0.001)
            << "seed " << seed << " pair " << i << "," << j;
      }
      EXPECT_GE(floor_gap(s, i), -0.001);
    }
  }
}

TEST(Scene, EveryObjectIsSupported) {
  const auto model = cylinder();
  const auto probes = dense_probes(model->mesh, 3000);
  const auto s = generate_scene(model, 5, default_bin(), 11);
  const auto boxes = s.bin.world_boxes();
  for (std::size_t i = 0; i < s.poses.size(); ++i) {
    double gap = 1e9;
    for (const auto& v : probes) {
      for (const auto& b : boxes) gap = std::min(gap, b.signed_distance(s.poses[i].apply(v)));
    }
    for (std::size_t j = 0; j < s.poses.size(); ++j) {
      if (j != i) gap = std::min(gap, binpick::testing::oracle_separation(model->mesh, probes, s.poses[i], s.poses[j]));
    }
    EXPECT_LE(gap, SceneParams{}.contact_tolerance + 0.001) << "object " << i;
    EXPECT_TRUE(s.bin.in_cavity(s.bin.pose.inverse().apply(s.poses[i].apply(model->centroid))));
  }
}

TEST(Scene, CapacityErrorReportsPlacedCount) {
  BinModel tiny = default_bin();
  tiny.cavity = Vec3(0.07, 0.07, 0.04);
  SceneParams p;
  p.drop_retries = 3;
  try {
    generate_scene(cylinder(), 30, tiny, 5, p);
    FAIL() << "expected CapacityError";
  } catch (const CapacityError& e) {
    EXPECT_LT(e.placed(), 30u);
  }
  EXPECT_THROW(generate_scene(cylinder(), 0, default_bin(), 1), ArgumentError);
}

TEST(Scene, ResettleAfterRemovalLowersOrKeepsObjects) {
  auto s = generate_scene(cylinder(), 5, default_bin(), 21);
  std::vector<double> before;
  s.poses.erase(s.poses.begin());
  for (const auto& p : s.poses) before.push_back(p.apply(s.object->centroid).z());
  settle_scene(s, 3);
  for (std::size_t i = 0; i < s.poses.size(); ++i) {
    EXPECT_LE(s.poses[i].apply(s.object->centroid).z(), before[i] + 1e-9);
    EXPECT_GE(floor_gap(s, i), -0.001);
  }
}

TEST(Render, GeneratedSceneProperties) {
  const auto s = generate_scene(cylinder(), 5, default_bin(), 4);
  auto cam = VirtualCamera::looking_down(Vec3(0.45, 0, 0), 0.6);
  cam.noise_sigma = 0.0;
  const auto cloud = camera_to_world(render_depth(s, cam), cam);
  ASSERT_GT(cloud.size(), 1000u);
  const auto bin_mesh = geometry::transformed(s.bin.mesh(), s.bin.pose);
  for (std::size_t i = 0; i < cloud.size(); i += 13) {
    double d = geometry::surface_distance(bin_mesh, cloud.points[i]);
    for (const auto& p : s.poses) {
      d = std::min(d, geometry::surface_distance(s.object->mesh, p.inverse().apply(cloud.points[i])));
    }
    EXPECT_LT(d, 1e-6);
  }
  cam.noise_sigma = 0.0003;
  const auto n1 = render_depth(s, cam, 5), n2 = render_depth(s, cam, 5), n3 = render_depth(s, cam, 6);
  ASSERT_EQ(n1.size(), n2.size());
  EXPECT_TRUE(std::equal(n1.points.begin(), n1.points.end(), n2.points.begin()));
  EXPECT_FALSE(std::equal(n1.points.begin(), n1.points.end(), n3.points.begin()));
}

class SceneIo : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = std::filesystem::temp_directory_path() /
           ("binpick_scene_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(dir_);
  }
  void TearDown() override { std::filesystem::remove_all(dir_); }
  std::filesystem::path dir_;
};

TEST_F(SceneIo, RoundTripIsBitwise) {
  std::mt19937_64 rng(3);
  SceneState s;
  s.bin = default_bin();
  s.bin.pose = binpick::testing::random_transform(rng, 0.5, 3.0);
  s.seed = 0xfedcba9876543210ULL;
  for (int i = 0; i < 7; ++i) s.poses.push_back(binpick::testing::random_transform(rng, 1.0, 3.0));
  save_scene(s, dir_ / "s.txt");
  const auto back = load_scene(dir_ / "s.txt", cylinder());
  EXPECT_EQ(back.seed, s.seed);
  EXPECT_EQ(back.object, cylinder());
  EXPECT_TRUE((back.bin.cavity.array() == s.bin.cavity.array()).all());
  EXPECT_EQ(back.bin.wall, s.bin.wall);
  EXPECT_TRUE((back.bin.pose.matrix().array() == s.bin.pose.matrix().array()).all());
  ASSERT_EQ(back.poses.size(), s.poses.size());
  for (std::size_t i = 0; i < s.poses.size(); ++i) {
    EXPECT_TRUE((back.poses[i].matrix().array() == s.poses[i].matrix().array()).all());
  }
}

TEST_F(SceneIo, EmptySceneRoundTrips) {
  SceneState s;
  save_scene(s, dir_ / "e.txt");
  const auto back = load_scene(dir_ / "e.txt");
  EXPECT_TRUE(back.poses.empty());
}

TEST_F(SceneIo, TruncatedFileIsParseError) {
  std::mt19937_64 rng(4);
  SceneState s;
  for (int i = 0; i < 3; ++i) s.poses.push_back(binpick::testing::random_transform(rng, 1.0, 3.0));
  save_scene(s, dir_ / "s.txt");
  std::ifstream in(dir_ / "s.txt");
  std::string text((std::istreambuf_iterator<char>(in)), {});
  std::ofstream(dir_ / "t.txt") << text.substr(0, text.size() - 40);
  EXPECT_THROW(load_scene(dir_ / "t.txt"), ParseError);
  std::ofstream(dir_ / "u.txt") << text.substr(0, text.find("objects"));
  try {
    load_scene(dir_ / "u.txt");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_GT(e.line(), 0u);
  }
  std::ofstream(dir_ / "v.txt") << "binpick-scene 2\n";
  EXPECT_THROW(load_scene(dir_ / "v.txt"), ParseError);
  EXPECT_THROW(load_scene(dir_ / "missing.txt"), ParseError);
}
