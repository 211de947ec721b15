#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "binpick/bench/config.hpp"
#include "binpick/bench/harness.hpp"
#include "binpick/bench/report.hpp"
#include "binpick/errors.hpp"
#include "binpick/geometry/io.hpp"
#include "binpick/geometry/metrics.hpp"
#include "binpick/geometry/point_cloud.hpp"
#include "binpick/random.hpp"

namespace fs = std::filesystem;
using namespace binpick;

namespace {

struct Common {
  std::string config = "data/default.ini";
  std::optional<std::uint64_t> seed;
  std::optional<int> episodes;
  std::string out;
  bool debug = false;
};

bench::BenchmarkConfig load(const Common& opt) {
  auto c = bench::load_config(opt.config);
  if (opt.seed) c.seed = *opt.seed;
  if (opt.episodes) c.episodes = *opt.episodes;
  c.validate();
  return c;
}

fs::path out_dir(const Common& opt) {
  const fs::path dir = opt.out.empty() ? fs::path(".") : fs::path(opt.out);
  fs::create_directories(dir);
  return dir;
}

std::string pose_text(const geometry::RigidTransform& t) {
  std::ostringstream s;
  s << std::setprecision(17);
  const auto m = t.matrix();
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) s << (c ? " " : "") << m(r, c);
    s << "\n";
  }
  return s.str();
}

std::string indexed(const char* stem, std::size_t i, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%03zu%s", stem, i, ext);
  return buf;
}

scene::SceneState scene_for(const bench::BenchmarkConfig& c, const bench::BenchAssets& a,
                            const std::string& scene_file) {
  if (!scene_file.empty()) return scene::load_scene(scene_file, a.object);
  return scene::generate_scene(a.object, c.objects, c.bin, bench::episode_seed(c.seed, 0), c.scene);
}

struct Perception {
  geometry::PointCloud cloud;
  geometry::PointCloud crop;
  geometry::RigidTransform bin_pose;
  std::vector<pose::PoseHypothesis> hypotheses;
};

Perception perceive(const bench::BenchmarkConfig& c, const bench::BenchAssets& a,
                    const scene::SceneState& truth) {
  Perception p;
  p.cloud = scene::camera_to_world(scene::render_depth(truth, c.camera, derive_seed(truth.seed, 1)),
                                   c.camera);
  p.bin_pose = pose::locate_bin(p.cloud, c.bin, c.bin.pose);
  p.crop = pose::crop_to_bin(p.cloud, p.bin_pose, c.bin);
  p.hypotheses = pose::estimate_poses(p.crop, *a.pose_model, c.camera, c.estimator);
  return p;
}

void dump_anchors(const bench::BenchmarkConfig& c, const bench::BenchAssets& a, const Perception& p,
                  const fs::path& dir) {
  const double radius = c.estimator.resolved_anchor_radius(a.pose_model->radius);
  const auto anchors =
      geometry::farthest_point_sampling(p.crop, std::min(c.estimator.anchor_count, p.crop.size()));
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const auto local = geometry::voxel_downsample(
        geometry::radius_crop(p.crop, p.crop.points[anchors[i]], radius), c.estimator.crop_voxel);
    geometry::save_ply_cloud(local, dir / indexed("anchor", i, ".ply"));
  }
  for (std::size_t i = 0; i < p.hypotheses.size(); ++i) {
    const auto& h = p.hypotheses[i];
    std::ofstream f(dir / indexed("hypothesis", i, ".txt"));
    f << "score " << h.score << "\nanchor " << h.anchor << "\nresidual " << h.icp_residual << "\n"
      << pose_text(h.pose);
  }
  geometry::save_ply_cloud(p.cloud, dir / "scene.ply");
  geometry::save_ply_cloud(p.crop, dir / "crop.ply");
}

int gen_scenes(const Common& opt) {
  const auto c = load(opt);
  const auto a = bench::load_assets(c);
  const auto dir = out_dir(opt);
  for (int i = 0; i < c.episodes; ++i) {
    const auto seed = bench::episode_seed(c.seed, static_cast<std::size_t>(i));
    const auto s = scene::generate_scene(a.object, c.objects, c.bin, seed, c.scene);
    scene::save_scene(s, dir / indexed("scene", i, ".txt"));
    geometry::save_ply_cloud(scene::camera_to_world(scene::render_depth(s, c.camera, seed), c.camera),
                             dir / indexed("cloud", i, ".ply"));
  }
  std::cout << "wrote " << c.episodes << " scenes to " << dir.string() << "\n";
  return 0;
}

int estimate(const Common& opt, const std::string& scene_file) {
  const auto c = load(opt);
  const auto a = bench::load_assets(c);
  const auto truth = scene_for(c, a, scene_file);
  const auto p = perceive(c, a, truth);
  std::cout << p.crop.size() << " points in the bin, " << p.hypotheses.size() << " hypotheses\n";
  for (std::size_t i = 0; i < p.hypotheses.size(); ++i) {
    const auto& h = p.hypotheses[i];
    double best = std::numeric_limits<double>::infinity();
    for (const auto& gt : truth.poses) {
      best = std::min(best, geometry::add_s_distance(a.pose_model->points, h.pose, gt));
    }
    const Eigen::Vector3d t = h.pose.translation();
    std::printf("%3zu score %.3f  pos (%.4f, %.4f, %.4f)  ADD-S to nearest truth %.2f mm\n", i, h.score,
                t.x(), t.y(), t.z(), best * 1e3);
  }
  if (opt.debug) dump_anchors(c, a, p, out_dir(opt));
  return 0;
}

int plan(const Common& opt, const std::string& scene_file, std::size_t show) {
  const auto c = load(opt);
  const auto a = bench::load_assets(c);
  const auto truth = scene_for(c, a, scene_file);
  const auto p = perceive(c, a, truth);
  std::vector<geometry::RigidTransform> targets;
  for (const auto& h : p.hypotheses) {
    if (h.score >= c.min_score && targets.size() < c.max_targets) targets.push_back(h.pose);
  }
  if (targets.empty() && !p.hypotheses.empty()) targets.push_back(p.hypotheses.front().pose);
  const auto world =
      grasp::make_planning_scene(p.crop, c.bin, p.bin_pose, c.gripper, a.object, targets);
  auto cands = grasp::compose_candidates(
      targets, std::vector<std::vector<grasp::GraspPose>>(targets.size(), a.grasps), a.robot);
  grasp::classify_all(cands, world, c.planner);
  const auto ranked = grasp::order_candidates(cands, a.scan);
  std::cout << cands.size() << " candidates, " << ranked.size() << " ranked pairs\n";
  for (std::size_t i = 0; i < std::min(show, ranked.size()); ++i) {
    const auto& r = ranked[i];
    const auto& cand = cands[r.candidate];
    std::printf("%3zu object %zu grasp %2zu type %d branch %d  %-6s  distance %.3f rad\n", i, cand.object,
                cand.grasp, cand.type_id, r.solution.branch, grasp::to_string(r.collision), r.distance);
  }
  for (std::size_t i = 0; i < std::min(ranked.size(), c.max_plan_attempts); ++i) {
    const auto& cand = cands[ranked[i].candidate];
    if (auto m = grasp::plan_grasp_motion(a.scan, cand, ranked[i].solution, world, a.robot, c.planner)) {
      std::cout << "selected rank " << i << ": " << m->path.waypoints.size() << " waypoints, approach from "
                << m->approach_start << "\n";
      if (opt.debug) std::ofstream(out_dir(opt) / "selected_tcp.txt") << pose_text(cand.tcp);
      return 0;
    }
  }
  std::cout << "no collision-free motion\n";
  return 2;
}

void write_records(const bench::BenchmarkResult& r, const fs::path& path) {
  std::ofstream f(path);
  f << "episode,seed,attempt,predicted,result,collision,timeout,grasp_type,steps,final_gap,"
       "estimate_s,plan_s,pick_s\n";
  for (const auto& e : r.episodes) {
    for (const auto& rec : e.records) {
      f << rec.episode << ',' << rec.seed << ',' << rec.attempt << ',' << grasp::to_string(rec.predicted)
        << ',' << executor::to_string(rec.outcome.result) << ',' << rec.outcome.collision << ','
        << rec.outcome.timeout << ',' << rec.outcome.grasp_type << ',' << rec.execution_steps << ','
        << rec.outcome.final_gap << ',' << rec.estimate_seconds << ',' << rec.plan_seconds << ','
        << rec.pick_seconds << '\n';
    }
  }
}

int run(const Common& opt, unsigned threads) {
  auto c = load(opt);
  if (threads) c.threads = threads;
  const auto r = bench::run_benchmark(c);
  std::cout << bench::emit_report(r.report, bench::ReportFormat::Table);
  if (!opt.out.empty()) {
    const auto dir = out_dir(opt);
    std::ofstream(dir / "report.csv") << bench::emit_report(r.report, bench::ReportFormat::Csv);
    std::ofstream(dir / "report.txt") << bench::emit_report(r.report, bench::ReportFormat::Table);
    write_records(r, dir / "records.csv");
  }
  return 0;
}

int report(const std::string& csv_path) {
  std::ifstream f(csv_path);
  if (!f) throw ParseError(csv_path, 0, "cannot open");
  std::stringstream s;
  s << f.rdbuf();
  bench::Report rep;
  rep.table = bench::parse_report_csv(s.str());
  std::cout << bench::emit_report(rep, bench::ReportFormat::Table);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulated bin picking: scene synthesis, pose estimation, grasp planning and benchmarks"};
  app.require_subcommand(1);
  Common opt;
  auto common = [&](CLI::App* sub, bool episodes) {
    sub->add_option("-c,--config", opt.config, "INI configuration file")->capture_default_str();
    sub->add_option("-s,--seed", opt.seed, "Master seed (overrides the config)");
    if (episodes) sub->add_option("-n,--episodes", opt.episodes, "Episode count (overrides the config)");
    sub->add_option("-o,--out", opt.out, "Output directory");
    sub->add_flag("-d,--debug", opt.debug, "Write intermediate clouds and poses to the output directory");
  };

  auto* gen = app.add_subcommand("gen-scenes", "Generate and save seeded scenes with rendered clouds");
  common(gen, true);
  std::string scene_file;
  auto* est = app.add_subcommand("estimate", "Estimate object poses in one scene");
  common(est, false);
  est->add_option("--scene", scene_file, "Scene file from gen-scenes (default: episode 0 of the seed)");
  std::size_t show = 10;
  auto* pl = app.add_subcommand("plan", "Rank grasps and plan a motion for one scene");
  common(pl, false);
  pl->add_option("--scene", scene_file, "Scene file from gen-scenes (default: episode 0 of the seed)");
  pl->add_option("--show", show, "Ranked pairs to print")->capture_default_str();
  unsigned threads = 0;
  auto* rn = app.add_subcommand("run", "Run the benchmark and print Table I and Table II");
  common(rn, true);
  rn->add_option("-j,--threads", threads, "Worker threads (overrides the config)");
  std::string csv;
  auto* rp = app.add_subcommand("report", "Print a saved report CSV as a table");
  rp->add_option("csv", csv, "report.csv from run")->required();

  CLI11_PARSE(app, argc, argv);
  try {
    if (*gen) return gen_scenes(opt);
    if (*est) return estimate(opt, scene_file);
    if (*pl) return plan(opt, scene_file, show);
    if (*rn) return run(opt, threads);
    if (*rp) return report(csv);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
