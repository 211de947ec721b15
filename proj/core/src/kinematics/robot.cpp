#include "binpick/kinematics/robot.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "binpick/errors.hpp"

namespace binpick::kinematics {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDomainEdge = 1e-9;
constexpr double kResidualTol = 1e-6;
constexpr double kDistinctTol = 1e-6;

RigidTransform dh_transform(const DhRow& row, double q) {
  const double th = q + row.offset;
  const double ct = std::cos(th), st = std::sin(th);
  const double ca = std::cos(row.alpha), sa = std::sin(row.alpha);
  geometry::Mat3 r;
  r << ct, -st * ca, st * sa,
       st, ct * ca, -ct * sa,
       0.0, sa, ca;
  return RigidTransform(r, Vec3(row.a * ct, row.a * st, row.d));
}

bool near_angle(double a, double b) { return std::abs(wrap_angle(a - b)) < 1e-12; }

/// Picks a representative of `angle` (mod 2 pi) inside the limit, if any.
std::optional<double> fit_limit(double angle, const JointLimit& lim) {
  const double w = wrap_angle(angle);
  for (double c : {w, w - 2.0 * kPi, w + 2.0 * kPi}) {
    if (c >= lim.min && c <= lim.max) return c;
  }
  return std::nullopt;
}

}  // namespace

bool JointConfig::finite() const {
  for (double v : q) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

JointConfig JointConfig::normalized() const {
  JointConfig out;
  for (std::size_t i = 0; i < 6; ++i) out.q[i] = wrap_angle(q[i]);
  return out;
}

double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

double joint_distance(const JointConfig& a, const JointConfig& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < 6; ++i) m = std::max(m, std::abs(wrap_angle(a.q[i] - b.q[i])));
  return m;
}

void RobotModel::validate() const {
  for (std::size_t i = 0; i < 6; ++i) {
    if (!(limits[i].min < limits[i].max)) {
      throw ArgumentError("joint " + std::to_string(i + 1) + ": limit min must be below max");
    }
  }
  const bool ur_layout = dh[0].a == 0.0 && near_angle(dh[0].alpha, kPi / 2) && dh[1].d == 0.0 &&
                         dh[2].d == 0.0 && near_angle(dh[1].alpha, 0.0) &&
                         near_angle(dh[2].alpha, 0.0) && dh[3].a == 0.0 &&
                         near_angle(dh[3].alpha, kPi / 2) && dh[4].a == 0.0 &&
                         near_angle(dh[4].alpha, -kPi / 2) && dh[5].a == 0.0 &&
                         near_angle(dh[5].alpha, 0.0);
  if (!ur_layout) throw ArgumentError("robot model is not a UR-family 6R layout");
  if (dh[1].a == 0.0 || dh[2].a == 0.0 || dh[5].d == 0.0) {
    throw ArgumentError("robot model needs non-zero upper arm, forearm and wrist-3 lengths");
  }
  if (!tcp.is_valid()) throw ArgumentError("TCP offset is not a rigid transform");
}

bool RobotModel::within_limits(const JointConfig& q) const {
  for (std::size_t i = 0; i < 6; ++i) {
    if (q.q[i] < limits[i].min || q.q[i] > limits[i].max) return false;
  }
  return true;
}

RobotModel RobotModel::ur5() {
  RobotModel r;
  r.dh = {DhRow{0.0, 0.089159, kPi / 2, 0.0}, DhRow{-0.425, 0.0, 0.0, 0.0},
          DhRow{-0.39225, 0.0, 0.0, 0.0},     DhRow{0.0, 0.10915, kPi / 2, 0.0},
          DhRow{0.0, 0.09465, -kPi / 2, 0.0}, DhRow{0.0, 0.0823, 0.0, 0.0}};
  r.tcp = RigidTransform::from_translation(Vec3(0.0, 0.0, 0.15));
  return r;
}

std::array<RigidTransform, 7> link_frames(const RobotModel& robot, const JointConfig& q) {
  std::array<RigidTransform, 7> frames;
  for (std::size_t i = 0; i < 6; ++i) frames[i + 1] = frames[i] * dh_transform(robot.dh[i], q.q[i]);
  return frames;
}

RigidTransform fk(const RobotModel& robot, const JointConfig& q) {
  return link_frames(robot, q)[6] * robot.tcp;
}

std::vector<IkSolution> ik(const RobotModel& robot, const RigidTransform& target) {
  std::vector<IkSolution> out;
  const RigidTransform flange = target * robot.tcp.inverse();
  const geometry::Mat3& r = flange.rotation();
  const Vec3& p = flange.translation();
  const double d4 = robot.dh[3].d;
  const double d6 = robot.dh[5].d;
  const double a2 = robot.dh[1].a;
  const double a3 = robot.dh[2].a;

  const Vec3 p05 = p - d6 * r.col(2);
  const double rxy = std::hypot(p05.x(), p05.y());
  if (!(rxy > 0.0)) return out;
  const double shoulder_arg = d4 / rxy;
  if (std::abs(shoulder_arg) >= 1.0 - kDomainEdge) return out;
  const double psi = std::atan2(p05.y(), p05.x());
  const double phi = std::acos(shoulder_arg);

  for (int shoulder = 0; shoulder < 2; ++shoulder) {
    const double th1 = psi + (shoulder == 0 ? phi : -phi) + kPi / 2;
    const double s1 = std::sin(th1), c1 = std::cos(th1);
    const double wrist_arg = (p.x() * s1 - p.y() * c1 - d4) / d6;
    if (std::abs(wrist_arg) >= 1.0 - kDomainEdge) continue;
    const double th5_abs = std::acos(wrist_arg);

    for (int wrist = 0; wrist < 2; ++wrist) {
      const double th5 = wrist == 0 ? th5_abs : -th5_abs;
      const double s5 = std::sin(th5);
      if (std::abs(s5) < kDomainEdge) continue;
      const double th6 = std::atan2((-r(0, 1) * s1 + r(1, 1) * c1) / s5,
                                    (r(0, 0) * s1 - r(1, 0) * c1) / s5);

      // Planar problem for the three parallel joints, expressed in frame 1.
      const RigidTransform t01 = dh_transform(robot.dh[0], th1 - robot.dh[0].offset);
      const RigidTransform t45 = dh_transform(robot.dh[4], th5 - robot.dh[4].offset);
      const RigidTransform t56 = dh_transform(robot.dh[5], th6 - robot.dh[5].offset);
      const RigidTransform t14 = t01.inverse() * flange * t56.inverse() * t45.inverse();
      const Vec3 p13 = t14.apply(Vec3(0.0, -d4, 0.0));
      const double elbow_arg = (p13.squaredNorm() - a2 * a2 - a3 * a3) / (2.0 * a2 * a3);
      if (std::abs(elbow_arg) >= 1.0 - kDomainEdge) continue;
      const double th3_abs = std::acos(elbow_arg);

      for (int elbow = 0; elbow < 2; ++elbow) {
        const double th3 = elbow == 0 ? th3_abs : -th3_abs;
        const double th2 =
            std::atan2(p13.y(), p13.x()) - std::atan2(a3 * std::sin(th3), a2 + a3 * std::cos(th3));
        const RigidTransform t12 = dh_transform(robot.dh[1], th2 - robot.dh[1].offset);
        const RigidTransform t23 = dh_transform(robot.dh[2], th3 - robot.dh[2].offset);
        const RigidTransform t34 = (t12 * t23).inverse() * t14;
        const double th4 = std::atan2(t34.rotation()(1, 0), t34.rotation()(0, 0));

        const std::array<double, 6> theta{th1, th2, th3, th4, th5, th6};
        IkSolution sol;
        sol.branch = shoulder * 4 + elbow * 2 + wrist;
        bool ok = true;
        for (std::size_t j = 0; j < 6 && ok; ++j) {
          auto v = fit_limit(theta[j] - robot.dh[j].offset, robot.limits[j]);
          if (!v) ok = false;
          else sol.q.q[j] = *v;
        }
        if (!ok) continue;
        const RigidTransform check = fk(robot, sol.q);
        if (geometry::translation_distance(check, target) >= kResidualTol ||
            geometry::rotation_angle_between(check, target) >= kResidualTol) {
          continue;
        }
        bool duplicate = false;
        for (const auto& s : out) duplicate = duplicate || joint_distance(s.q, sol.q) < kDistinctTol;
        if (!duplicate) out.push_back(sol);
      }
    }
  }
  std::sort(out.begin(), out.end(),
            [](const IkSolution& a, const IkSolution& b) { return a.branch < b.branch; });
  return out;
}

RobotModel load_robot(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open robot model");
  RobotModel robot;
  robot.tcp = RigidTransform::identity();
  std::size_t joints = 0;
  bool saw_tcp = false;
  std::string line;
  std::size_t line_no = 0;
  constexpr double deg = kPi / 180.0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (key == "joint") {
      if (joints >= 6) throw ParseError(path.string(), line_no, "more than six joint rows");
      DhRow row;
      JointLimit lim;
      double alpha_deg, offset_deg, min_deg, max_deg;
      if (!(ls >> row.a >> row.d >> alpha_deg >> offset_deg >> min_deg >> max_deg)) {
        throw ParseError(path.string(), line_no,
                         "joint row needs: a d alpha_deg offset_deg min_deg max_deg");
      }
      row.alpha = alpha_deg * deg;
      row.offset = offset_deg * deg;
      lim.min = min_deg * deg;
      lim.max = max_deg * deg;
      robot.dh[joints] = row;
      robot.limits[joints] = lim;
      ++joints;
    } else if (key == "tcp") {
      geometry::Mat4 m;
      for (int i = 0; i < 16; ++i) {
        if (!(ls >> m(i / 4, i % 4))) {
          throw ParseError(path.string(), line_no, "tcp needs 16 row-major numbers");
        }
      }
      try {
        robot.tcp = RigidTransform::from_matrix(m);
      } catch (const ArgumentError& e) {
        throw ParseError(path.string(), line_no, e.what());
      }
      saw_tcp = true;
    } else {
      throw ParseError(path.string(), line_no, "unknown key '" + key + "'");
    }
  }
  if (joints != 6) {
    throw ParseError(path.string(), line_no, "expected 6 joint rows, found " + std::to_string(joints));
  }
  if (!saw_tcp) throw ParseError(path.string(), line_no, "missing tcp line");
  try {
    robot.validate();
  } catch (const ArgumentError& e) {
    throw ParseError(path.string(), 0, e.what());
  }
  return robot;
}

void save_robot(const RobotModel& robot, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out.precision(17);
  constexpr double rad = 180.0 / kPi;
  out << "# joint a[m] d[m] alpha[deg] offset[deg] min[deg] max[deg]\n";
  for (std::size_t i = 0; i < 6; ++i) {
    const auto& r = robot.dh[i];
    out << "joint " << r.a << ' ' << r.d << ' ' << r.alpha * rad << ' ' << r.offset * rad << ' '
        << robot.limits[i].min * rad << ' ' << robot.limits[i].max * rad << '\n';
  }
  out << "# flange -> TCP, row-major 4x4\ntcp";
  const auto m = robot.tcp.matrix();
  for (int i = 0; i < 16; ++i) out << ' ' << m(i / 4, i % 4);
  out << '\n';
}

}  // namespace binpick::kinematics
