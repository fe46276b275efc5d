#include "catastereo/simulator.hpp"

#include <cmath>
#include <random>

namespace catastereo {
namespace {

/// General affine map p -> A p + b; composing the two improper reflected
/// camera maps yields the proper relative transform of the virtual pair.
struct AffineMap {
  Mat3 a;
  Vec3 b;

  AffineMap compose(const AffineMap& other) const { return {a * other.a, a * other.b + b}; }
  AffineMap inverse() const {
    const Mat3 a_inv = a.inverse();
    return {a_inv, -(a_inv * b)};
  }
};

AffineMap reflected_camera_map(const Camera& real, const Mirror& m) {
  return {m.linear() * real.pose.rotation,
          m.linear() * real.pose.translation + 2.0 * m.offset * m.normal};
}

Vec2 noisy(const Vec2& px, double sigma, std::mt19937_64* rng) {
  if (sigma <= 0.0) {
    return px;
  }
  std::normal_distribution<double> gauss(0.0, sigma);
  const double du = gauss(*rng);
  const double dv = gauss(*rng);
  return {px.x() + du, px.y() + dv};
}

}  // namespace

MirrorPatch adapter_mirror_patch(double beta, double distance, double side, int tilt_sign) {
  const double sign = tilt_sign >= 0 ? 1.0 : -1.0;
  MirrorPatch patch;
  patch.plane = adapter_mirror(beta, distance, tilt_sign);
  patch.center = Vec3(0.0, 0.0, distance);
  patch.u_axis = Vec3(1.0, 0.0, 0.0);
  patch.v_axis = Vec3(0.0, std::cos(beta), sign * std::sin(beta));
  patch.half_u = side / 2.0;
  patch.half_v = side / 2.0;
  return patch;
}

RigBuild build_rig(const AdapterConfig& cfg) {
  cfg.validate();

  RigBuild out;
  out.real_back = Camera{cfg.camera_intrinsics, RigidTransform::identity(), cfg.image_width,
                         cfg.image_height, false};
  Mat3 rot_front;
  rot_front << 1, 0, 0, 0, -1, 0, 0, 0, -1;  // pi about x: opposite optical axis
  out.real_front = Camera{cfg.camera_intrinsics,
                          RigidTransform{rot_front, -(rot_front * cfg.front_camera_offset)},
                          cfg.image_width, cfg.image_height, false};
  out.real_back.validate();
  out.real_front.validate();

  out.mirror_back = adapter_mirror_patch(cfg.beta_back, cfg.mirror_distance_back, cfg.mirror_side,
                                         +1);
  out.mirror_front = adapter_mirror_patch(cfg.beta_front, cfg.mirror_distance_front,
                                          cfg.mirror_side, -1);

  out.rig.cam_a = virtual_camera(out.real_back, out.mirror_back.plane);
  out.rig.cam_b = virtual_camera(out.real_front, out.mirror_front.plane);

  const AffineMap raw_a = reflected_camera_map(out.real_back, out.mirror_back.plane);
  const AffineMap raw_b = reflected_camera_map(out.real_front, out.mirror_front.plane);
  const AffineMap rel = raw_b.compose(raw_a.inverse());
  out.rig.relative = RigidTransform{nearest_rotation(rel.a), rel.b};
  return out;
}

MirrorProjection try_project_via_mirror(const Camera& real, const MirrorPatch& patch,
                                        const Vec3& world_point) {
  MirrorProjection out;
  const Vec3 p = real.pose.apply(world_point);
  const Vec3 reflected = patch.plane.reflect_point(p);
  if (reflected.z() <= 0.0) {
    out.behind = true;
    return out;
  }

  // The viewing ray toward the reflected point must cross the physical
  // mirror rectangle.
  const double denom = patch.plane.normal.dot(reflected);
  if (std::abs(denom) > 1e-15) {
    const double t = patch.plane.offset / denom;
    if (t > 0.0 && t <= 1.0 + 1e-12) {
      const Vec3 hit = t * reflected;
      const double du = (hit - patch.center).dot(patch.u_axis);
      const double dv = (hit - patch.center).dot(patch.v_axis);
      out.on_mirror = std::abs(du) <= patch.half_u && std::abs(dv) <= patch.half_v;
    }
  }

  out.pixel = real.project_camera_point(reflected);
  out.in_image = real.in_image(out.pixel);
  return out;
}

Vec2 project_via_mirror(const Camera& real, const MirrorPatch& patch, const Vec3& world_point) {
  const MirrorProjection proj = try_project_via_mirror(real, patch, world_point);
  if (proj.behind) {
    throw Error(ErrorCode::BehindCamera, "reflected point behind the real camera");
  }
  if (!proj.on_mirror) {
    throw Error(ErrorCode::OutOfMirror, "viewing ray misses the finite mirror");
  }
  return proj.pixel;
}

bool visible_in_both(const RigBuild& rig, const Vec3& world_point) {
  return try_project_via_mirror(rig.real_back, rig.mirror_back, world_point).visible() &&
         try_project_via_mirror(rig.real_front, rig.mirror_front, world_point).visible();
}

SyntheticSession generate_chessboard_session(const AdapterConfig& cfg, int n_views,
                                             const BoardSpec& board, double noise_sigma,
                                             std::uint64_t seed) {
  if (n_views < 1) {
    throw Error(ErrorCode::InvalidConfig, "need at least one view");
  }
  SyntheticSession session;
  session.config = cfg;
  session.rig = build_rig(cfg);
  session.observations.board = board;
  session.observations.image_width = cfg.image_width;
  session.observations.image_height = cfg.image_height;
  session.noise_sigma = noise_sigma;
  session.seed = seed;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  // Board center offset in its own frame.
  const Vec3 board_center((board.cols - 1) * board.square_size / 2.0,
                          (board.rows - 1) * board.square_size / 2.0, 0.0);
  Mat3 base;  // board x -> world x, board y -> world z, board z -> world -y
  base << 1, 0, 0, 0, 0, -1, 0, 1, 0;

  const double min_normal_separation = 10.0 * M_PI / 180.0;
  std::vector<Vec3> accepted_normals;

  int attempts = 0;
  const int max_attempts = 10000;
  while (static_cast<int>(session.board_poses.size()) < n_views) {
    if (++attempts > max_attempts) {
      throw Error(ErrorCode::DegenerateGeometry,
                  "could not place boards in the common FOV (empty or too small)");
    }
    const double dist = 0.45 + 0.85 * u01(rng);
    const Vec3 center_world(0.12 * dist * (2.0 * u01(rng) - 1.0), dist,
                            0.06 * (2.0 * u01(rng) - 1.0));

    const double tilt_angle = (5.0 + 25.0 * u01(rng)) * M_PI / 180.0;
    const double azimuth = 2.0 * M_PI * u01(rng);
    const double polar = std::acos(2.0 * u01(rng) - 1.0);
    const Vec3 axis(std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth),
                    std::cos(polar));
    const Mat3 rotation = so3_exp(tilt_angle * axis) * base;

    const Vec3 normal = rotation.col(2);
    bool separated = true;
    for (const Vec3& prev : accepted_normals) {
      if (std::acos(std::clamp(normal.dot(prev), -1.0, 1.0)) < min_normal_separation) {
        separated = false;
        break;
      }
    }
    if (!separated) {
      continue;
    }

    const RigidTransform pose{rotation, center_world - rotation * board_center};
    bool all_visible = true;
    for (int idx = 0; idx < board.corner_count() && all_visible; ++idx) {
      all_visible = visible_in_both(session.rig, pose.apply(board.corner(idx)));
    }
    if (!all_visible) {
      continue;
    }

    ViewObservations view;
    view.view_id = static_cast<int>(session.board_poses.size());
    for (int idx = 0; idx < board.corner_count(); ++idx) {
      const Vec3 world = pose.apply(board.corner(idx));
      view.cam_a.push_back({idx, noisy(session.rig.rig.cam_a.project(world), noise_sigma, &rng)});
      view.cam_b.push_back({idx, noisy(session.rig.rig.cam_b.project(world), noise_sigma, &rng)});
    }
    session.observations.views.push_back(std::move(view));
    session.board_poses.push_back(pose);
    accepted_normals.push_back(normal);
  }
  return session;
}

SkeletonViews generate_skeleton_views(const RigBuild& rig, const AdapterConfig& cfg,
                                      const std::array<Vec3, kJointCount>& joints_world,
                                      double noise_sigma, std::uint64_t seed) {
  SkeletonViews out;
  out.joints_world = joints_world;
  std::mt19937_64 rng(seed);

  double mean_distance = 0.0;
  for (int j = 0; j < kJointCount; ++j) {
    const Vec3& world = joints_world[j];
    mean_distance += world.y();
    const MirrorProjection pa = try_project_via_mirror(rig.real_back, rig.mirror_back, world);
    const MirrorProjection pb = try_project_via_mirror(rig.real_front, rig.mirror_front, world);
    if (pa.visible()) {
      out.cam_a[j] = {noisy(rig.rig.cam_a.project(world), noise_sigma, &rng), 1.0};
    }
    if (pb.visible()) {
      out.cam_b[j] = {noisy(rig.rig.cam_b.project(world), noise_sigma, &rng), 1.0};
    }
  }
  mean_distance /= kJointCount;

  try {
    const FovReport report = analyze(cfg);
    out.below_min_distance = mean_distance < report.min_distance;
  } catch (const Error&) {
    out.below_min_distance = false;
  }
  return out;
}

std::array<Vec3, kJointCount> humanoid_template(double height) {
  // (lateral, forward, up) in meters for a 1.8 m reference, scaled.
  static const double kBase[kJointCount][3] = {
      {0.000, 0.060, 1.660},    // Nose
      {0.000, 0.000, 1.510},    // Neck
      {-0.155, 0.000, 1.490},   // RShoulder
      {-0.175, 0.010, 1.230},   // RElbow
      {-0.185, 0.030, 0.990},   // RWrist
      {0.155, 0.000, 1.490},    // LShoulder
      {0.175, 0.010, 1.230},    // LElbow
      {0.185, 0.030, 0.990},    // LWrist
      {0.000, 0.000, 0.940},    // MidHip
      {-0.105, 0.000, 0.940},   // RHip
      {-0.110, 0.010, 0.500},   // RKnee
      {-0.115, 0.000, 0.080},   // RAnkle
      {0.105, 0.000, 0.940},    // LHip
      {0.110, 0.010, 0.500},    // LKnee
      {0.115, 0.000, 0.080},    // LAnkle
      {-0.033, 0.070, 1.710},   // REye
      {0.033, 0.070, 1.710},    // LEye
      {-0.072, 0.015, 1.690},   // REar
      {0.072, 0.015, 1.690},    // LEar
      {0.125, 0.140, 0.015},    // LBigToe
      {0.155, 0.120, 0.015},    // LSmallToe
      {0.115, -0.040, 0.020},   // LHeel
      {-0.125, 0.140, 0.015},   // RBigToe
      {-0.155, 0.120, 0.015},   // RSmallToe
      {-0.115, -0.040, 0.020},  // RHeel
  };
  const double scale = height / 1.8;
  std::array<Vec3, kJointCount> joints;
  for (int j = 0; j < kJointCount; ++j) {
    joints[j] = scale * Vec3(kBase[j][0], kBase[j][1], kBase[j][2]);
  }
  return joints;
}

std::array<Vec3, kJointCount> linear_subject_template(double height) {
  std::array<Vec3, kJointCount> joints;
  for (int j = 0; j < kJointCount; ++j) {
    joints[j] = Vec3(0.0, 0.0, height * j / (kJointCount - 1.0));
  }
  return joints;
}

std::array<Vec3, kJointCount> place_subject(const std::array<Vec3, kJointCount>& local,
                                            double distance, double height) {
  // Height spans the baseline direction (z), centered on the symmetry
  // plane; the subject faces the rig along -y.
  std::array<Vec3, kJointCount> world;
  for (int j = 0; j < kJointCount; ++j) {
    world[j] = Vec3(local[j].x(), distance - local[j].y(), local[j].z() - height / 2.0);
  }
  return world;
}

double empirical_min_subject_distance(const RigBuild& rig, double height) {
  const std::array<Vec3, kJointCount> local = linear_subject_template(height);
  const auto fully_visible = [&](double d) {
    for (const Vec3& world : place_subject(local, d, height)) {
      if (!visible_in_both(rig, world)) {
        return false;
      }
    }
    return true;
  };

  double hi = 1.0;
  while (!fully_visible(hi)) {
    hi *= 2.0;
    if (hi > 1e4) {
      throw Error(ErrorCode::DegenerateGeometry, "subject never fits the common FOV");
    }
  }
  double lo = hi / 2.0;
  if (fully_visible(lo * 1e-3)) {
    return 0.0;
  }
  while (fully_visible(lo)) {
    lo /= 2.0;
  }
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (fully_visible(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

Vec3 world_to_reconstruction_frame(const RigBuild& rig, const Vec3& world_point) {
  // Raw reflected back-camera frame: reflect the camera-frame point in
  // the back mirror.
  return rig.mirror_back.plane.reflect_point(rig.real_back.pose.apply(world_point));
}

}  // namespace catastereo
