#include "catastereo/reconstruction.hpp"

#include <algorithm>
#include <cmath>

namespace catastereo {
namespace {

constexpr double kMinRayAngleRad = 0.1 * M_PI / 180.0;

struct Rays {
  Vec3 dir_a;      // cam_a frame, unit
  Vec3 dir_b;      // cam_a frame, unit
  Vec3 origin_b;   // cam_b center in cam_a frame
  Vec2 norm_a;     // undistorted normalized coordinates
  Vec2 norm_b;
};

Rays back_project(const StereoRig& rig, const Vec2& pixel_a, const Vec2& pixel_b) {
  Rays r;
  r.norm_a = rig.cam_a.pixel_to_normalized(pixel_a);
  r.norm_b = rig.cam_b.pixel_to_normalized(pixel_b);
  r.dir_a = Vec3(r.norm_a.x(), r.norm_a.y(), 1.0).normalized();
  const Mat3 rot_ba = rig.relative.rotation.transpose();
  r.dir_b = (rot_ba * Vec3(r.norm_b.x(), r.norm_b.y(), 1.0)).normalized();
  r.origin_b = -(rot_ba * rig.relative.translation);
  return r;
}

double ray_angle(const Rays& r) {
  return std::acos(std::clamp(r.dir_a.dot(r.dir_b), -1.0, 1.0));
}

}  // namespace

const char* body25_joint_name(int index) {
  static const char* kNames[kJointCount] = {
      "Nose",  "Neck",  "RShoulder", "RElbow",    "RWrist", "LShoulder", "LElbow",
      "LWrist", "MidHip", "RHip",     "RKnee",     "RAnkle", "LHip",      "LKnee",
      "LAnkle", "REye",  "LEye",      "REar",      "LEar",   "LBigToe",   "LSmallToe",
      "LHeel",  "RBigToe", "RSmallToe", "RHeel"};
  return (index >= 0 && index < kJointCount) ? kNames[index] : "unknown";
}

int Skeleton::valid_count() const {
  return static_cast<int>(std::count(valid.begin(), valid.end(), true));
}

TriangulatedPoint triangulate_dlt(const StereoRig& rig, const Vec2& pixel_a, const Vec2& pixel_b) {
  const Rays rays = back_project(rig, pixel_a, pixel_b);
  if (ray_angle(rays) < kMinRayAngleRad) {
    throw Error(ErrorCode::NearParallelRays, "triangulation angle below 0.1 degrees");
  }

  // Algebraic least squares on the two normalized projections:
  // P_a = [I | 0], P_b = [R | t].
  Eigen::Matrix<double, 3, 4> pa = Eigen::Matrix<double, 3, 4>::Zero();
  pa.leftCols<3>().setIdentity();
  Eigen::Matrix<double, 3, 4> pb;
  pb.leftCols<3>() = rig.relative.rotation;
  pb.rightCols<1>() = rig.relative.translation;

  Eigen::Matrix4d a;
  a.row(0) = rays.norm_a.x() * pa.row(2) - pa.row(0);
  a.row(1) = rays.norm_a.y() * pa.row(2) - pa.row(1);
  a.row(2) = rays.norm_b.x() * pb.row(2) - pb.row(0);
  a.row(3) = rays.norm_b.y() * pb.row(2) - pb.row(1);

  Eigen::JacobiSVD<Eigen::Matrix4d> svd(a, Eigen::ComputeFullV);
  const Eigen::Vector4d xh = svd.matrixV().col(3);
  if (std::abs(xh(3)) < 1e-15) {
    throw Error(ErrorCode::NearParallelRays, "triangulated point at infinity");
  }
  const Vec3 point = xh.head<3>() / xh(3);

  if (point.z() <= 0.0 || rig.relative.apply(point).z() <= 0.0) {
    throw Error(ErrorCode::Cheirality, "triangulated point behind a camera");
  }

  TriangulatedPoint out;
  out.point = point;
  out.residual_a_px = (rig.cam_a.project_working_point(point) - pixel_a).norm();
  out.residual_b_px =
      (rig.cam_b.project_working_point(rig.relative.apply(point)) - pixel_b).norm();
  return out;
}

Vec3 triangulate_midpoint(const StereoRig& rig, const Vec2& pixel_a, const Vec2& pixel_b) {
  const Rays rays = back_project(rig, pixel_a, pixel_b);
  if (ray_angle(rays) < kMinRayAngleRad) {
    throw Error(ErrorCode::NearParallelRays, "rays are (near-)parallel");
  }

  // Shortest segment between p = s*da and q = ob + t*db.
  const Vec3 w0 = -rays.origin_b;
  const double a = rays.dir_a.dot(rays.dir_a);
  const double b = rays.dir_a.dot(rays.dir_b);
  const double c = rays.dir_b.dot(rays.dir_b);
  const double d = rays.dir_a.dot(w0);
  const double e = rays.dir_b.dot(w0);
  const double den = a * c - b * b;
  if (std::abs(den) < 1e-15) {
    throw Error(ErrorCode::NearParallelRays, "rays are parallel");
  }
  const double s = (b * e - c * d) / den;
  const double t = (a * e - b * d) / den;
  return 0.5 * (s * rays.dir_a + (rays.origin_b + t * rays.dir_b));
}

PlaneFit fit_plane(const std::vector<Vec3>& points) {
  if (points.size() < 3) {
    throw Error(ErrorCode::InsufficientData, "plane fit needs at least 3 points");
  }
  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : points) {
    centroid += p;
  }
  centroid /= static_cast<double>(points.size());

  Mat3 scatter = Mat3::Zero();
  for (const Vec3& p : points) {
    const Vec3 d = p - centroid;
    scatter += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(scatter);
  // Collinear points leave two near-zero principal directions.
  if (eig.eigenvalues()(1) < 1e-12 * std::max(eig.eigenvalues()(2), 1e-300)) {
    throw Error(ErrorCode::DegenerateGeometry, "points are collinear");
  }
  Vec3 normal = eig.eigenvectors().col(0);
  // Deterministic orientation: largest-magnitude component positive.
  int max_idx = 0;
  normal.cwiseAbs().maxCoeff(&max_idx);
  if (normal(max_idx) < 0.0) {
    normal = -normal;
  }

  PlaneFit fit;
  fit.normal = normal;
  fit.offset = normal.dot(centroid);
  fit.rms = std::sqrt(eig.eigenvalues()(0) / static_cast<double>(points.size()));
  return fit;
}

PlaneDistanceReport plane_distance_report(const CalibrationResult& calibration,
                                          const CornerObservations& observations) {
  observations.validate();
  const StereoRig rig = calibration.rig();

  PlaneDistanceReport report;
  std::array<double, 3> sums{};
  for (const ViewPoses& vp : calibration.views) {
    auto obs_it =
        std::find_if(observations.views.begin(), observations.views.end(),
                     [&](const ViewObservations& v) { return v.view_id == vp.view_id; });
    if (obs_it == observations.views.end()) {
      report.skipped_views.push_back(vp.view_id);
      continue;
    }

    // Corners observed by both cameras, matched by index.
    std::vector<std::pair<Vec2, Vec2>> pairs(observations.board.corner_count(),
                                             {Vec2::Constant(-1), Vec2::Constant(-1)});
    std::vector<bool> has_a(observations.board.corner_count(), false);
    std::vector<bool> has_b(observations.board.corner_count(), false);
    for (const CornerDetection& det : obs_it->cam_a) {
      pairs[det.corner_index].first = det.pixel;
      has_a[det.corner_index] = true;
    }
    for (const CornerDetection& det : obs_it->cam_b) {
      pairs[det.corner_index].second = det.pixel;
      has_b[det.corner_index] = true;
    }

    std::array<double, 3> view_sum{};
    int used = 0;
    for (int idx = 0; idx < observations.board.corner_count(); ++idx) {
      if (!has_a[idx] || !has_b[idx]) {
        continue;
      }
      const Vec3 triangulated = triangulate_dlt(rig, pairs[idx].first, pairs[idx].second).point;
      const Vec3 ideal = vp.pose_a.apply(observations.board.corner(idx));
      const Vec3 diff = (triangulated - ideal).cwiseAbs();
      for (int axis = 0; axis < 3; ++axis) {
        view_sum[axis] += diff(axis);
      }
      ++used;
    }
    if (used < 4) {
      report.skipped_views.push_back(vp.view_id);
      continue;
    }
    std::array<double, 3> row{};
    for (int axis = 0; axis < 3; ++axis) {
      row[axis] = 1000.0 * view_sum[axis] / used;  // meters -> mm
      sums[axis] += row[axis];
    }
    report.view_ids.push_back(vp.view_id);
    report.per_view_mm.push_back(row);
  }

  if (!report.per_view_mm.empty()) {
    for (int axis = 0; axis < 3; ++axis) {
      report.mean_mm[axis] = sums[axis] / static_cast<double>(report.per_view_mm.size());
    }
  }
  return report;
}

Skeleton reconstruct_skeleton(const StereoRig& rig, const Keypoints2D& keypoints_a,
                              const Keypoints2D& keypoints_b, double confidence_threshold) {
  Skeleton skeleton;
  for (int j = 0; j < kJointCount; ++j) {
    skeleton.valid[j] = false;
    if (keypoints_a[j].confidence < confidence_threshold ||
        keypoints_b[j].confidence < confidence_threshold) {
      continue;
    }
    try {
      skeleton.joints[j] = triangulate_dlt(rig, keypoints_a[j].pixel, keypoints_b[j].pixel).point;
      skeleton.valid[j] = true;
    } catch (const Error&) {
      // Degenerate correspondence for this joint only; leave it flagged.
    }
  }
  if (skeleton.valid_count() < 2) {
    throw Error(ErrorCode::EmptySkeleton, "fewer than 2 joints could be triangulated");
  }
  return skeleton;
}

namespace {

std::optional<double> joint_distance(const Skeleton& s, int a, int b) {
  if (!s.valid[a] || !s.valid[b]) {
    return std::nullopt;
  }
  return (s.joints[a] - s.joints[b]).norm();
}

std::optional<double> side_mean(std::optional<double> left, std::optional<double> right) {
  if (left && right) {
    return 0.5 * (*left + *right);
  }
  if (left) {
    return left;
  }
  return right;
}

}  // namespace

SegmentReport segment_lengths(const Skeleton& skeleton,
                              const std::optional<ReferenceLengths>& reference) {
  struct LimbSpec {
    const char* name;
    int right_from, right_to;
    int left_from, left_to;
  };
  // Width segments span left-right joint pairs; limb segments are
  // measured per side and reported as the side mean.
  const LimbSpec limbs[] = {
      {"lower_arm", kRElbow, kRWrist, kLElbow, kLWrist},
      {"upper_arm", kRShoulder, kRElbow, kLShoulder, kLElbow},
      {"shoulders", kRShoulder, kLShoulder, -1, -1},
      {"hips", kRHip, kLHip, -1, -1},
      {"upper_leg", kRHip, kRKnee, kLHip, kLKnee},
      {"lower_leg", kRKnee, kRAnkle, kLKnee, kLAnkle},
  };

  SegmentReport report;
  double diff_sum = 0.0;
  int diff_count = 0;
  for (const LimbSpec& spec : limbs) {
    SegmentMeasure m;
    m.name = spec.name;
    if (spec.left_from < 0) {
      m.length = joint_distance(skeleton, spec.right_from, spec.right_to);
    } else {
      m.right = joint_distance(skeleton, spec.right_from, spec.right_to);
      m.left = joint_distance(skeleton, spec.left_from, spec.left_to);
      m.length = side_mean(m.left, m.right);
    }
    if (reference) {
      if (m.name == "lower_arm") m.reference = reference->lower_arm;
      else if (m.name == "upper_arm") m.reference = reference->upper_arm;
      else if (m.name == "shoulders") m.reference = reference->shoulders;
      else if (m.name == "hips") m.reference = reference->hips;
      else if (m.name == "upper_leg") m.reference = reference->upper_leg;
      else if (m.name == "lower_leg") m.reference = reference->lower_leg;
    }
    if (m.length && m.reference) {
      m.abs_diff = std::abs(*m.length - *m.reference);
      diff_sum += *m.abs_diff;
      ++diff_count;
    }
    report.segments.push_back(std::move(m));
  }
  if (diff_count > 0) {
    report.mean_abs_diff = diff_sum / diff_count;
  }
  return report;
}

}  // namespace catastereo
