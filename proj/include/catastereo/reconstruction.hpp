#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "catastereo/calibration.hpp"
#include "catastereo/geometry.hpp"

namespace catastereo {

/// BODY_25 joint indices (OpenPose output layout).
enum Body25 : int {
  kNose = 0,
  kNeck = 1,
  kRShoulder = 2,
  kRElbow = 3,
  kRWrist = 4,
  kLShoulder = 5,
  kLElbow = 6,
  kLWrist = 7,
  kMidHip = 8,
  kRHip = 9,
  kRKnee = 10,
  kRAnkle = 11,
  kLHip = 12,
  kLKnee = 13,
  kLAnkle = 14,
  kREye = 15,
  kLEye = 16,
  kREar = 17,
  kLEar = 18,
  kLBigToe = 19,
  kLSmallToe = 20,
  kLHeel = 21,
  kRBigToe = 22,
  kRSmallToe = 23,
  kRHeel = 24,
};
constexpr int kJointCount = 25;
const char* body25_joint_name(int index);

struct Joint2D {
  Vec2 pixel = Vec2::Zero();
  double confidence = 0.0;
};

/// 25 detected joints for one camera view.
using Keypoints2D = std::array<Joint2D, kJointCount>;

struct Skeleton {
  std::array<Vec3, kJointCount> joints{};
  std::array<bool, kJointCount> valid{};

  int valid_count() const;
};

/// One measured body segment; limb segments carry per-side values and
/// report their mean.
struct SegmentMeasure {
  std::string name;
  std::optional<double> left;
  std::optional<double> right;
  std::optional<double> length;     // meters; side mean for limb segments
  std::optional<double> reference;  // tape measurement, meters
  std::optional<double> abs_diff;
};

struct SegmentReport {
  std::vector<SegmentMeasure> segments;  // lower_arm, upper_arm, shoulders, hips,
                                         // upper_leg, lower_leg
  std::optional<double> mean_abs_diff;
};

/// Reference tape measurements (meters); any subset may be present.
struct ReferenceLengths {
  std::optional<double> lower_arm;
  std::optional<double> upper_arm;
  std::optional<double> shoulders;
  std::optional<double> hips;
  std::optional<double> upper_leg;
  std::optional<double> lower_leg;
};

struct TriangulatedPoint {
  Vec3 point;               // cam_a frame
  double residual_a_px;     // reprojection residual per view
  double residual_b_px;
};

/// DLT triangulation of one pixel correspondence. Pixels are undistorted
/// first. Throws NearParallelRays below 0.1 degrees of ray separation and
/// Cheirality when the point lands behind a camera.
TriangulatedPoint triangulate_dlt(const StereoRig& rig, const Vec2& pixel_a, const Vec2& pixel_b);

/// Midpoint of the shortest segment between the two back-projected rays.
Vec3 triangulate_midpoint(const StereoRig& rig, const Vec2& pixel_a, const Vec2& pixel_b);

/// Total-least-squares plane through >= 3 non-collinear points.
struct PlaneFit {
  Vec3 normal;     // unit
  double offset;   // plane is {x : normal . x = offset}
  double rms;      // rms orthogonal distance
};
PlaneFit fit_plane(const std::vector<Vec3>& points);

/// Per-view, per-axis mean absolute deviation (mm) between triangulated
/// chessboard corners and the ideal grid placed at the estimated board
/// pose, in the cam_a frame.
struct PlaneDistanceReport {
  std::vector<int> view_ids;
  std::vector<std::array<double, 3>> per_view_mm;  // X, Y, Z per view
  std::array<double, 3> mean_mm{};
  std::vector<int> skipped_views;
};
PlaneDistanceReport plane_distance_report(const CalibrationResult& calibration,
                                          const CornerObservations& observations);

/// Triangulates every joint whose confidence reaches the threshold in
/// both views; joints that fail stay flagged invalid. Throws
/// EmptySkeleton when fewer than 2 joints survive.
Skeleton reconstruct_skeleton(const StereoRig& rig, const Keypoints2D& keypoints_a,
                              const Keypoints2D& keypoints_b, double confidence_threshold = 0.3);

/// Segment lengths over the fixed joint-pair table; unavailable segments
/// are excluded from the mean difference.
SegmentReport segment_lengths(const Skeleton& skeleton,
                              const std::optional<ReferenceLengths>& reference = {});

}  // namespace catastereo
