#pragma once

#include <optional>
#include <vector>

#include "catastereo/geometry.hpp"

namespace catastereo {

/// Planar chessboard target: rows x cols inner corners, square_size meters.
/// Corner index k = row * cols + col maps to board point
/// (col * square_size, row * square_size, 0).
struct BoardSpec {
  int rows = 6;
  int cols = 9;
  double square_size = 0.03;

  int corner_count() const { return rows * cols; }
  Vec3 corner(int index) const {
    return {(index % cols) * square_size, (index / cols) * square_size, 0.0};
  }
};

struct CornerDetection {
  int corner_index;
  Vec2 pixel;
};

/// Chessboard corner detections for one view, per camera. Pixels are in
/// the upright (pre-flipped) image convention.
struct ViewObservations {
  int view_id = 0;
  std::vector<CornerDetection> cam_a;
  std::vector<CornerDetection> cam_b;
};

struct CornerObservations {
  BoardSpec board;
  std::vector<ViewObservations> views;
  int image_width = 0;   // optional metadata (0 = unknown)
  int image_height = 0;

  /// Enforces index bounds and per-camera uniqueness per view.
  void validate() const;
};

struct CalibrationOptions {
  bool estimate_distortion = true;
  bool estimate_skew = false;
  bool huber = false;
  double huber_delta = 2.0;  // pixels
  int max_iterations = 200;
  double relative_tolerance = 1e-10;
};

struct ViewPoses {
  int view_id = 0;
  RigidTransform pose_a;  // board -> cam_a
  RigidTransform pose_b;  // board -> cam_b
  double mean_error_px = 0.0;
};

struct CalibrationResult {
  Intrinsics cam_a;
  Intrinsics cam_b;
  RigidTransform relative;  // cam_a -> cam_b
  std::vector<ViewPoses> views;
  double mean_error_px = 0.0;  // mean Euclidean pixel error over all points
  double rms_px = 0.0;         // per-coordinate RMS residual
  bool converged = false;
  int iterations = 0;
  int image_width = 0;
  int image_height = 0;

  StereoRig rig() const;
};

/// Conditions 2D points to centroid zero and mean distance sqrt(2);
/// returns the conditioned points and the 3x3 similarity that maps the
/// originals onto them. Throws DegenerateGeometry when all points
/// coincide.
struct NormalizedPoints {
  std::vector<Vec2> points;
  Mat3 similarity;
};
NormalizedPoints normalize_points(const std::vector<Vec2>& points);

/// DLT homography from >= 4 non-collinear correspondences, algebraic
/// least squares on conditioned points, scaled so H(2,2) = 1 when
/// possible.
Mat3 estimate_homography(const std::vector<Vec2>& board_points,
                         const std::vector<Vec2>& image_points);

/// Closed-form intrinsics from >= 3 homographies of distinct board poses
/// (absolute-conic constraints). Skew is fixed to zero unless
/// estimate_skew. Throws IllConditioned with a condition-number
/// diagnostic for degenerate pose sets.
Intrinsics intrinsics_from_homographies(const std::vector<Mat3>& homographies,
                                        bool estimate_skew = false);

/// Board pose from a homography and intrinsics, projected to the nearest
/// rotation, with the board constrained in front of the camera.
RigidTransform extrinsics_from_homography(const Mat3& homography, const Intrinsics& intrinsics);

/// Relative transform cam_a -> cam_b averaged over per-view pose pairs:
/// rotations by the eigen-decomposition quaternion mean, translations by
/// component mean.
RigidTransform stereo_relative(const std::vector<RigidTransform>& poses_a,
                               const std::vector<RigidTransform>& poses_b);

/// Joint damped-least-squares refinement of intrinsics (incl. distortion),
/// per-view board poses and the relative transform, minimizing squared
/// pixel reprojection error. Deterministic; never returns a result worse
/// than the initialization.
CalibrationResult refine(const CalibrationResult& initial, const CornerObservations& observations,
                         const CalibrationOptions& options = {});

/// Full pipeline: per-camera Zhang closed form, per-view extrinsics,
/// relative-pose averaging, then refine().
CalibrationResult calibrate_stereo(const CornerObservations& observations,
                                   const CalibrationOptions& options = {});

}  // namespace catastereo
