#pragma once

#include <optional>
#include <string>
#include <vector>

#include "catastereo/geometry.hpp"

namespace catastereo {

/// Adapter design parameters. Angles in radians, lengths in meters.
struct AdapterConfig {
  double beta_back = 55.0 * M_PI / 180.0;
  double beta_front = 55.0 * M_PI / 180.0;
  double mirror_distance_back = 0.025;   // camera-mirror distance along the optical axis
  double mirror_distance_front = 0.025;
  double mirror_side = 0.03;             // square mirror side length
  double alpha_real = 80.0 * M_PI / 180.0;  // real camera full FOV
  double subject_height = 1.8;
  /// Front camera center in the back camera's frame (coincident by default).
  Vec3 front_camera_offset = Vec3::Zero();
  /// Camera model used by the simulator and for baseline prediction.
  Intrinsics camera_intrinsics{2383.46, 2383.46, 1499.5, 1999.5, 0.0, 0.0, 0.0};
  int image_width = 3000;
  int image_height = 4000;

  /// Throws MirrorOccludesCamera / InvalidConfig when the parameters are
  /// outside the valid domain (requires 2*b_m > l_m*sin(beta) per side).
  void validate() const;
};

/// Analysis results for one design point. Angles in radians, lengths in
/// meters, FOV fractions in [0, 1].
struct FovReport {
  double alpha_left = 0.0;
  double alpha_right = 0.0;
  double alpha_virtual = 0.0;
  double alpha_inner = 0.0;
  double fov_percent_individual = 0.0;
  double fov_percent_common = 0.0;
  double min_distance = 0.0;
  double baseline_predicted = 0.0;
  double visible_height = 0.0;  // h_FOV at the minimal distance
};

/// Left/right half-FOV of a single virtual camera:
///   alpha_L = atan(l cos b / (2 d + l sin b)),
///   alpha_R = atan(l cos b / (2 d - l sin b)).
struct AlphaPair {
  double left;
  double right;
};
AlphaPair alpha_left_right(double beta, double mirror_distance, double mirror_side);

/// Full virtual-camera FOV, alpha_L + alpha_R.
double alpha_virtual(double beta, double mirror_distance, double mirror_side);

/// Convergence angle of the inner FOV edge: 90deg + alpha_R - 2*beta.
/// Throws DivergingViews when non-positive.
double alpha_inner(double beta, double alpha_right);

/// Minimal subject distance (b + h) / (2 tan alpha_in).
double min_subject_distance(double baseline, double subject_height, double alpha_in);

/// Retained common FOV fraction h / (2 d tan(alpha_real / 2)).
double fov_percent_common(double subject_height, double distance, double alpha_real);

/// Distance between the two virtual camera centers, computed geometrically
/// by reflecting both real cameras in their mirrors.
double predicted_baseline(const AdapterConfig& cfg);

/// Full report for one design point. `baseline_override` replaces the
/// geometric baseline in the d_min computation when provided.
FovReport analyze(const AdapterConfig& cfg, std::optional<double> baseline_override = {});

/// One sweep row; rows whose preconditions fail carry the error name in
/// `status` instead of being dropped.
struct SweepRow {
  double beta;
  double mirror_distance;
  double mirror_side;
  FovReport report;
  std::string status;  // "ok" or an error name

  bool ok() const { return status == "ok"; }
};

/// Cartesian sweep over the design degrees of freedom (applied to both
/// mirrors symmetrically). Empty ranges evaluate the base config values.
/// Throws InsufficientData on an empty grid.
std::vector<SweepRow> sweep(const AdapterConfig& base, const std::vector<double>& betas,
                            const std::vector<double>& mirror_distances,
                            const std::vector<double>& mirror_sides,
                            std::optional<double> baseline_override = {});

}  // namespace catastereo
