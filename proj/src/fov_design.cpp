#include "catastereo/fov_design.hpp"

#include <algorithm>
#include <cmath>

namespace catastereo {
namespace {

void validate_side(double beta, double distance, double side) {
  if (!(beta > 0.0 && beta < M_PI / 2.0)) {
    throw Error(ErrorCode::InvalidConfig, "mirror angle must be in (0, pi/2)");
  }
  if (!(distance > 0.0) || !(side > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "mirror distance and side must be positive");
  }
  if (!(2.0 * distance > side * std::sin(beta))) {
    throw Error(ErrorCode::MirrorOccludesCamera,
                "mirror reaches the camera plane (2*b_m <= l_m*sin(beta))");
  }
}

}  // namespace

void AdapterConfig::validate() const {
  validate_side(beta_back, mirror_distance_back, mirror_side);
  validate_side(beta_front, mirror_distance_front, mirror_side);
  if (!(alpha_real > 0.0 && alpha_real < M_PI)) {
    throw Error(ErrorCode::InvalidConfig, "real camera FOV must be in (0, pi)");
  }
  if (!(subject_height > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "subject height must be positive");
  }
}

AlphaPair alpha_left_right(double beta, double mirror_distance, double mirror_side) {
  validate_side(beta, mirror_distance, mirror_side);
  const double projected = mirror_side * std::cos(beta);
  const double axial = mirror_side * std::sin(beta);
  return {std::atan(projected / (2.0 * mirror_distance + axial)),
          std::atan(projected / (2.0 * mirror_distance - axial))};
}

double alpha_virtual(double beta, double mirror_distance, double mirror_side) {
  const AlphaPair a = alpha_left_right(beta, mirror_distance, mirror_side);
  return a.left + a.right;
}

double alpha_inner(double beta, double alpha_right) {
  const double inner = M_PI / 2.0 + alpha_right - 2.0 * beta;
  if (!(inner > 0.0)) {
    throw Error(ErrorCode::DivergingViews, "virtual views diverge (alpha_in <= 0)");
  }
  return inner;
}

double min_subject_distance(double baseline, double subject_height, double alpha_in) {
  if (!(alpha_in > 0.0)) {
    throw Error(ErrorCode::DivergingViews, "alpha_in must be positive");
  }
  return (baseline + subject_height) / (2.0 * std::tan(alpha_in));
}

double fov_percent_common(double subject_height, double distance, double alpha_real) {
  if (!(distance > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "distance must be positive");
  }
  return subject_height / (2.0 * distance * std::tan(alpha_real / 2.0));
}

double predicted_baseline(const AdapterConfig& cfg) {
  cfg.validate();
  // Back camera at the origin looking +z; front camera at the configured
  // offset looking -z (rotated pi about the x axis). Each virtual center
  // is the reflection of its real center in its mirror.
  const Mirror back = adapter_mirror(cfg.beta_back, cfg.mirror_distance_back, +1);
  const Mirror front = adapter_mirror(cfg.beta_front, cfg.mirror_distance_front, -1);

  const Vec3 center_back = back.reflect_point(Vec3::Zero());
  Mat3 rot_front;
  rot_front << 1, 0, 0, 0, -1, 0, 0, 0, -1;
  const Vec3 center_front =
      cfg.front_camera_offset + rot_front.transpose() * front.reflect_point(Vec3::Zero());
  return (center_back - center_front).norm();
}

FovReport analyze(const AdapterConfig& cfg, std::optional<double> baseline_override) {
  cfg.validate();
  const AlphaPair back = alpha_left_right(cfg.beta_back, cfg.mirror_distance_back, cfg.mirror_side);
  const AlphaPair front =
      alpha_left_right(cfg.beta_front, cfg.mirror_distance_front, cfg.mirror_side);

  FovReport r;
  // Per-side values; the report carries the conservative (smaller) ones.
  r.alpha_left = std::min(back.left, front.left);
  r.alpha_right = std::min(back.right, front.right);
  r.alpha_virtual = std::min(back.left + back.right, front.left + front.right);
  r.alpha_inner = std::min(alpha_inner(cfg.beta_back, back.right),
                           alpha_inner(cfg.beta_front, front.right));
  r.fov_percent_individual = r.alpha_virtual / cfg.alpha_real;
  r.baseline_predicted = predicted_baseline(cfg);
  const double baseline = baseline_override.value_or(r.baseline_predicted);
  r.min_distance = min_subject_distance(baseline, cfg.subject_height, r.alpha_inner);
  r.visible_height = 2.0 * r.min_distance * std::tan(cfg.alpha_real / 2.0);
  r.fov_percent_common = fov_percent_common(cfg.subject_height, r.min_distance, cfg.alpha_real);
  return r;
}

std::vector<SweepRow> sweep(const AdapterConfig& base, const std::vector<double>& betas,
                            const std::vector<double>& mirror_distances,
                            const std::vector<double>& mirror_sides,
                            std::optional<double> baseline_override) {
  const std::vector<double> beta_grid = betas.empty() ? std::vector<double>{base.beta_back} : betas;
  const std::vector<double> dist_grid =
      mirror_distances.empty() ? std::vector<double>{base.mirror_distance_back} : mirror_distances;
  const std::vector<double> side_grid =
      mirror_sides.empty() ? std::vector<double>{base.mirror_side} : mirror_sides;
  if (beta_grid.empty() || dist_grid.empty() || side_grid.empty()) {
    throw Error(ErrorCode::InsufficientData, "empty sweep grid");
  }

  std::vector<SweepRow> rows;
  rows.reserve(beta_grid.size() * dist_grid.size() * side_grid.size());
  for (double beta : beta_grid) {
    for (double dist : dist_grid) {
      for (double side : side_grid) {
        AdapterConfig cfg = base;
        cfg.beta_back = cfg.beta_front = beta;
        cfg.mirror_distance_back = cfg.mirror_distance_front = dist;
        cfg.mirror_side = side;
        SweepRow row{beta, dist, side, {}, "ok"};
        try {
          row.report = analyze(cfg, baseline_override);
        } catch (const Error& e) {
          row.status = error_code_name(e.code());
        }
        rows.push_back(row);
      }
    }
  }
  return rows;
}

}  // namespace catastereo
