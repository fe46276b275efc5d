#include "catastereo/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace catastereo {
namespace {

constexpr double kMinDepth = 1e-9;

Mat3 skew_matrix(const Vec3& v) {
  Mat3 s;
  s << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return s;
}

/// Zhang's absolute-conic constraint row v_ij for one homography.
Eigen::Matrix<double, 6, 1> conic_row(const Mat3& h, int i, int j) {
  Eigen::Matrix<double, 6, 1> v;
  v << h(0, i) * h(0, j), h(0, i) * h(1, j) + h(1, i) * h(0, j), h(1, i) * h(1, j),
      h(2, i) * h(0, j) + h(0, i) * h(2, j), h(2, i) * h(1, j) + h(1, i) * h(2, j),
      h(2, i) * h(2, j);
  return v;
}

bool project_plain(const Intrinsics& k, const Vec3& p, Vec2* px) {
  if (p.z() <= kMinDepth) {
    return false;
  }
  const Vec2 xn(p.x() / p.z(), p.y() / p.z());
  *px = k.to_pixel(k.distort(xn));
  return true;
}

}  // namespace

void CornerObservations::validate() const {
  if (board.rows < 2 || board.cols < 2 || !(board.square_size > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "invalid board specification");
  }
  std::set<int> view_ids;
  for (const ViewObservations& view : views) {
    if (!view_ids.insert(view.view_id).second) {
      throw Error(ErrorCode::ParseError, "duplicate view_id " + std::to_string(view.view_id));
    }
    for (const std::vector<CornerDetection>* cam : {&view.cam_a, &view.cam_b}) {
      std::set<int> seen;
      for (const CornerDetection& det : *cam) {
        if (det.corner_index < 0 || det.corner_index >= board.corner_count()) {
          throw Error(ErrorCode::ParseError, "corner index out of range in view " +
                                                 std::to_string(view.view_id));
        }
        if (!seen.insert(det.corner_index).second) {
          throw Error(ErrorCode::ParseError, "duplicate corner index in view " +
                                                 std::to_string(view.view_id));
        }
      }
    }
  }
}

StereoRig CalibrationResult::rig() const {
  StereoRig rig;
  rig.cam_a = Camera{cam_a, RigidTransform::identity(), image_width, image_height, false};
  rig.cam_b = Camera{cam_b, relative, image_width, image_height, false};
  rig.relative = relative;
  return rig;
}

NormalizedPoints normalize_points(const std::vector<Vec2>& points) {
  if (points.size() < 2) {
    throw Error(ErrorCode::InsufficientData, "need at least 2 points to normalize");
  }
  Vec2 centroid = Vec2::Zero();
  for (const Vec2& p : points) {
    centroid += p;
  }
  centroid /= static_cast<double>(points.size());

  double mean_dist = 0.0;
  for (const Vec2& p : points) {
    mean_dist += (p - centroid).norm();
  }
  mean_dist /= static_cast<double>(points.size());
  if (mean_dist < 1e-12) {
    throw Error(ErrorCode::DegenerateGeometry, "all points coincide");
  }

  const double scale = std::sqrt(2.0) / mean_dist;
  NormalizedPoints out;
  out.similarity << scale, 0, -scale * centroid.x(), 0, scale, -scale * centroid.y(), 0, 0, 1;
  out.points.reserve(points.size());
  for (const Vec2& p : points) {
    out.points.push_back(scale * (p - centroid));
  }
  return out;
}

Mat3 estimate_homography(const std::vector<Vec2>& board_points,
                         const std::vector<Vec2>& image_points) {
  if (board_points.size() != image_points.size()) {
    throw Error(ErrorCode::InvalidConfig, "correspondence count mismatch");
  }
  const int n = static_cast<int>(board_points.size());
  if (n < 4) {
    throw Error(ErrorCode::InsufficientData, "homography needs at least 4 correspondences");
  }

  const NormalizedPoints src = normalize_points(board_points);
  const NormalizedPoints dst = normalize_points(image_points);

  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 9);
  for (int i = 0; i < n; ++i) {
    const double x = src.points[i].x(), y = src.points[i].y();
    const double u = dst.points[i].x(), v = dst.points[i].y();
    a.row(2 * i) << -x, -y, -1, 0, 0, 0, u * x, u * y, u;
    a.row(2 * i + 1) << 0, 0, 0, -x, -y, -1, v * x, v * y, v;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  if (sv(7) < 1e-10 * sv(0)) {
    throw Error(ErrorCode::DegenerateGeometry, "rank-deficient correspondences (collinear points)");
  }
  const Eigen::VectorXd h = svd.matrixV().col(8);
  Mat3 hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);

  Mat3 result = dst.similarity.inverse() * hn * src.similarity;
  if (std::abs(result(2, 2)) > 1e-12) {
    result /= result(2, 2);
  }
  return result;
}

Intrinsics intrinsics_from_homographies(const std::vector<Mat3>& homographies,
                                        bool estimate_skew) {
  const int n = static_cast<int>(homographies.size());
  if (n < 3) {
    throw Error(ErrorCode::InsufficientData,
                "intrinsics need at least 3 homographies, got " + std::to_string(n));
  }

  // Unknowns are the entries of B = K^-T K^-1; with skew fixed the B12
  // column drops out.
  const int unknowns = estimate_skew ? 6 : 5;
  Eigen::MatrixXd v(2 * n, unknowns);
  for (int k = 0; k < n; ++k) {
    const Eigen::Matrix<double, 6, 1> v01 = conic_row(homographies[k], 0, 1);
    const Eigen::Matrix<double, 6, 1> diff =
        conic_row(homographies[k], 0, 0) - conic_row(homographies[k], 1, 1);
    if (estimate_skew) {
      v.row(2 * k) = v01.transpose();
      v.row(2 * k + 1) = diff.transpose();
    } else {
      v.row(2 * k) << v01(0), v01(2), v01(3), v01(4), v01(5);
      v.row(2 * k + 1) << diff(0), diff(2), diff(3), diff(4), diff(5);
    }
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(v, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cond = sv(0) / std::max(sv(unknowns - 2), 1e-300);
  if (sv(unknowns - 2) < 1e-9 * sv(0)) {
    std::ostringstream msg;
    msg << "degenerate board pose set (condition number " << cond << ")";
    throw Error(ErrorCode::IllConditioned, msg.str());
  }
  Eigen::VectorXd b = svd.matrixV().col(unknowns - 1);
  if (b(0) < 0) {
    b = -b;
  }

  Intrinsics k;
  if (estimate_skew) {
    const double b11 = b(0), b12 = b(1), b22 = b(2), b13 = b(3), b23 = b(4), b33 = b(5);
    const double den = b11 * b22 - b12 * b12;
    if (!(b11 > 0.0) || !(den > 0.0)) {
      throw Error(ErrorCode::IllConditioned, "recovered conic is not positive definite");
    }
    const double v0 = (b12 * b13 - b11 * b23) / den;
    const double lambda = b33 - (b13 * b13 + v0 * (b12 * b13 - b11 * b23)) / b11;
    if (!(lambda > 0.0)) {
      throw Error(ErrorCode::IllConditioned, "recovered conic is not positive definite");
    }
    k.fx = std::sqrt(lambda / b11);
    k.fy = std::sqrt(lambda * b11 / den);
    k.skew = -b12 * k.fx * k.fx * k.fy / lambda;
    k.cy = v0;
    k.cx = k.skew * v0 / k.fy - b13 * k.fx * k.fx / lambda;
  } else {
    const double b11 = b(0), b22 = b(1), b13 = b(2), b23 = b(3), b33 = b(4);
    if (!(b11 > 0.0) || !(b22 > 0.0)) {
      throw Error(ErrorCode::IllConditioned, "recovered conic is not positive definite");
    }
    const double v0 = -b23 / b22;
    const double lambda = b33 - b13 * b13 / b11 + v0 * b23;
    if (!(lambda > 0.0)) {
      throw Error(ErrorCode::IllConditioned, "recovered conic is not positive definite");
    }
    k.fx = std::sqrt(lambda / b11);
    k.fy = std::sqrt(lambda / b22);
    k.cx = -b13 * k.fx * k.fx / lambda;
    k.cy = v0;
  }
  return k;
}

RigidTransform extrinsics_from_homography(const Mat3& homography, const Intrinsics& intrinsics) {
  const Mat3 k = intrinsics.matrix();
  if (std::abs(k.determinant()) < 1e-12) {
    throw Error(ErrorCode::IllConditioned, "singular intrinsic matrix");
  }
  const Mat3 k_inv = k.inverse();

  Vec3 r1 = k_inv * homography.col(0);
  Vec3 r2 = k_inv * homography.col(1);
  Vec3 t = k_inv * homography.col(2);
  double lambda = 2.0 / (r1.norm() + r2.norm());
  if (t.z() * lambda < 0.0) {
    lambda = -lambda;  // board must sit in front of the camera
  }
  r1 *= lambda;
  r2 *= lambda;
  t *= lambda;

  Mat3 r;
  r.col(0) = r1;
  r.col(1) = r2;
  r.col(2) = r1.cross(r2);
  return {nearest_rotation(r), t};
}

RigidTransform stereo_relative(const std::vector<RigidTransform>& poses_a,
                               const std::vector<RigidTransform>& poses_b) {
  if (poses_a.empty() || poses_a.size() != poses_b.size()) {
    throw Error(ErrorCode::InsufficientData, "no common views for the relative pose");
  }

  Eigen::Matrix4d accum = Eigen::Matrix4d::Zero();
  Vec3 translation = Vec3::Zero();
  for (size_t i = 0; i < poses_a.size(); ++i) {
    const RigidTransform rel = poses_b[i] * poses_a[i].inverse();
    const Eigen::Quaterniond q(rel.rotation);
    const Eigen::Vector4d qv(q.w(), q.x(), q.y(), q.z());
    accum += qv * qv.transpose();
    translation += rel.translation;
  }
  translation /= static_cast<double>(poses_a.size());

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(accum);
  const Eigen::Vector4d qm = eig.eigenvectors().col(3);  // largest eigenvalue
  const Eigen::Quaterniond mean(qm(0), qm(1), qm(2), qm(3));
  return {mean.normalized().toRotationMatrix(), translation};
}

namespace {

/// Mutable optimization state for refine().
struct RefineState {
  Intrinsics cam_a;
  Intrinsics cam_b;
  RigidTransform relative;
  std::vector<RigidTransform> poses;  // board -> cam_a, one per kept view
};

struct Layout {
  int n_intr;
  int a_offset() const { return 0; }
  int b_offset() const { return n_intr; }
  int rel_offset() const { return 2 * n_intr; }
  int view_offset(int i) const { return 2 * n_intr + 6 + 6 * i; }
  int total(int n_views) const { return 2 * n_intr + 6 + 6 * n_views; }
};

void apply_intrinsics_delta(Intrinsics* k, const Eigen::VectorXd& delta, int offset,
                            const CalibrationOptions& opts) {
  int i = offset;
  k->fx += delta(i++);
  k->fy += delta(i++);
  k->cx += delta(i++);
  k->cy += delta(i++);
  if (opts.estimate_skew) {
    k->skew += delta(i++);
  }
  if (opts.estimate_distortion) {
    k->k1 += delta(i++);
    k->k2 += delta(i++);
  }
}

RigidTransform apply_pose_delta(const RigidTransform& t, const Eigen::VectorXd& delta,
                                int offset) {
  const Vec3 omega = delta.segment<3>(offset);
  const Vec3 dt = delta.segment<3>(offset + 3);
  const Mat3 inc = so3_exp(omega);
  RigidTransform out{inc * t.rotation, inc * t.translation + dt};
  out.rotation = Eigen::Quaterniond(out.rotation).normalized().toRotationMatrix();
  return out;
}

RefineState apply_delta(const RefineState& s, const Eigen::VectorXd& delta, const Layout& layout,
                        const CalibrationOptions& opts) {
  RefineState out = s;
  apply_intrinsics_delta(&out.cam_a, delta, layout.a_offset(), opts);
  apply_intrinsics_delta(&out.cam_b, delta, layout.b_offset(), opts);
  out.relative = apply_pose_delta(s.relative, delta, layout.rel_offset());
  for (size_t i = 0; i < s.poses.size(); ++i) {
    out.poses[i] = apply_pose_delta(s.poses[i], delta, layout.view_offset(static_cast<int>(i)));
  }
  return out;
}

/// Pixel projection plus Jacobians wrt [fx fy cx cy (skew) (k1 k2)] and
/// the camera-frame point.
bool project_with_jacobians(const Intrinsics& k, const Vec3& p, const CalibrationOptions& opts,
                            int n_intr, Vec2* px, Eigen::Matrix<double, 2, Eigen::Dynamic>* j_intr,
                            Eigen::Matrix<double, 2, 3>* j_point) {
  if (p.z() <= kMinDepth) {
    return false;
  }
  const double inv_z = 1.0 / p.z();
  const Vec2 xn(p.x() * inv_z, p.y() * inv_z);
  const double r2 = xn.squaredNorm();
  const double f = 1.0 + r2 * (k.k1 + k.k2 * r2);
  const Vec2 xd = xn * f;
  *px = k.to_pixel(xd);

  if (j_intr == nullptr) {
    return true;
  }

  j_intr->setZero(2, n_intr);
  int col = 0;
  (*j_intr)(0, col) = xd.x();  // fx
  ++col;
  (*j_intr)(1, col) = xd.y();  // fy
  ++col;
  (*j_intr)(0, col) = 1.0;  // cx
  ++col;
  (*j_intr)(1, col) = 1.0;  // cy
  ++col;
  if (opts.estimate_skew) {
    (*j_intr)(0, col) = xd.y();
    ++col;
  }
  if (opts.estimate_distortion) {
    const double r4 = r2 * r2;
    (*j_intr)(0, col) = k.fx * xn.x() * r2 + k.skew * xn.y() * r2;
    (*j_intr)(1, col) = k.fy * xn.y() * r2;
    ++col;
    (*j_intr)(0, col) = k.fx * xn.x() * r4 + k.skew * xn.y() * r4;
    (*j_intr)(1, col) = k.fy * xn.y() * r4;
  }

  // d(xd)/d(xn) = f I + 2 f'(r2) xn xn^T, f'(r2) = k1 + 2 k2 r2
  const double fp = k.k1 + 2.0 * k.k2 * r2;
  Eigen::Matrix2d dxd_dxn = f * Eigen::Matrix2d::Identity() + 2.0 * fp * xn * xn.transpose();
  Eigen::Matrix2d dpx_dxd;
  dpx_dxd << k.fx, k.skew, 0.0, k.fy;
  Eigen::Matrix<double, 2, 3> dxn_dp;
  dxn_dp << inv_z, 0, -xn.x() * inv_z, 0, inv_z, -xn.y() * inv_z;
  *j_point = dpx_dxd * dxd_dxn * dxn_dp;
  return true;
}

struct ErrorStats {
  double cost = 0.0;        // sum of (robust-weighted) squared residuals
  double sum_norm = 0.0;    // sum of Euclidean pixel errors
  double sum_sq = 0.0;      // sum of squared residual coordinates
  long n_points = 0;
  bool valid = true;
};

/// Evaluates all residuals; accumulates the normal equations when
/// `hessian` is given.
ErrorStats evaluate(const RefineState& s, const CornerObservations& obs,
                    const std::vector<int>& view_index, const CalibrationOptions& opts,
                    const Layout& layout, Eigen::MatrixXd* hessian, Eigen::VectorXd* gradient,
                    std::vector<double>* per_view_mean = nullptr) {
  ErrorStats stats;
  if (per_view_mean != nullptr) {
    per_view_mean->assign(view_index.size(), 0.0);
  }

  Eigen::Matrix<double, 2, Eigen::Dynamic> j_intr(2, layout.n_intr);
  Eigen::Matrix<double, 2, 3> j_point;

  for (size_t vi = 0; vi < view_index.size(); ++vi) {
    const ViewObservations& view = obs.views[view_index[vi]];
    const RigidTransform& pose = s.poses[vi];
    long view_points = 0;
    double view_err = 0.0;

    for (int cam = 0; cam < 2; ++cam) {
      const bool is_b = cam == 1;
      const std::vector<CornerDetection>& dets = is_b ? view.cam_b : view.cam_a;
      const Intrinsics& k = is_b ? s.cam_b : s.cam_a;
      const int intr_offset = is_b ? layout.b_offset() : layout.a_offset();

      for (const CornerDetection& det : dets) {
        const Vec3 board_point = obs.board.corner(det.corner_index);
        const Vec3 p_a = pose.apply(board_point);
        const Vec3 p = is_b ? s.relative.apply(p_a) : p_a;

        Vec2 px;
        if (!project_with_jacobians(k, p, opts, layout.n_intr, &px,
                                    hessian != nullptr ? &j_intr : nullptr, &j_point)) {
          stats.valid = false;
          return stats;
        }
        const Vec2 r = px - det.pixel;
        const double err = r.norm();

        double weight = 1.0;
        if (opts.huber && err > opts.huber_delta) {
          weight = opts.huber_delta / err;
        }
        stats.cost += weight * r.squaredNorm();
        stats.sum_norm += err;
        stats.sum_sq += r.squaredNorm();
        stats.n_points += 1;
        view_err += err;
        view_points += 1;

        if (hessian != nullptr) {
          // Residual depends on one intrinsics block, the view pose and
          // (for cam_b) the relative transform.
          Eigen::Matrix<double, 2, 6> j_view;
          Eigen::Matrix<double, 2, 6> j_rel;
          if (is_b) {
            j_rel.leftCols<3>() = j_point;
            j_rel.rightCols<3>() = -j_point * skew_matrix(p);
            const Eigen::Matrix<double, 2, 3> j_pa = j_point * s.relative.rotation;
            j_view.leftCols<3>() = j_pa;
            j_view.rightCols<3>() = -j_pa * skew_matrix(p_a);
          } else {
            j_view.leftCols<3>() = j_point;
            j_view.rightCols<3>() = -j_point * skew_matrix(p_a);
          }
          // Left-perturbation convention: columns are [dt, omega].
          // Reorder to [omega, dt] to match apply_pose_delta.
          auto reorder = [](const Eigen::Matrix<double, 2, 6>& j) {
            Eigen::Matrix<double, 2, 6> out;
            out.leftCols<3>() = j.rightCols<3>();
            out.rightCols<3>() = j.leftCols<3>();
            return out;
          };
          const Eigen::Matrix<double, 2, 6> jv = reorder(j_view);
          const Eigen::Matrix<double, 2, 6> jr = reorder(j_rel);

          const double w = std::sqrt(weight);
          std::vector<std::pair<int, Eigen::Matrix<double, 2, Eigen::Dynamic>>> blocks;
          blocks.emplace_back(intr_offset, w * j_intr);
          blocks.emplace_back(layout.view_offset(static_cast<int>(vi)), w * jv);
          if (is_b) {
            blocks.emplace_back(layout.rel_offset(), w * jr);
          }
          const Vec2 rw = w * r;
          for (const auto& [o1, jb1] : blocks) {
            gradient->segment(o1, jb1.cols()) += jb1.transpose() * rw;
            for (const auto& [o2, jb2] : blocks) {
              hessian->block(o1, o2, jb1.cols(), jb2.cols()) += jb1.transpose() * jb2;
            }
          }
        }
      }
    }
    if (per_view_mean != nullptr) {
      (*per_view_mean)[vi] = view_points > 0 ? view_err / view_points : 0.0;
    }
  }
  return stats;
}

}  // namespace

CalibrationResult refine(const CalibrationResult& initial, const CornerObservations& observations,
                         const CalibrationOptions& options) {
  observations.validate();

  // Map the initial views onto observation indices.
  std::vector<int> view_index;
  RefineState state{initial.cam_a, initial.cam_b, initial.relative, {}};
  for (const ViewPoses& vp : initial.views) {
    auto it = std::find_if(observations.views.begin(), observations.views.end(),
                           [&](const ViewObservations& v) { return v.view_id == vp.view_id; });
    if (it == observations.views.end()) {
      throw Error(ErrorCode::InvalidConfig,
                  "initialization references unknown view " + std::to_string(vp.view_id));
    }
    view_index.push_back(static_cast<int>(it - observations.views.begin()));
    state.poses.push_back(vp.pose_a);
  }
  if (state.poses.empty()) {
    throw Error(ErrorCode::InsufficientData, "no views to refine");
  }

  const Layout layout{4 + (options.estimate_skew ? 1 : 0) + (options.estimate_distortion ? 2 : 0)};
  const int n_params = layout.total(static_cast<int>(state.poses.size()));

  Eigen::MatrixXd hessian(n_params, n_params);
  Eigen::VectorXd gradient(n_params);
  hessian.setZero();
  gradient.setZero();

  ErrorStats current = evaluate(state, observations, view_index, options, layout, &hessian,
                                &gradient);
  if (!current.valid) {
    throw Error(ErrorCode::DegenerateGeometry, "initialization places the board behind a camera");
  }
  const double initial_cost = current.cost;

  RefineState best = state;
  double best_cost = current.cost;
  bool converged = false;
  double lambda = 1e-4;
  int iterations = 0;

  for (; iterations < options.max_iterations; ++iterations) {
    if (current.cost < 1e-300) {
      converged = true;
      break;
    }
    // Damped normal equations with Marquardt diagonal scaling.
    Eigen::VectorXd diag = hessian.diagonal().cwiseMax(1e-12);
    Eigen::MatrixXd damped = hessian;
    damped.diagonal() += lambda * diag;
    const Eigen::VectorXd delta = damped.ldlt().solve(-gradient);

    const RefineState candidate = apply_delta(state, delta, layout, options);
    const ErrorStats trial =
        evaluate(candidate, observations, view_index, options, layout, nullptr, nullptr);

    if (trial.valid && trial.cost < current.cost) {
      const double decrease = (current.cost - trial.cost) / current.cost;
      state = candidate;
      hessian.setZero();
      gradient.setZero();
      current = evaluate(state, observations, view_index, options, layout, &hessian, &gradient);
      if (current.cost < best_cost) {
        best = state;
        best_cost = current.cost;
      }
      lambda = std::max(lambda / 3.0, 1e-12);
      if (decrease < options.relative_tolerance) {
        converged = true;
        break;
      }
    } else {
      lambda *= 10.0;
      if (lambda > 1e12) {
        // No descent direction left; converged if the gradient has died.
        converged = gradient.cwiseAbs().maxCoeff() <= 1e-8 * std::max(1.0, current.cost);
        break;
      }
    }
  }
  if (iterations >= options.max_iterations) {
    converged = true;
  }

  // Package the best state found.
  CalibrationResult result;
  result.cam_a = best.cam_a;
  result.cam_b = best.cam_b;
  result.relative = best.relative;
  result.converged = converged && best_cost <= initial_cost;
  result.iterations = iterations;
  result.image_width = initial.image_width != 0 ? initial.image_width : observations.image_width;
  result.image_height =
      initial.image_height != 0 ? initial.image_height : observations.image_height;

  std::vector<double> per_view_mean;
  RefineState final_state = best;
  const ErrorStats stats = evaluate(final_state, observations, view_index, options, layout,
                                    nullptr, nullptr, &per_view_mean);
  result.views.reserve(best.poses.size());
  for (size_t i = 0; i < best.poses.size(); ++i) {
    ViewPoses vp;
    vp.view_id = observations.views[view_index[i]].view_id;
    vp.pose_a = best.poses[i];
    vp.pose_b = best.relative * best.poses[i];
    vp.mean_error_px = per_view_mean[i];
    result.views.push_back(vp);
  }
  result.mean_error_px = stats.n_points > 0 ? stats.sum_norm / stats.n_points : 0.0;
  result.rms_px = stats.n_points > 0 ? std::sqrt(stats.sum_sq / (2.0 * stats.n_points)) : 0.0;
  return result;
}

CalibrationResult calibrate_stereo(const CornerObservations& observations,
                                   const CalibrationOptions& options) {
  observations.validate();

  struct ViewData {
    int view_id;
    std::vector<Vec2> board_a, image_a;
    std::vector<Vec2> board_b, image_b;
  };
  std::vector<ViewData> data;
  for (const ViewObservations& view : observations.views) {
    ViewData d;
    d.view_id = view.view_id;
    for (const CornerDetection& det : view.cam_a) {
      d.board_a.push_back(observations.board.corner(det.corner_index).head<2>());
      d.image_a.push_back(det.pixel);
    }
    for (const CornerDetection& det : view.cam_b) {
      d.board_b.push_back(observations.board.corner(det.corner_index).head<2>());
      d.image_b.push_back(det.pixel);
    }
    if (d.board_a.size() >= 4 || d.board_b.size() >= 4) {
      data.push_back(std::move(d));
    }
  }
  if (data.empty()) {
    throw Error(ErrorCode::InsufficientData, "no usable views (need >= 4 corners in a camera)");
  }

  std::vector<Mat3> hs_a, hs_b;
  for (const ViewData& d : data) {
    if (d.board_a.size() >= 4) {
      hs_a.push_back(estimate_homography(d.board_a, d.image_a));
    }
    if (d.board_b.size() >= 4) {
      hs_b.push_back(estimate_homography(d.board_b, d.image_b));
    }
  }
  const Intrinsics k_a = intrinsics_from_homographies(hs_a, options.estimate_skew);
  const Intrinsics k_b = intrinsics_from_homographies(hs_b, options.estimate_skew);

  // Per-view extrinsics where available; the relative pose averages the
  // views observed well by both cameras.
  std::vector<std::optional<RigidTransform>> pose_a(data.size()), pose_b(data.size());
  std::vector<RigidTransform> common_a, common_b;
  for (size_t i = 0; i < data.size(); ++i) {
    if (data[i].board_a.size() >= 4) {
      pose_a[i] = extrinsics_from_homography(estimate_homography(data[i].board_a, data[i].image_a),
                                             k_a);
    }
    if (data[i].board_b.size() >= 4) {
      pose_b[i] = extrinsics_from_homography(estimate_homography(data[i].board_b, data[i].image_b),
                                             k_b);
    }
    if (pose_a[i] && pose_b[i]) {
      common_a.push_back(*pose_a[i]);
      common_b.push_back(*pose_b[i]);
    }
  }
  const RigidTransform relative = stereo_relative(common_a, common_b);

  CalibrationResult init;
  init.cam_a = k_a;
  init.cam_b = k_b;
  init.relative = relative;
  init.image_width = observations.image_width;
  init.image_height = observations.image_height;
  for (size_t i = 0; i < data.size(); ++i) {
    ViewPoses vp;
    vp.view_id = data[i].view_id;
    vp.pose_a = pose_a[i] ? *pose_a[i] : relative.inverse() * (*pose_b[i]);
    vp.pose_b = relative * vp.pose_a;
    init.views.push_back(vp);
  }
  return refine(init, observations, options);
}

}  // namespace catastereo
