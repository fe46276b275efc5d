#include "catastereo/geometry.hpp"

#include <cmath>

namespace catastereo {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidMirror: return "invalid-mirror";
    case ErrorCode::DegenerateRig: return "degenerate-rig";
    case ErrorCode::BehindCamera: return "behind-camera";
    case ErrorCode::OutOfMirror: return "out-of-mirror";
    case ErrorCode::MirrorOccludesCamera: return "mirror-occludes-camera";
    case ErrorCode::DivergingViews: return "diverging-views";
    case ErrorCode::InvalidConfig: return "invalid-config";
    case ErrorCode::InsufficientData: return "insufficient-data";
    case ErrorCode::DegenerateGeometry: return "degenerate-geometry";
    case ErrorCode::IllConditioned: return "ill-conditioned";
    case ErrorCode::NearParallelRays: return "near-parallel-rays";
    case ErrorCode::Cheirality: return "cheirality";
    case ErrorCode::EmptySkeleton: return "empty-skeleton";
    case ErrorCode::ParseError: return "parse-error";
    case ErrorCode::IoError: return "io-error";
  }
  return "unknown";
}

bool is_rotation(const Mat3& r, double tol) {
  return (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() <= tol &&
         std::abs(r.determinant() - 1.0) <= tol;
}

Mat3 so3_exp(const Vec3& omega) {
  const double angle = omega.norm();
  if (angle < 1e-12) {
    // First-order expansion near identity keeps the map smooth.
    Mat3 skew;
    skew << 0, -omega.z(), omega.y(), omega.z(), 0, -omega.x(), -omega.y(), omega.x(), 0;
    return Mat3::Identity() + skew;
  }
  return Eigen::AngleAxisd(angle, omega / angle).toRotationMatrix();
}

Vec3 so3_log(const Mat3& rotation) {
  Eigen::AngleAxisd aa(rotation);
  return aa.angle() * aa.axis();
}

Mat3 nearest_rotation(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0) {
    Mat3 flip = Mat3::Identity();
    flip(2, 2) = -1.0;
    r = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  return r;
}

Mirror::Mirror(const Vec3& n, double d) {
  const double norm = n.norm();
  if (norm < 1e-12) {
    throw Error(ErrorCode::InvalidMirror, "mirror normal has zero length");
  }
  normal = n / norm;
  offset = d / norm;
  if (offset > 0.0) {
    // Canonical form keeps the host camera center on the positive side.
    normal = -normal;
    offset = -offset;
  }
}

Mirror adapter_mirror(double beta, double distance, int tilt_sign) {
  if (!(beta > 0.0 && beta < M_PI / 2.0)) {
    throw Error(ErrorCode::InvalidConfig, "mirror angle must be in (0, pi/2)");
  }
  if (!(distance > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "mirror distance must be positive");
  }
  const double sign = tilt_sign >= 0 ? 1.0 : -1.0;
  const Vec3 normal(0.0, sign * std::sin(beta), -std::cos(beta));
  return Mirror(normal, -distance * std::cos(beta));
}

Mat4 reflection_matrix(const Mirror& m) {
  if (std::abs(m.normal.norm() - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidMirror, "mirror normal is not unit length");
  }
  Mat4 t = Mat4::Identity();
  t.topLeftCorner<3, 3>() = m.linear();
  t.topRightCorner<3, 1>() = 2.0 * m.offset * m.normal;
  return t;
}

Vec2 Intrinsics::undistort(const Vec2& xd) const {
  Vec2 xn = xd;
  for (int i = 0; i < 10; ++i) {
    const double r2 = xn.squaredNorm();
    const Vec2 next = xd / (1.0 + r2 * (k1 + k2 * r2));
    if ((next - xn).cwiseAbs().maxCoeff() < 1e-10) {
      return next;
    }
    xn = next;
  }
  return xn;
}

void Camera::validate() const {
  if (!(intrinsics.fx > 0.0 && intrinsics.fy > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "focal lengths must be positive");
  }
  if (!(intrinsics.cx >= 0.0 && intrinsics.cx < width && intrinsics.cy >= 0.0 &&
        intrinsics.cy < height)) {
    throw Error(ErrorCode::InvalidConfig, "principal point outside the image");
  }
  if (!is_rotation(pose.rotation)) {
    throw Error(ErrorCode::InvalidConfig, "camera pose rotation is not orthonormal");
  }
}

Vec2 Camera::project(const Vec3& world_point) const {
  return project_camera_point(pose.apply(world_point));
}

Vec2 Camera::project_camera_point(const Vec3& p) const {
  if (p.z() <= 0.0) {
    throw Error(ErrorCode::BehindCamera, "point has non-positive depth");
  }
  const Vec2 xn(p.x() / p.z(), p.y() / p.z());
  Vec2 px = intrinsics.to_pixel(intrinsics.distort(xn));
  if (mirrored) {
    px.x() = static_cast<double>(width - 1) - px.x();
  }
  return px;
}

Intrinsics Camera::working_intrinsics() const {
  if (!mirrored) {
    return intrinsics;
  }
  // In the raw reflected frame the camera acts as a plain pinhole with
  // the principal point and skew mirrored across the image width.
  Intrinsics raw = intrinsics;
  raw.cx = static_cast<double>(width - 1) - intrinsics.cx;
  raw.skew = -intrinsics.skew;
  return raw;
}

Vec2 Camera::pixel_to_normalized(const Vec2& px) const {
  const Intrinsics k = working_intrinsics();
  return k.undistort(k.from_pixel(px));
}

Vec2 Camera::project_working_point(const Vec3& p) const {
  if (p.z() <= 0.0) {
    throw Error(ErrorCode::BehindCamera, "point has non-positive depth");
  }
  const Intrinsics k = working_intrinsics();
  const Vec2 xn(p.x() / p.z(), p.y() / p.z());
  return k.to_pixel(k.distort(xn));
}

Camera virtual_camera(const Camera& real, const Mirror& m) {
  if (real.mirrored) {
    throw Error(ErrorCode::InvalidConfig, "real camera must not already be mirrored");
  }
  if (std::abs(m.offset) < 1e-9) {
    throw Error(ErrorCode::DegenerateRig, "mirror plane passes through the camera center");
  }
  // World -> reflected-camera map is (D R, D t + 2 d n) with det D = -1;
  // conjugating by diag(-1,1,1) yields the stored proper pose, the
  // leftover x-flip being realized as the horizontal pixel flip.
  const Mat3 d = m.linear();
  Mat3 flip = Mat3::Identity();
  flip(0, 0) = -1.0;
  Camera virt = real;
  virt.pose.rotation = flip * d * real.pose.rotation;
  virt.pose.translation = flip * (d * real.pose.translation + 2.0 * m.offset * m.normal);
  virt.mirrored = true;
  return virt;
}

}  // namespace catastereo
