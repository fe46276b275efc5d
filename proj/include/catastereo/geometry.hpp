#pragma once

#include <Eigen/Dense>

#include "catastereo/error.hpp"

namespace catastereo {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;

/// Proper rigid transform p -> R*p + t. Rotations are kept orthonormal
/// (R^T R = I to 1e-9, det R = +1).
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  Vec3 operator()(const Vec3& p) const { return apply(p); }

  RigidTransform compose(const RigidTransform& other) const {
    return {rotation * other.rotation, rotation * other.translation + translation};
  }
  RigidTransform operator*(const RigidTransform& other) const { return compose(other); }

  RigidTransform inverse() const {
    return {rotation.transpose(), -(rotation.transpose() * translation)};
  }
};

bool is_rotation(const Mat3& r, double tol = 1e-9);

/// Rodrigues exponential of an axis-angle vector.
Mat3 so3_exp(const Vec3& omega);
/// Axis-angle log of a rotation matrix.
Vec3 so3_log(const Mat3& rotation);
/// Nearest proper rotation in Frobenius norm (polar projection via SVD).
Mat3 nearest_rotation(const Mat3& m);

/// Oriented plane {x : normal . x = offset} expressed in the host camera
/// frame. Normalized so the camera center (origin) lies on the positive
/// side: normal . 0 - offset >= 0, i.e. offset <= 0, with the normal
/// pointing from the plane toward the camera.
struct Mirror {
  Vec3 normal = Vec3(0, 0, -1);
  double offset = 0.0;

  Mirror() = default;
  Mirror(const Vec3& n, double d);

  /// Signed distance from a point to the plane.
  double signed_distance(const Vec3& p) const { return normal.dot(p) - offset; }
  /// Householder reflection of a point across the plane.
  Vec3 reflect_point(const Vec3& p) const { return p - 2.0 * signed_distance(p) * normal; }
  /// Reflection of a direction (linear part only, D = I - 2 n n^T).
  Vec3 reflect_direction(const Vec3& d) const { return d - 2.0 * normal.dot(d) * normal; }
  Mat3 linear() const { return Mat3::Identity() - 2.0 * normal * normal.transpose(); }
};

/// Mirror of the phone adapter: plane crossing the host camera's optical
/// axis at `distance` (meters), tilted by `beta` from the image plane.
/// The in-plane tilt direction is (0, cos b, tilt_sign * sin b), so the
/// plane is {x : (0, tilt_sign*sin b, -cos b) . x = -distance*cos b}.
/// tilt_sign selects which way the mirror leans; the front and back
/// mirrors of one adapter lean opposite ways in their own camera frames.
Mirror adapter_mirror(double beta, double distance, int tilt_sign = +1);

/// 4x4 affine map p -> p - 2 (n.p - d) n of the mirror plane.
/// Linear part has determinant -1.
Mat4 reflection_matrix(const Mirror& m);

/// Pinhole intrinsics with optional skew and 2-parameter radial distortion.
struct Intrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  double skew = 0.0;
  double k1 = 0.0;
  double k2 = 0.0;

  Mat3 matrix() const {
    Mat3 k;
    k << fx, skew, cx, 0, fy, cy, 0, 0, 1;
    return k;
  }

  /// Radial distortion on normalized coordinates.
  Vec2 distort(const Vec2& xn) const {
    const double r2 = xn.squaredNorm();
    return xn * (1.0 + r2 * (k1 + k2 * r2));
  }
  /// Inverse of distort() by fixed-point iteration (tolerance 1e-10,
  /// at most 10 iterations).
  Vec2 undistort(const Vec2& xd) const;

  Vec2 to_pixel(const Vec2& xd) const {
    return {fx * xd.x() + skew * xd.y() + cx, fy * xd.y() + cy};
  }
  Vec2 from_pixel(const Vec2& px) const {
    const double yd = (px.y() - cy) / fy;
    return {(px.x() - cx - skew * yd) / fx, yd};
  }
};

/// Pinhole camera: intrinsics, world-to-camera pose and image size.
/// `mirrored` marks a single-reflection virtual camera: its pose is stored
/// as a proper rotation and project() flips u across the image width to
/// account for the reflected (left-handed) image. The flip is an exact
/// model of the reflection when the principal point is horizontally
/// centered (cx = (width-1)/2).
struct Camera {
  Intrinsics intrinsics;
  RigidTransform pose;  // world -> camera
  int width = 0;
  int height = 0;
  bool mirrored = false;

  void validate() const;

  /// Projects a world point to pixels. Throws BehindCamera for z <= 0.
  Vec2 project(const Vec3& world_point) const;
  /// Projects a camera-frame point (pose already applied).
  Vec2 project_camera_point(const Vec3& p) const;

  /// Undistorted normalized coordinates of a pixel, in the frame in which
  /// the camera maps points as a plain pinhole (for mirrored cameras this
  /// is the raw reflected frame, so triangulation with the rig's relative
  /// transform is consistent).
  Vec2 pixel_to_normalized(const Vec2& px) const;

  /// Inverse companion of pixel_to_normalized(): projects a point given in
  /// the camera's working frame.
  Vec2 project_working_point(const Vec3& p) const;

  /// Intrinsics of the plain pinhole acting on the working frame. For a
  /// mirrored camera the principal point and skew mirror across the image
  /// width.
  Intrinsics working_intrinsics() const;

  bool in_image(const Vec2& px) const {
    return px.x() >= 0.0 && px.x() <= width - 1 && px.y() >= 0.0 && px.y() <= height - 1;
  }

  Vec3 center_world() const { return -(pose.rotation.transpose() * pose.translation); }
};

/// Virtual camera seen in a planar mirror expressed in the real camera's
/// frame. Intrinsics are copied; the pose composes the real pose with the
/// mirror reflection, re-expressed as a proper rotation plus the mirrored
/// flag. Throws DegenerateRig if the plane passes through the camera
/// center (|offset| < 1e-9).
Camera virtual_camera(const Camera& real, const Mirror& m);

/// Two (virtual) cameras and the rigid transform from cam_a's working
/// frame to cam_b's. cam_a is the back camera, cam_b the front.
struct StereoRig {
  Camera cam_a;
  Camera cam_b;
  RigidTransform relative;  // cam_a frame -> cam_b frame

  double baseline() const { return relative.translation.norm(); }
};

}  // namespace catastereo
