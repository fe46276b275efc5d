#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "catastereo/calibration.hpp"
#include "catastereo/fov_design.hpp"
#include "catastereo/reconstruction.hpp"

namespace catastereo {

/// Finite square mirror: the plane plus the physical l_m x l_m extent,
/// expressed in the host camera's frame.
struct MirrorPatch {
  Mirror plane;
  Vec3 center;
  Vec3 u_axis;   // in-plane, unit (image-width direction)
  Vec3 v_axis;   // in-plane, unit (tilt direction)
  double half_u;
  double half_v;
};

MirrorPatch adapter_mirror_patch(double beta, double distance, double side, int tilt_sign);

/// Ground-truth rig: real cameras, finite mirrors and the virtual stereo
/// pair. The rig's relative transform is the composition of the two
/// reflected (raw-frame) camera maps, which is what calibration on
/// upright images recovers.
struct RigBuild {
  StereoRig rig;
  Camera real_back;
  Camera real_front;
  MirrorPatch mirror_back;   // in real_back frame
  MirrorPatch mirror_front;  // in real_front frame
};

RigBuild build_rig(const AdapterConfig& cfg);

struct MirrorProjection {
  Vec2 pixel = Vec2::Zero();  // raw real-camera image pixel
  bool behind = false;
  bool on_mirror = false;
  bool in_image = false;

  bool visible() const { return !behind && on_mirror && in_image; }
};

/// Ray-trace of a world point via the finite mirror into the real camera;
/// the ground-truth oracle for the virtual-camera model.
MirrorProjection try_project_via_mirror(const Camera& real, const MirrorPatch& patch,
                                        const Vec3& world_point);

/// Throwing variant: BehindCamera / OutOfMirror.
Vec2 project_via_mirror(const Camera& real, const MirrorPatch& patch, const Vec3& world_point);

/// True when the point is seen by both cameras via their mirrors.
bool visible_in_both(const RigBuild& rig, const Vec3& world_point);

struct SyntheticSession {
  AdapterConfig config;
  RigBuild rig;
  CornerObservations observations;
  std::vector<RigidTransform> board_poses;  // board -> world
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
};

/// Renders `n_views` chessboard views fully visible in both virtual
/// cameras, with Gaussian pixel noise. Poses are rejection-sampled
/// (pairwise board-normal separation >= 10 degrees, at most 10^4
/// attempts). Identical (config, seed) gives identical sessions.
SyntheticSession generate_chessboard_session(const AdapterConfig& cfg, int n_views,
                                             const BoardSpec& board, double noise_sigma,
                                             std::uint64_t seed);

struct SkeletonViews {
  Keypoints2D cam_a;
  Keypoints2D cam_b;
  std::array<Vec3, kJointCount> joints_world{};
  bool below_min_distance = false;  // advisory only
};

/// Projects a known 3D skeleton into both virtual cameras; joints outside
/// the common FOV get confidence 0.
SkeletonViews generate_skeleton_views(const RigBuild& rig, const AdapterConfig& cfg,
                                      const std::array<Vec3, kJointCount>& joints_world,
                                      double noise_sigma, std::uint64_t seed);

/// Fixed 25-joint standing template; local coordinates are (lateral,
/// forward, up-from-feet), scaled to the given height.
std::array<Vec3, kJointCount> humanoid_template(double height);

/// Degenerate template: 25 joints evenly spaced on a vertical segment of
/// the given height (the subject of the FOV analysis).
std::array<Vec3, kJointCount> linear_subject_template(double height);

/// Places a template at the given distance in front of the rig, height
/// centered on the rig symmetry plane.
std::array<Vec3, kJointCount> place_subject(const std::array<Vec3, kJointCount>& local,
                                            double distance, double height);

/// Smallest distance at which an h-tall axis-aligned subject is fully
/// visible in both views (bisection on the visibility predicate).
double empirical_min_subject_distance(const RigBuild& rig, double height);

/// Ground-truth world point expressed in the frame triangulation reports
/// (the raw reflected cam_a frame).
Vec3 world_to_reconstruction_frame(const RigBuild& rig, const Vec3& world_point);

}  // namespace catastereo
