#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "catastereo/calibration.hpp"
#include "catastereo/fov_design.hpp"
#include "catastereo/reconstruction.hpp"
#include "catastereo/simulator.hpp"

namespace catastereo::io {

// Versioned file schema tags.
inline constexpr const char* kAdapterConfigSchema = "catastereo/adapter_config/v1";
inline constexpr const char* kCornerObservationsSchema = "catastereo/corner_observations/v1";
inline constexpr const char* kCalibrationResultSchema = "catastereo/calibration_result/v1";
inline constexpr const char* kKeypointsSchema = "catastereo/keypoints2d/v1";
inline constexpr const char* kReferenceLengthsSchema = "catastereo/reference_lengths/v1";
inline constexpr const char* kGroundTruthSchema = "catastereo/ground_truth/v1";
inline constexpr const char* kRunManifestSchema = "catastereo/run_manifest/v1";

/// Writes via a temp file plus rename so outputs are never partial.
void atomic_write_file(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

/// FNV-1a 64-bit hash, hex-encoded.
std::string fnv1a_hex(const std::string& bytes);

AdapterConfig read_adapter_config(const std::filesystem::path& path);
std::string adapter_config_to_json(const AdapterConfig& cfg);

CornerObservations read_corner_observations(const std::filesystem::path& path);
std::string corner_observations_to_json(const CornerObservations& obs);

CalibrationResult read_calibration_result(const std::filesystem::path& path);
/// `no_distortion_alternate` optionally embeds the distortion-free fit
/// alongside the primary one.
std::string calibration_result_to_json(
    const CalibrationResult& result,
    const std::optional<CalibrationResult>& no_distortion_alternate = {});

struct KeypointsPair {
  Keypoints2D cam_a;
  Keypoints2D cam_b;
};
KeypointsPair read_keypoints_pair(const std::filesystem::path& path);
std::string keypoints_pair_to_json(const KeypointsPair& pair);

ReferenceLengths read_reference_lengths(const std::filesystem::path& path);

/// Simulator ground-truth sidecar for test harnesses.
struct GroundTruth {
  AdapterConfig config;
  StereoRig rig;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  std::vector<RigidTransform> board_poses;            // board -> world
  std::optional<std::array<Vec3, kJointCount>> skeleton_world;
};
GroundTruth read_ground_truth(const std::filesystem::path& path);
std::string ground_truth_to_json(const GroundTruth& gt);

/// Sweep CSV in the fixed column order (beta_deg, b_m_cm, l_m_cm,
/// alpha_L_deg, alpha_R_deg, alpha_virtual_deg, alpha_in_deg, d_min_m,
/// fov_pct_individual, fov_pct_common, baseline_cm, status).
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

std::string plane_report_to_csv(const PlaneDistanceReport& report);
std::string segment_report_to_csv(const SegmentReport& report);
std::string segment_report_to_json(const SegmentReport& report);

struct RunManifest {
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> inputs;   // (role, path as given)
  std::vector<std::string> outputs;                          // file names in the output dir
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string tool_version;
};
std::string run_manifest_to_json(const RunManifest& manifest);

}  // namespace catastereo::io
