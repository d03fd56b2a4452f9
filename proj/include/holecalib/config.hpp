#pragma once

#include <cstdint>
#include <map>
#include <string>

#include <json.hpp>

#include "holecalib/cloud_filter.hpp"
#include "holecalib/mono_pose.hpp"
#include "holecalib/target.hpp"

namespace holecalib {

/// Every tunable of the method. Pass-through bounds are the only per-setup
/// tuning.
struct CalibConfig {
  // Edge extraction.
  double delta_discont_lidar = 0.10;
  int tau_sobel_stereo = 128;

  // Plane segmentation.
  double delta_plane = 0.10;
  double alpha_plane = 0.55;
  double delta_inliers = 0.10;
  int plane_max_iters = 1000;
  int plane_min_inliers = 10;
  Vec3d up_axis = Vec3d::UnitZ();

  // Circle segmentation.
  double delta_circle_lidar = 0.05;
  double delta_circle_stereo = 0.01;
  double delta_radius_lidar = 0.02;
  double delta_radius_stereo = 0.01;
  double delta_consistency = 0.06;
  int min_circle_points = 3;
  int circle_max_iters = 2000;

  // Clustering: sizes in [min_fraction N', max_fraction N'].
  double delta_cluster = 0.05;
  double cluster_min_fraction = 0.5;
  double cluster_max_fraction = 1.0;

  LmParams lm;
  TargetGeometry target;

  /// Per-sensor crop boxes, keyed by sensor name. Sensors without an entry
  /// use the dataset's per-pose hint, or no crop at all.
  std::map<std::string, PassThroughBounds> passthrough;

  int frames = 30;     // N
  int poses = 0;       // M; 0 means every pose in the data
  std::uint64_t seed = 0;
  int workers = 1;

  /// Throws DataError if a tolerance is non-positive or bounds are inverted.
  void validate() const;
};

void to_json(nlohmann::json& j, const CalibConfig& c);
void from_json(const nlohmann::json& j, CalibConfig& c);
void to_json(nlohmann::json& j, const TargetGeometry& g);
void from_json(const nlohmann::json& j, TargetGeometry& g);
void to_json(nlohmann::json& j, const PassThroughBounds& b);
void from_json(const nlohmann::json& j, PassThroughBounds& b);
void to_json(nlohmann::json& j, const CameraIntrinsics& k);
void from_json(const nlohmann::json& j, CameraIntrinsics& k);

/// Loads a config file; keys absent from the file keep their defaults.
CalibConfig load_config(const std::string& path);

}  // namespace holecalib
