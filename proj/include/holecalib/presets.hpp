#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "holecalib/simulator.hpp"

namespace holecalib {

/// Sensor models of the reference synthetic suite: "vlp16", "hdl32",
/// "hdl64" (spinning LiDARs at 0.2 deg), "blackfly" (monocular) and
/// "bumblebee" (stereo range). The mount is left at identity.
std::optional<SensorModel> sensor_preset(std::string_view preset, const std::string& name);

std::vector<std::string> sensor_preset_names();

/// Target poses in the LiDAR frame as (x, y, z, roll, pitch, yaw):
///   "single"  the four single-pose test placements P1..P4,
///   "multi5"  five placements for multi-pose calibration,
///   "p1".."p4" a single placement of "single".
std::optional<std::vector<PoseParamsd>> target_pose_preset(std::string_view preset);

/// Relative sensor placements (x, y, z, roll, pitch, yaw): "p1", "p2", "p3".
std::optional<PoseParamsd> mount_preset(std::string_view preset);

/// LiDAR at the origin and one camera-type sensor at `mount`, observing the
/// target at each pose of `poses`.
Scene make_pair_scene(const std::string& lidar_preset, const std::string& camera_preset,
                      const PoseParamsd& mount, const std::vector<PoseParamsd>& poses,
                      double k, std::uint64_t seed);

}  // namespace holecalib
