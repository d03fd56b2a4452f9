#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>

#include "holecalib/aggregation.hpp"
#include "holecalib/cloud_filter.hpp"
#include "holecalib/config.hpp"
#include "holecalib/mono_pose.hpp"
#include "holecalib/point_cloud.hpp"

namespace holecalib {

enum class Modality { Lidar, Mono, StereoRange };

constexpr std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::Lidar:
      return "lidar";
    case Modality::Mono:
      return "mono";
    case Modality::StereoRange:
      return "stereo-range";
  }
  return "?";
}

std::optional<Modality> parse_modality(std::string_view text);

using SensorFrame = std::variant<PointCloud, StereoFrame, MarkerDetections>;

/// Per-frame inputs besides the data itself.
struct ExtractionContext {
  /// Crop box; nullopt disables the pass-through filter.
  std::optional<PassThroughBounds> bounds;
  CameraIntrinsics intrinsics;
  /// RANSAC seed for this frame.
  std::uint64_t seed = 0;
};

/// LiDAR branch: range-discontinuity edges on the full rings, crop, vertical plane, plane
/// inliers among the edges, 2D circles, consistency, lift. Throws
/// FrameRejected on any failed stage.
ReferencePointSet extract_lidar(const PointCloud& cloud, const CalibConfig& config,
                                const ExtractionContext& ctx);

/// Stereo branch: same trunk with Sobel-masked points instead of range edges.
ReferencePointSet extract_stereo(const StereoFrame& frame, const CalibConfig& config,
                                 const ExtractionContext& ctx);

/// Monocular branch: homography initialization, LM refinement, hole centers
/// derived from the board pose and expressed in the camera body frame.
ReferencePointSet extract_mono(const MarkerDetections& detections, const CalibConfig& config,
                               const ExtractionContext& ctx);

/// Dispatches on the frame type and converts FrameRejected into an outcome.
/// Other errors propagate.
FrameOutcome extract_frame(const SensorFrame& frame, int frame_id, const CalibConfig& config,
                           const ExtractionContext& ctx);

}  // namespace holecalib
