#include "holecalib/extraction.hpp"

#include "holecalib/target_segmentation.hpp"

namespace holecalib {

std::optional<Modality> parse_modality(std::string_view text) {
  if (text == "lidar") return Modality::Lidar;
  if (text == "mono" || text == "monocular") return Modality::Mono;
  if (text == "stereo-range" || text == "stereo") return Modality::StereoRange;
  return std::nullopt;
}

namespace {

// Shared range-data trunk, from the cropped cloud and its edge subset.
ReferencePointSet segment_target(const PointCloud& cropped, const PointCloud& edges,
                                 double delta_circle, double delta_radius,
                                 const CalibConfig& config, std::uint64_t seed) {
  PlaneRansacParams plane_params;
  plane_params.delta_plane = config.delta_plane;
  plane_params.alpha_plane = config.alpha_plane;
  plane_params.up_axis = config.up_axis;
  plane_params.max_iters = config.plane_max_iters;
  plane_params.min_inliers = config.plane_min_inliers;
  plane_params.seed = seed;
  const PlaneModeld plane = ransac_plane_vertical(cropped, plane_params);

  const PointCloud on_plane = plane_inlier_filter(edges, plane, config.delta_inliers);
  const PlaneProjection proj = project_to_plane_2d(on_plane, plane, config.up_axis);

  CircleRansacParams circle_params;
  circle_params.delta_circle = delta_circle;
  circle_params.delta_radius = delta_radius;
  circle_params.min_circle_points = config.min_circle_points;
  circle_params.max_iters = config.circle_max_iters;
  circle_params.seed = seed ^ 0x5bd1e995ULL;
  const auto circles = ransac_circles_iterative(proj.points, config.target, circle_params);
  const RectangleMatch match =
      geometric_consistency_select(circles, config.target, config.delta_consistency);
  return lift_to_3d(match.circles, proj.plane_frame);
}

PointCloud crop(const PointCloud& cloud, const ExtractionContext& ctx) {
  PointCloud cropped = ctx.bounds ? passthrough_filter(cloud, *ctx.bounds) : cloud;
  if (cropped.size() < 3) {
    throw FrameRejected(RejectReason::NoPlane,
                        std::to_string(cropped.size()) + " points inside the pass-through box");
  }
  return cropped;
}

}  // namespace

ReferencePointSet extract_lidar(const PointCloud& cloud, const CalibConfig& config,
                                const ExtractionContext& ctx) {
  const PointCloud with_edges =
      cloud.has_discontinuity() ? cloud : assign_discontinuity(cloud);
  const PointCloud cropped = crop(with_edges, ctx);
  const PointCloud edges = lidar_edge_filter(cropped, config.delta_discont_lidar);
  return segment_target(cropped, edges, config.delta_circle_lidar, config.delta_radius_lidar,
                        config, ctx.seed);
}

ReferencePointSet extract_stereo(const StereoFrame& frame, const CalibConfig& config,
                                 const ExtractionContext& ctx) {
  const PointCloud cropped = crop(frame.cloud, ctx);
  const IntensityImage sobel = sobel_magnitude(frame.image);
  const PointCloud edges = edge_mask_filter(cropped, sobel, config.tau_sobel_stereo);
  return segment_target(cropped, edges, config.delta_circle_stereo, config.delta_radius_stereo,
                        config, ctx.seed);
}

ReferencePointSet extract_mono(const MarkerDetections& detections, const CalibConfig& config,
                               const ExtractionContext& ctx) {
  if (detections.markers.empty()) throw FrameRejected(RejectReason::Markers, "no markers detected");
  BoardPose pose;
  try {
    const RigidTransformd init = initial_board_pose(detections, ctx.intrinsics, config.target);
    pose = refine_board_pose_lm(init, detections, ctx.intrinsics, config.target, config.lm);
  } catch (const DataError& e) {
    throw FrameRejected(RejectReason::Markers, e.what());
  }
  ReferencePointSet optical = derive_hole_centers(pose, config.target);
  const RigidTransformd body_from_optical = optical_in_body();
  for (auto& c : optical.centers) c = body_from_optical * c;
  return optical;
}

FrameOutcome extract_frame(const SensorFrame& frame, int frame_id, const CalibConfig& config,
                           const ExtractionContext& ctx) {
  FrameOutcome out;
  out.frame = frame_id;
  try {
    ReferencePointSet pts = std::visit(
        [&](const auto& data) -> ReferencePointSet {
          using T = std::decay_t<decltype(data)>;
          if constexpr (std::is_same_v<T, PointCloud>) {
            return extract_lidar(data, config, ctx);
          } else if constexpr (std::is_same_v<T, StereoFrame>) {
            return extract_stereo(data, config, ctx);
          } else {
            return extract_mono(data, config, ctx);
          }
        },
        frame);
    pts.frame = frame_id;
    out.points = pts;
  } catch (const FrameRejected& e) {
    out.rejection = e.reason();
  }
  return out;
}

}  // namespace holecalib
