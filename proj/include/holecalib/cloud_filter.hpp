#pragma once

#include <vector>

#include "holecalib/point_cloud.hpp"

namespace holecalib {

/// Axis-aligned crop box in the sensor frame.
struct PassThroughBounds {
  Vec3d min = Vec3d::Constant(-1e9);
  Vec3d max = Vec3d::Constant(1e9);

  bool contains(const Point3d& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
  bool valid() const { return (min.array() <= max.array()).all(); }
};

/// Keeps points with min <= coordinate <= max on all three axes.
PointCloud passthrough_filter(const PointCloud& cloud, const PassThroughBounds& bounds);

/// Per-point depth gradient against in-ring neighbors:
///   max(r_prev - r, r_next - r, 0)
/// A missing neighbor (ring end, azimuth gap) contributes 0. Neighbors are
/// taken by azimuth_index when present, else by storage order within a ring.
std::vector<double> depth_discontinuity(const PointCloud& cloud);

/// Returns a copy of `cloud` carrying the depth_discontinuity attribute.
/// Throws DataError if ring or range is missing.
PointCloud assign_discontinuity(const PointCloud& cloud);

/// Keeps points whose depth discontinuity is >= delta_discont. Uses the
/// attached discontinuity attribute if present, otherwise computes it.
PointCloud lidar_edge_filter(const PointCloud& cloud, double delta_discont);

/// L2 Sobel magnitude, saturated at 255, zero on the one-pixel border.
IntensityImage sobel_magnitude(const IntensityImage& image);

/// Keeps points whose pixel maps to an edge value >= tau_sobel.
PointCloud edge_mask_filter(const PointCloud& cloud, const IntensityImage& edges, int tau_sobel);

}  // namespace holecalib
