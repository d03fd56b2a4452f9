#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <span>
#include <vector>

#include "holecalib/geometry.hpp"

namespace holecalib {

/// Points in the sensor frame with optional per-point attributes.
///
/// Attribute vectors are either empty (attribute absent) or exactly as long as
/// `points`. Within a ring, points are stored in increasing azimuth_index.
struct PointCloud {
  std::vector<Point3d> points;
  std::vector<int> ring;
  std::vector<double> range;
  std::vector<Eigen::Vector2d> pixel;
  std::vector<int> azimuth_index;
  /// Depth-discontinuity magnitude, attached by assign_discontinuity().
  std::vector<double> discontinuity;

  /// Number of azimuth steps per revolution; only meaningful with azimuth_index.
  int azimuth_count = 0;
  /// Rings cover the full revolution and neighbors wrap around.
  bool circular_rings = false;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  bool has_ring() const { return !ring.empty(); }
  bool has_range() const { return !range.empty(); }
  bool has_pixel() const { return !pixel.empty(); }
  bool has_azimuth_index() const { return !azimuth_index.empty(); }
  bool has_discontinuity() const { return !discontinuity.empty(); }

  /// Copy of the points at `indices` (in that order) with all attributes.
  PointCloud select(std::span<const std::size_t> indices) const;

  /// Throws DataError when an attribute vector length disagrees with `points`.
  void validate() const;
};

/// Row-major 8-bit grayscale image.
struct IntensityImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  IntensityImage() = default;
  IntensityImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {}

  std::uint8_t at(int u, int v) const { return data[static_cast<std::size_t>(v) * width + u]; }
  std::uint8_t& at(int u, int v) { return data[static_cast<std::size_t>(v) * width + u]; }
  bool contains(int u, int v) const { return u >= 0 && v >= 0 && u < width && v < height; }
};

/// Organized range cloud (points carry pixel attributes) with the image it
/// was computed from.
struct StereoFrame {
  PointCloud cloud;
  IntensityImage image;
};

}  // namespace holecalib
