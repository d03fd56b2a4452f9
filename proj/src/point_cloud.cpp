#include "holecalib/point_cloud.hpp"

namespace holecalib {

namespace {

template <typename T>
void gather(const std::vector<T>& src, std::span<const std::size_t> indices, std::vector<T>& dst) {
  if (src.empty()) return;
  dst.reserve(indices.size());
  for (std::size_t i : indices) dst.push_back(src[i]);
}

template <typename T>
void check_length(const std::vector<T>& attr, std::size_t n, const char* name) {
  if (!attr.empty() && attr.size() != n) {
    throw DataError(std::string("point cloud attribute '") + name + "' has wrong length");
  }
}

}  // namespace

PointCloud PointCloud::select(std::span<const std::size_t> indices) const {
  PointCloud out;
  out.azimuth_count = azimuth_count;
  out.circular_rings = circular_rings;
  gather(points, indices, out.points);
  gather(ring, indices, out.ring);
  gather(range, indices, out.range);
  gather(pixel, indices, out.pixel);
  gather(azimuth_index, indices, out.azimuth_index);
  gather(discontinuity, indices, out.discontinuity);
  return out;
}

void PointCloud::validate() const {
  check_length(ring, points.size(), "ring");
  check_length(range, points.size(), "range");
  check_length(pixel, points.size(), "pixel");
  check_length(azimuth_index, points.size(), "azimuth_index");
  check_length(discontinuity, points.size(), "discontinuity");
}

}  // namespace holecalib
