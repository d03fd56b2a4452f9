#include "holecalib/cloud_filter.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace holecalib {

PointCloud passthrough_filter(const PointCloud& cloud, const PassThroughBounds& bounds) {
  if (!bounds.valid()) throw DataError("pass-through bounds have min > max");
  std::vector<std::size_t> keep;
  keep.reserve(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (bounds.contains(cloud.points[i])) keep.push_back(i);
  }
  return cloud.select(keep);
}

std::vector<double> depth_discontinuity(const PointCloud& cloud) {
  cloud.validate();
  if (!cloud.has_ring() || !cloud.has_range()) {
    throw DataError("depth discontinuity needs ring and range attributes");
  }

  std::map<int, std::vector<std::size_t>> rings;
  for (std::size_t i = 0; i < cloud.size(); ++i) rings[cloud.ring[i]].push_back(i);

  const bool by_azimuth = cloud.has_azimuth_index();
  std::vector<double> out(cloud.size(), 0.0);
  for (auto& [ring_id, idx] : rings) {
    if (by_azimuth) {
      std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return cloud.azimuth_index[a] < cloud.azimuth_index[b];
      });
    }
    const std::size_t n = idx.size();
    const bool wrap = cloud.circular_rings && n > 2;

    auto adjacent = [&](std::size_t a, std::size_t b) {
      if (!by_azimuth) return true;
      const int step = cloud.azimuth_index[b] - cloud.azimuth_index[a];
      if (step == 1) return true;
      return cloud.circular_rings && cloud.azimuth_count > 0 &&
             step == 1 - cloud.azimuth_count;
    };

    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i = idx[k];
      const double r = cloud.range[i];
      double grad = 0.0;
      if (k > 0 || wrap) {
        const std::size_t prev = idx[(k + n - 1) % n];
        if (adjacent(prev, i)) grad = std::max(grad, cloud.range[prev] - r);
      }
      if (k + 1 < n || wrap) {
        const std::size_t next = idx[(k + 1) % n];
        if (adjacent(i, next)) grad = std::max(grad, cloud.range[next] - r);
      }
      out[i] = grad;
    }
  }
  return out;
}

PointCloud assign_discontinuity(const PointCloud& cloud) {
  PointCloud out = cloud;
  out.discontinuity = depth_discontinuity(cloud);
  return out;
}

PointCloud lidar_edge_filter(const PointCloud& cloud, double delta_discont) {
  const std::vector<double> grad =
      cloud.has_discontinuity() ? cloud.discontinuity : depth_discontinuity(cloud);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (grad[i] >= delta_discont) keep.push_back(i);
  }
  PointCloud out = cloud.select(keep);
  if (!cloud.has_discontinuity()) {
    out.discontinuity.reserve(keep.size());
    for (std::size_t i : keep) out.discontinuity.push_back(grad[i]);
  }
  return out;
}

IntensityImage sobel_magnitude(const IntensityImage& image) {
  if (image.width < 3 || image.height < 3) throw DataError("sobel_magnitude: image smaller than 3x3");
  if (image.data.size() != static_cast<std::size_t>(image.width) * image.height) {
    throw DataError("sobel_magnitude: data length does not match dimensions");
  }
  IntensityImage out(image.width, image.height, 0);
  for (int v = 1; v + 1 < image.height; ++v) {
    for (int u = 1; u + 1 < image.width; ++u) {
      auto px = [&](int du, int dv) { return static_cast<int>(image.at(u + du, v + dv)); };
      const int gx = (px(1, -1) + 2 * px(1, 0) + px(1, 1)) - (px(-1, -1) + 2 * px(-1, 0) + px(-1, 1));
      const int gy = (px(-1, 1) + 2 * px(0, 1) + px(1, 1)) - (px(-1, -1) + 2 * px(0, -1) + px(1, -1));
      const double mag = std::round(std::sqrt(static_cast<double>(gx * gx + gy * gy)));
      out.at(u, v) = static_cast<std::uint8_t>(std::min(255.0, mag));
    }
  }
  return out;
}

PointCloud edge_mask_filter(const PointCloud& cloud, const IntensityImage& edges, int tau_sobel) {
  cloud.validate();
  if (!cloud.has_pixel()) throw DataError("edge_mask_filter needs pixel attributes");
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const int u = static_cast<int>(std::lround(cloud.pixel[i].x()));
    const int v = static_cast<int>(std::lround(cloud.pixel[i].y()));
    if (!edges.contains(u, v)) throw DataError("edge_mask_filter: pixel outside the edge image");
    if (edges.at(u, v) >= tau_sobel) keep.push_back(i);
  }
  return cloud.select(keep);
}

}  // namespace holecalib
