#include "holecalib/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace holecalib {

AccumulatedCloud accumulate_frames(std::span<const FrameOutcome> stream, int n) {
  if (n < 1) throw DataError("frame budget N must be at least 1");
  if (stream.size() < static_cast<std::size_t>(n)) {
    throw DataError("frame stream has " + std::to_string(stream.size()) + " frames, need " +
                    std::to_string(n));
  }
  AccumulatedCloud acc;
  for (const auto& outcome : stream.first(static_cast<std::size_t>(n))) {
    ++acc.n_total;
    if (!outcome.success()) continue;
    ++acc.n_success;
    for (const auto& p : outcome.points->centers) {
      acc.points.push_back(p);
      acc.frame_ids.push_back(outcome.frame);
    }
  }
  if (acc.n_success == 0) throw DataError("no detections in " + std::to_string(n) + " frames");
  return acc;
}

ClusterParams ClusterParams::for_successes(int n_success, double delta_cluster) {
  return {delta_cluster, (n_success + 1) / 2, n_success};
}

namespace {

struct DisjointSets {
  std::vector<std::size_t> parent;

  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

  std::size_t find(std::size_t i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

std::vector<Cluster> euclidean_cluster(std::span<const Point3d> points,
                                       const ClusterParams& params) {
  if (params.min_size > params.max_size) throw DataError("cluster min size exceeds max size");
  const std::size_t n = points.size();
  const double tol2 = params.delta_cluster * params.delta_cluster;
  DisjointSets sets(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if ((points[i] - points[j]).squaredNorm() <= tol2) sets.unite(i, j);

  // Roots are the smallest index of each component, so iterating in index
  // order visits components in order of their first point.
  std::vector<Cluster> clusters;
  std::vector<long> slot(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t root = sets.find(i);
    if (slot[root] < 0) {
      slot[root] = static_cast<long>(clusters.size());
      clusters.push_back({Point3d::Zero(), 0});
    }
    Cluster& c = clusters[static_cast<std::size_t>(slot[root])];
    c.centroid += points[i];
    ++c.size;
  }
  std::vector<Cluster> out;
  for (auto& c : clusters) {
    if (c.size < params.min_size || c.size > params.max_size) continue;
    c.centroid /= c.size;
    out.push_back(c);
  }
  return out;
}

std::array<Point3d, 4> consolidate_centers(const std::vector<Cluster>& clusters, int pose) {
  if (clusters.size() != 4) {
    throw PoseRejected(RejectReason::Clusters, pose,
                       std::to_string(clusters.size()) + " clusters instead of 4");
  }
  return {clusters[0].centroid, clusters[1].centroid, clusters[2].centroid, clusters[3].centroid};
}

LabeledCenters associate_labels(const std::array<Point3d, 4>& centers,
                                const TargetGeometry& geometry, double match_tolerance,
                                int pose) {
  std::array<SphericalPointd, 4> sph;
  for (int i = 0; i < 4; ++i) sph[i] = to_spherical(centers[i]);

  int anchor = 0;
  for (int i = 1; i < 4; ++i) {
    if (sph[i].inclination < sph[anchor].inclination) anchor = i;
  }

  // Which of the other three sits at distance w, h and the diagonal.
  const std::array<double, 3> expected = {geometry.centers_width, geometry.centers_height,
                                          geometry.diagonal()};
  std::array<int, 3> role = {-1, -1, -1};
  for (int e = 0; e < 3; ++e) {
    for (int i = 0; i < 4; ++i) {
      if (i == anchor) continue;
      if (std::abs((centers[i] - centers[anchor]).norm() - expected[e]) > match_tolerance) continue;
      if (role[e] >= 0) throw DataError("ambiguous reference-point distances");
      role[e] = i;
    }
    if (role[e] < 0) throw DataError("reference points do not match the target rectangle");
  }
  if (role[0] == role[1] || role[1] == role[2] || role[0] == role[2]) {
    throw DataError("ambiguous reference-point distances");
  }

  const int row_partner = role[0];
  const int column_partner = role[1];
  const int opposite = role[2];
  const bool anchor_is_left =
      wrap_angle(sph[anchor].azimuth - sph[row_partner].azimuth) > 0.0;

  LabeledCenters out;
  out.pose = pose;
  auto set = [&](HoleLabel label, int idx) { out.centers[static_cast<int>(label)] = centers[idx]; };
  if (anchor_is_left) {
    set(HoleLabel::TopLeft, anchor);
    set(HoleLabel::TopRight, row_partner);
    set(HoleLabel::BottomLeft, column_partner);
    set(HoleLabel::BottomRight, opposite);
  } else {
    set(HoleLabel::TopRight, anchor);
    set(HoleLabel::TopLeft, row_partner);
    set(HoleLabel::BottomRight, column_partner);
    set(HoleLabel::BottomLeft, opposite);
  }
  return out;
}

std::vector<LabeledPoint> accumulate_poses(std::span<const LabeledCenters> poses, int m) {
  if (m < 1) throw DataError("pose count M must be at least 1");
  std::vector<const LabeledCenters*> by_tag(static_cast<std::size_t>(m), nullptr);
  for (const auto& lc : poses) {
    if (lc.pose < 0 || lc.pose >= m) {
      throw DataError("pose tag " + std::to_string(lc.pose) + " outside [0, M)");
    }
    auto& slot = by_tag[static_cast<std::size_t>(lc.pose)];
    if (slot) throw DataError("duplicate pose tag " + std::to_string(lc.pose));
    slot = &lc;
  }
  std::vector<LabeledPoint> out;
  out.reserve(4 * static_cast<std::size_t>(m));
  for (int tag = 0; tag < m; ++tag) {
    const auto* lc = by_tag[static_cast<std::size_t>(tag)];
    if (!lc) throw DataError("missing pose tag " + std::to_string(tag));
    for (HoleLabel label : kHoleLabels) out.push_back({lc->at(label), label, tag});
  }
  return out;
}

}  // namespace holecalib
