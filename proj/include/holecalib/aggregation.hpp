#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "holecalib/target.hpp"

namespace holecalib {

/// Result of running extraction on one frame: either four points or a reason.
struct FrameOutcome {
  int frame = 0;
  std::optional<ReferencePointSet> points;
  std::optional<RejectReason> rejection;

  bool success() const { return points.has_value(); }
};

struct AccumulatedCloud {
  std::vector<Point3d> points;
  std::vector<int> frame_ids;
  int n_total = 0;
  int n_success = 0;
};

/// Consumes exactly `n` outcomes; rejected frames count towards n but add
/// no points. Throws DataError if the stream is shorter than n or no frame
/// succeeded.
AccumulatedCloud accumulate_frames(std::span<const FrameOutcome> stream, int n);

struct ClusterParams {
  double delta_cluster = 0.05;
  int min_size = 1;
  int max_size = 1;

  /// Size limits [ceil(N'/2), N'] for N' successful frames.
  static ClusterParams for_successes(int n_success, double delta_cluster = 0.05);
};

struct Cluster {
  Point3d centroid;
  int size = 0;
};

/// Single-linkage components under distance <= delta_cluster; clusters whose
/// size falls outside [min_size, max_size] are dropped. Ordered by their
/// lowest point index.
std::vector<Cluster> euclidean_cluster(std::span<const Point3d> points,
                                       const ClusterParams& params);

/// The four centroids, or PoseRejected(Clusters) unless exactly four remain.
std::array<Point3d, 4> consolidate_centers(const std::vector<Cluster>& clusters, int pose = 0);

struct LabeledCenters {
  /// Indexed by HoleLabel.
  std::array<Point3d, 4> centers;
  int pose = 0;

  const Point3d& at(HoleLabel label) const { return centers[static_cast<int>(label)]; }
};

/// Labels four centers by the target layout: the point with the lowest
/// inclination is in the top row; its distances to the others identify the
/// row partner (w), column partner (h) and opposite corner (diagonal); the
/// top pair's azimuths decide left from right (larger azimuth is left).
///
/// Throws DataError when a distance matches zero or several expected values
/// within `match_tolerance`.
LabeledCenters associate_labels(const std::array<Point3d, 4>& centers,
                                const TargetGeometry& geometry, double match_tolerance,
                                int pose = 0);

struct LabeledPoint {
  Point3d point;
  HoleLabel label = HoleLabel::TopLeft;
  int pose = 0;
};

/// Concatenates per-pose centers into 4M labeled points ordered by pose tag.
/// Throws DataError on duplicate or missing pose tags.
std::vector<LabeledPoint> accumulate_poses(std::span<const LabeledCenters> poses, int m);

}  // namespace holecalib
