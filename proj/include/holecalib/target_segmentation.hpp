#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <vector>

#include "holecalib/point_cloud.hpp"
#include "holecalib/target.hpp"

namespace holecalib {

struct PlaneRansacParams {
  double delta_plane = 0.10;
  double alpha_plane = 0.55;
  Vec3d up_axis = Vec3d::UnitZ();
  int max_iters = 1000;
  int min_inliers = 10;
  std::uint64_t seed = 0;
};

/// Roughly vertical plane with the largest support.
///
/// Candidate normals must satisfy |angle(normal, up) - pi/2| <= alpha_plane.
/// Ties in support go to the smaller mean absolute residual. The winner is
/// refined by a least-squares fit on its inliers and oriented so the sensor
/// origin lies on the positive side (d > 0).
///
/// Throws DataError for fewer than 3 points and FrameRejected(NoPlane) when no
/// admissible model reaches `min_inliers`.
PlaneModeld ransac_plane_vertical(const PointCloud& cloud, const PlaneRansacParams& params);

/// Keeps points within delta_inliers of the plane.
PointCloud plane_inlier_filter(const PointCloud& cloud, const PlaneModeld& plane,
                               double delta_inliers);

struct PlaneProjection {
  std::vector<Eigen::Vector2d> points;
  /// Maps plane coordinates (x, y, 0) back to the sensor frame.
  RigidTransformd plane_frame;
};

/// Orthogonal projection onto the plane, expressed in a frame with z along
/// the plane normal, x along up x normal and origin at the projected centroid.
PlaneProjection project_to_plane_2d(const PointCloud& cloud, const PlaneModeld& plane,
                                    const Vec3d& up_axis = Vec3d::UnitZ());

struct Circle2D {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double radius = 0.0;
  int inlier_count = 0;
};

struct CircleRansacParams {
  double delta_circle = 0.05;
  double delta_radius = 0.02;
  int min_circle_points = 3;
  int max_iters = 2000;
  std::uint64_t seed = 0;
};

/// Circle through three points; false when they are (nearly) collinear.
bool circle_from_three_points(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                              const Eigen::Vector2d& c, Circle2D& out);

/// Repeatedly extracts the best-supported circle of admissible radius and
/// removes its inliers, until too few points remain. Throws
/// FrameRejected(Circles) when fewer than four circles are found.
std::vector<Circle2D> ransac_circles_iterative(const std::vector<Eigen::Vector2d>& points,
                                               const TargetGeometry& geometry,
                                               const CircleRansacParams& params);

struct RectangleMatch {
  /// Indexed by HoleLabel, labels taken in the plane frame (x right, y up).
  std::array<Circle2D, 4> circles;
  /// Largest absolute deviation among width, height, diagonals and perimeter.
  double residual = 0.0;
};

/// Largest deviation of four centers from the w x h rectangle, independent of
/// input order and invariant under rigid motions of the points.
double rectangle_residual(const std::array<Eigen::Vector2d, 4>& centers,
                          const TargetGeometry& geometry);

/// Unique 4-subset consistent with the target rectangle. Throws
/// FrameRejected(Consistency) if none or several subsets pass.
RectangleMatch geometric_consistency_select(const std::vector<Circle2D>& circles,
                                            const TargetGeometry& geometry,
                                            double delta_consistency);

/// Maps the four labeled centers back to the sensor frame.
ReferencePointSet lift_to_3d(const std::array<Circle2D, 4>& circles,
                             const RigidTransformd& plane_frame);

}  // namespace holecalib
