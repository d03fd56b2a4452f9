#pragma once

#include <Eigen/Core>

#include <array>
#include <vector>

#include "holecalib/target.hpp"

namespace holecalib {

/// Distortion-free pinhole camera.
struct CameraIntrinsics {
  double fx = 1000.0;
  double fy = 1000.0;
  double cx = 640.0;
  double cy = 480.0;
  int width = 1280;
  int height = 960;

  void validate() const;
  bool in_image(const Eigen::Vector2d& uv) const {
    return uv.x() >= 0 && uv.y() >= 0 && uv.x() <= width - 1 && uv.y() <= height - 1;
  }
};

struct MarkerDetection {
  int id = 0;
  /// Board-frame counter-clockwise order starting at the top-left corner.
  std::array<Eigen::Vector2d, 4> corners;
};

struct MarkerDetections {
  int frame = 0;
  std::vector<MarkerDetection> markers;
};

struct BoardPose {
  /// Maps board-frame points into the camera optical frame (z forward, y down).
  RigidTransformd camera_from_board;
  /// Root mean square of the per-corner pixel distance.
  double rms = 0.0;
};

/// Optical frame (z forward, x right, y down) expressed in the camera body
/// frame (x forward, y left, z up).
RigidTransformd optical_in_body();

/// u = fx x / z + cx, v = fy y / z + cy. Throws DataError for z <= 0.
Eigen::Vector2d project_pinhole(const CameraIntrinsics& intrinsics, const Point3d& p_cam);

/// Board pose averaged over per-marker homography decompositions: mean
/// translation, chordal mean rotation. Throws DataError when no marker is
/// present or a marker's corners are degenerate.
RigidTransformd initial_board_pose(const MarkerDetections& detections,
                                   const CameraIntrinsics& intrinsics,
                                   const TargetGeometry& geometry);

struct LmParams {
  int max_iters = 100;
  double tol = 1e-10;
  double lambda0 = 1e-3;
  double lambda_max = 1e12;
};

/// Stacked pixel residuals (projection - detection), two per detected
/// corner, and optionally their 2n x 6 Jacobian with respect to the
/// increment (omega, dt) applied as R <- exp(omega) R, t <- t + dt.
void reprojection_residuals(const RigidTransformd& camera_from_board,
                            const MarkerDetections& detections,
                            const CameraIntrinsics& intrinsics, const TargetGeometry& geometry,
                            Eigen::VectorXd& residuals, Eigen::MatrixXd* jacobian = nullptr);

/// Applies the (omega, dt) increment used by the refinement.
RigidTransformd apply_pose_increment(const RigidTransformd& pose,
                                     const Eigen::Matrix<double, 6, 1>& delta);

/// Thrown when the refinement cannot make progress away from a stationary point.
class PoseEstimationError : public DataError {
 public:
  PoseEstimationError(const std::string& what, BoardPose best)
      : DataError(what), best_(best) {}
  const BoardPose& best() const { return best_; }

 private:
  BoardPose best_;
};

/// Levenberg-Marquardt minimization of the corner reprojection error.
BoardPose refine_board_pose_lm(const RigidTransformd& initial, const MarkerDetections& detections,
                               const CameraIntrinsics& intrinsics,
                               const TargetGeometry& geometry, const LmParams& params = {});

/// Hole centers mapped through the board pose (output in the pose's frame).
ReferencePointSet derive_hole_centers(const BoardPose& pose, const TargetGeometry& geometry);

}  // namespace holecalib
