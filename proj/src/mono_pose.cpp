#include "holecalib/mono_pose.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <limits>

namespace holecalib {

void CameraIntrinsics::validate() const {
  if (!(fx > 0 && fy > 0)) throw DataError("camera focal lengths must be positive");
  if (width <= 0 || height <= 0) throw DataError("camera image size must be positive");
  if (!(cx >= 0 && cy >= 0 && cx <= width && cy <= height)) {
    throw DataError("principal point outside the image");
  }
}

RigidTransformd optical_in_body() {
  Mat3d r;
  r << 0, 0, 1,
      -1, 0, 0,
       0, -1, 0;
  return {r, Vec3d::Zero()};
}

Eigen::Vector2d project_pinhole(const CameraIntrinsics& k, const Point3d& p) {
  if (!(p.z() > 0)) throw DataError("project_pinhole: point behind the camera");
  return {k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy};
}

namespace {

Mat3d project_to_rotation(const Mat3d& m) {
  Eigen::JacobiSVD<Mat3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3d s = Mat3d::Identity();
  s(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0 ? -1.0 : 1.0;
  return svd.matrixU() * s * svd.matrixV().transpose();
}

double triangle_area(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  const Eigen::Vector2d ab = b - a, ac = c - a;
  return 0.5 * std::abs(ab.x() * ac.y() - ab.y() * ac.x());
}

void check_not_degenerate(const std::array<Eigen::Vector2d, 4>& q) {
  double scale = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) scale = std::max(scale, (q[i] - q[j]).squaredNorm());
  constexpr int triples[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
  for (const auto& t : triples) {
    if (!(triangle_area(q[t[0]], q[t[1]], q[t[2]]) > 1e-6 * scale)) {
      throw DataError("degenerate marker corners (three are collinear)");
    }
  }
}

// Similarity normalizing a point set to zero mean and mean distance sqrt(2).
Eigen::Matrix3d normalizer(const std::array<Eigen::Vector2d, 4>& pts) {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  for (const auto& p : pts) mean += p;
  mean /= 4.0;
  double spread = 0.0;
  for (const auto& p : pts) spread += (p - mean).norm();
  spread /= 4.0;
  const double s = std::sqrt(2.0) / spread;
  Eigen::Matrix3d t;
  t << s, 0, -s * mean.x(), 0, s, -s * mean.y(), 0, 0, 1;
  return t;
}

// Homography mapping board-plane (X, Y) to normalized image coordinates.
Eigen::Matrix3d homography_dlt(const std::array<Eigen::Vector2d, 4>& board,
                               const std::array<Eigen::Vector2d, 4>& image) {
  const Eigen::Matrix3d tb = normalizer(board);
  const Eigen::Matrix3d ti = normalizer(image);
  Eigen::Matrix<double, 8, 9> a;
  for (int i = 0; i < 4; ++i) {
    const Eigen::Vector3d x = tb * board[i].homogeneous();
    const Eigen::Vector3d y = ti * image[i].homogeneous();
    a.row(2 * i) << 0, 0, 0, -x.transpose(), y.y() * x.transpose();
    a.row(2 * i + 1) << x.transpose(), 0, 0, 0, -y.x() * x.transpose();
  }
  Eigen::JacobiSVD<Eigen::Matrix<double, 8, 9>> svd(a, Eigen::ComputeFullV);
  const Eigen::Matrix<double, 9, 1> h = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  return ti.inverse() * hn * tb;
}

RigidTransformd decompose_planar_homography(const Eigen::Matrix3d& h) {
  double lambda = 2.0 / (h.col(0).norm() + h.col(1).norm());
  if (lambda * h(2, 2) < 0) lambda = -lambda;  // board in front: t.z > 0
  const Vec3d r1 = lambda * h.col(0);
  const Vec3d r2 = lambda * h.col(1);
  Mat3d r;
  r.col(0) = r1;
  r.col(1) = r2;
  r.col(2) = r1.cross(r2);
  return {project_to_rotation(r), lambda * h.col(2)};
}

struct Correspondence {
  Point3d board;
  Eigen::Vector2d pixel;
};

std::vector<Correspondence> correspondences(const MarkerDetections& det,
                                            const TargetGeometry& geometry) {
  std::vector<Correspondence> out;
  for (const auto& m : det.markers) {
    const auto corners = geometry.marker_corners(m.id);
    for (int k = 0; k < 4; ++k) out.push_back({corners[k], m.corners[k]});
  }
  return out;
}

double cost_of(const RigidTransformd& pose, const std::vector<Correspondence>& corr,
               const CameraIntrinsics& k) {
  double cost = 0.0;
  for (const auto& c : corr) {
    const Point3d p = pose * c.board;
    if (!(p.z() > 0)) return std::numeric_limits<double>::infinity();
    cost += (project_pinhole(k, p) - c.pixel).squaredNorm();
  }
  return cost;
}

}  // namespace

RigidTransformd initial_board_pose(const MarkerDetections& detections,
                                   const CameraIntrinsics& intrinsics,
                                   const TargetGeometry& geometry) {
  if (detections.markers.empty()) throw DataError("no markers detected");
  Vec3d t_sum = Vec3d::Zero();
  Mat3d r_sum = Mat3d::Zero();
  for (const auto& m : detections.markers) {
    check_not_degenerate(m.corners);
    const auto corners = geometry.marker_corners(m.id);
    std::array<Eigen::Vector2d, 4> board, image;
    for (int k = 0; k < 4; ++k) {
      board[k] = corners[k].head<2>();
      image[k] = {(m.corners[k].x() - intrinsics.cx) / intrinsics.fx,
                  (m.corners[k].y() - intrinsics.cy) / intrinsics.fy};
    }
    const RigidTransformd pose = decompose_planar_homography(homography_dlt(board, image));
    if (!pose.translation().allFinite() || !pose.rotation().allFinite()) {
      throw DataError("marker homography decomposition failed");
    }
    t_sum += pose.translation();
    r_sum += pose.rotation();
  }
  const double n = static_cast<double>(detections.markers.size());
  return {project_to_rotation(r_sum / n), t_sum / n};
}

void reprojection_residuals(const RigidTransformd& pose, const MarkerDetections& detections,
                            const CameraIntrinsics& k, const TargetGeometry& geometry,
                            Eigen::VectorXd& residuals, Eigen::MatrixXd* jacobian) {
  const auto corr = correspondences(detections, geometry);
  const auto n = static_cast<Eigen::Index>(corr.size());
  residuals.resize(2 * n);
  if (jacobian) jacobian->resize(2 * n, 6);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec3d rotated = pose.rotation() * corr[i].board;
    const Point3d p = rotated + pose.translation();
    residuals.segment<2>(2 * i) = project_pinhole(k, p) - corr[i].pixel;
    if (!jacobian) continue;
    const double iz = 1.0 / p.z();
    Eigen::Matrix<double, 2, 3> dproj;
    dproj << k.fx * iz, 0, -k.fx * p.x() * iz * iz, 0, k.fy * iz, -k.fy * p.y() * iz * iz;
    jacobian->block<2, 3>(2 * i, 0) = dproj * (-skew(rotated));
    jacobian->block<2, 3>(2 * i, 3) = dproj;
  }
}

RigidTransformd apply_pose_increment(const RigidTransformd& pose,
                                     const Eigen::Matrix<double, 6, 1>& delta) {
  return {so3_exp<double>(delta.head<3>()) * pose.rotation(), pose.translation() + delta.tail<3>()};
}

BoardPose refine_board_pose_lm(const RigidTransformd& initial, const MarkerDetections& detections,
                               const CameraIntrinsics& intrinsics,
                               const TargetGeometry& geometry, const LmParams& params) {
  const auto corr = correspondences(detections, geometry);
  if (corr.empty()) throw DataError("no marker corners to refine against");
  const double n_corners = static_cast<double>(corr.size());

  RigidTransformd pose = initial;
  double cost = cost_of(pose, corr, intrinsics);
  if (!std::isfinite(cost)) throw DataError("initial board pose puts corners behind the camera");

  auto result = [&] { return BoardPose{pose, std::sqrt(cost / n_corners)}; };

  double lambda = params.lambda0;
  Eigen::VectorXd r;
  Eigen::MatrixXd j;
  for (int iter = 0; iter < params.max_iters; ++iter) {
    reprojection_residuals(pose, detections, intrinsics, geometry, r, &j);
    const Eigen::Matrix<double, 6, 6> jtj = j.transpose() * j;
    const Eigen::Matrix<double, 6, 1> g = j.transpose() * r;
    const Eigen::Matrix<double, 6, 1> diag = jtj.diagonal().cwiseMax(1e-12);

    bool accepted = false;
    bool converged = false;
    while (lambda <= params.lambda_max) {
      Eigen::Matrix<double, 6, 6> a = jtj;
      a.diagonal() += lambda * diag;
      const Eigen::Matrix<double, 6, 1> delta = a.ldlt().solve(-g);
      if (!delta.allFinite()) break;
      if (delta.norm() < params.tol) {
        converged = true;
        break;
      }
      const RigidTransformd candidate = apply_pose_increment(pose, delta);
      const double candidate_cost = cost_of(candidate, corr, intrinsics);
      if (candidate_cost < cost) {
        pose = candidate;
        cost = candidate_cost;
        lambda = std::max(lambda / 10.0, 1e-15);
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }
    if (converged) break;
    if (!accepted) {
      // Damping saturated. Fine at a stationary point, divergence otherwise.
      const double g_scale = 1e-6 * j.norm() * r.norm() + 1e-12;
      if (g.norm() > g_scale) {
        throw PoseEstimationError("board pose refinement diverged", result());
      }
      break;
    }
  }
  return result();
}

ReferencePointSet derive_hole_centers(const BoardPose& pose, const TargetGeometry& geometry) {
  ReferencePointSet out;
  for (HoleLabel label : kHoleLabels) {
    out.at(label) = pose.camera_from_board * geometry.hole_center(label);
  }
  return out;
}

}  // namespace holecalib
