#pragma once

#include <Eigen/Core>
#include <Eigen/SVD>

#include <span>
#include <vector>

#include "holecalib/aggregation.hpp"

namespace holecalib {

/// Least-squares rigid transform T minimizing sum |x_i - T y_i|^2 (Umeyama,
/// scale fixed to 1). Columns of `x` and `y` are corresponding points.
///
/// The reflection correction S = diag(1, 1, det(U V^T)) keeps det(R) = +1 for
/// coplanar inputs. Throws DataError for fewer than 3 points or collinear
/// configurations (sigma_1 / sigma_0 < 1e-9 of the cross-covariance).
template <typename DerivedX, typename DerivedY>
RigidTransform<typename DerivedX::Scalar> umeyama_rigid(const Eigen::MatrixBase<DerivedX>& x,
                                                        const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  static_assert(DerivedX::RowsAtCompileTime == 3 && DerivedY::RowsAtCompileTime == 3,
                "points are 3-vectors stored as columns");
  const Eigen::Index n = x.cols();
  if (n != y.cols()) throw DataError("umeyama_rigid: point sets differ in size");
  if (n < 3) throw DataError("umeyama_rigid: need at least 3 correspondences");

  const Vec3<Scalar> mean_x = x.rowwise().mean();
  const Vec3<Scalar> mean_y = y.rowwise().mean();
  const Eigen::Matrix<Scalar, 3, Eigen::Dynamic> xc = x.colwise() - mean_x;
  const Eigen::Matrix<Scalar, 3, Eigen::Dynamic> yc = y.colwise() - mean_y;
  const Mat3<Scalar> sigma = xc * yc.transpose() / Scalar(n);

  Eigen::JacobiSVD<Mat3<Scalar>> svd(sigma, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec3<Scalar>& sv = svd.singularValues();
  if (!(sv(0) > Scalar(0)) || sv(1) < Scalar(1e-9) * sv(0)) {
    throw DataError("umeyama_rigid: degenerate (collinear) point configuration");
  }

  const Mat3<Scalar>& u = svd.matrixU();
  const Mat3<Scalar>& v = svd.matrixV();
  Vec3<Scalar> s = Vec3<Scalar>::Ones();
  if ((u * v.transpose()).determinant() < Scalar(0)) s(2) = Scalar(-1);
  const Mat3<Scalar> r = u * s.asDiagonal() * v.transpose();
  return {r, mean_x - r * mean_y};
}

/// One pair of homologous points with shared (label, pose) tags.
struct Correspondence {
  Point3d x;
  Point3d y;
  HoleLabel label = HoleLabel::TopLeft;
  int pose = 0;
};

using CorrespondenceSet = std::vector<Correspondence>;

/// Pairs points by (label, pose); output ordered pose-major, then tl, tr, bl,
/// br. Throws DataError when the tag sets differ or contain duplicates.
CorrespondenceSet build_correspondences(std::span<const LabeledPoint> x,
                                        std::span<const LabeledPoint> y);

/// Transform mapping the y points onto the x points.
RigidTransformd umeyama_rigid(const CorrespondenceSet& pairs);

/// sqrt(mean |x - T y|^2) over all pairs; 0 for an empty set.
double registration_rmse(const CorrespondenceSet& pairs, const RigidTransformd& transform);

}  // namespace holecalib
