#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>

#include "holecalib/errors.hpp"

namespace holecalib {

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Mat3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using Mat4 = Eigen::Matrix<Scalar, 4, 4>;
/// (tx, ty, tz, rx, ry, rz): meters, then roll/pitch/yaw in radians.
template <typename Scalar>
using PoseParams = Eigen::Matrix<Scalar, 6, 1>;

using Vec3d = Vec3<double>;
using Point3d = Vec3<double>;
using Mat3d = Mat3<double>;
using Mat4d = Mat4<double>;
using PoseParamsd = PoseParams<double>;

template <typename Scalar>
Mat3<Scalar> rot_x(Scalar angle) {
  return Eigen::AngleAxis<Scalar>(angle, Vec3<Scalar>::UnitX()).toRotationMatrix();
}

template <typename Scalar>
Mat3<Scalar> rot_y(Scalar angle) {
  return Eigen::AngleAxis<Scalar>(angle, Vec3<Scalar>::UnitY()).toRotationMatrix();
}

template <typename Scalar>
Mat3<Scalar> rot_z(Scalar angle) {
  return Eigen::AngleAxis<Scalar>(angle, Vec3<Scalar>::UnitZ()).toRotationMatrix();
}

/// R = Rz(yaw) * Ry(pitch) * Rx(roll), acting on column vectors.
template <typename Scalar>
Mat3<Scalar> euler_to_rotation(Scalar roll, Scalar pitch, Scalar yaw) {
  return rot_z(yaw) * rot_y(pitch) * rot_x(roll);
}

/// Inverse of euler_to_rotation. Returns (roll, pitch, yaw); pitch in [-pi/2, pi/2].
template <typename Scalar>
Vec3<Scalar> rotation_to_euler(const Mat3<Scalar>& R) {
  using std::atan2;
  using std::sqrt;
  const Scalar cos_pitch = sqrt(R(2, 1) * R(2, 1) + R(2, 2) * R(2, 2));
  const Scalar pitch = atan2(-R(2, 0), cos_pitch);
  if (cos_pitch < Scalar(1e-12)) {
    // Gimbal lock: only yaw -/+ roll is observable, put it all on yaw.
    return {Scalar(0), pitch, atan2(-R(0, 1), R(1, 1))};
  }
  return {atan2(R(2, 1), R(2, 2)), pitch, atan2(R(1, 0), R(0, 0))};
}

template <typename Scalar>
Mat3<Scalar> skew(const Vec3<Scalar>& v) {
  Mat3<Scalar> m;
  m << Scalar(0), -v.z(), v.y(), v.z(), Scalar(0), -v.x(), -v.y(), v.x(), Scalar(0);
  return m;
}

/// Rotation matrix of the axis-angle vector `omega`.
template <typename Scalar>
Mat3<Scalar> so3_exp(const Vec3<Scalar>& omega) {
  const Scalar angle = omega.norm();
  if (angle < Scalar(1e-15)) return Mat3<Scalar>::Identity() + skew(omega);
  return Eigen::AngleAxis<Scalar>(angle, omega / angle).toRotationMatrix();
}

/// max |R^T R - I| entry, plus |det R - 1|.
template <typename Scalar>
Scalar orthonormality_residual(const Mat3<Scalar>& R) {
  using std::abs;
  const Scalar ortho = (R.transpose() * R - Mat3<Scalar>::Identity()).cwiseAbs().maxCoeff();
  return std::max(ortho, Scalar(abs(R.determinant() - Scalar(1))));
}

/// Proper rigid motion p -> R p + t.
template <typename Scalar>
class RigidTransform {
 public:
  RigidTransform() : rotation_(Mat3<Scalar>::Identity()), translation_(Vec3<Scalar>::Zero()) {}
  RigidTransform(const Mat3<Scalar>& rotation, const Vec3<Scalar>& translation)
      : rotation_(rotation), translation_(translation) {}

  static RigidTransform identity() { return {}; }

  static RigidTransform from_params(const PoseParams<Scalar>& theta) {
    return {euler_to_rotation(theta(3), theta(4), theta(5)), theta.template head<3>()};
  }

  static RigidTransform from_params(Scalar tx, Scalar ty, Scalar tz, Scalar rx, Scalar ry,
                                    Scalar rz) {
    PoseParams<Scalar> theta;
    theta << tx, ty, tz, rx, ry, rz;
    return from_params(theta);
  }

  /// Throws DataError if the rotation block is not orthonormal with det +1.
  static RigidTransform from_matrix(const Mat4<Scalar>& m, Scalar tol = Scalar(1e-6)) {
    const Mat3<Scalar> r = m.template topLeftCorner<3, 3>();
    if (orthonormality_residual(r) > tol) {
      throw DataError("matrix rotation block is not a proper rotation");
    }
    return {r, m.template topRightCorner<3, 1>()};
  }

  const Mat3<Scalar>& rotation() const { return rotation_; }
  const Vec3<Scalar>& translation() const { return translation_; }

  Mat4<Scalar> matrix() const {
    Mat4<Scalar> m = Mat4<Scalar>::Identity();
    m.template topLeftCorner<3, 3>() = rotation_;
    m.template topRightCorner<3, 1>() = translation_;
    return m;
  }

  PoseParams<Scalar> params() const {
    PoseParams<Scalar> theta;
    theta << translation_, rotation_to_euler(rotation_);
    return theta;
  }

  RigidTransform inverse() const {
    const Mat3<Scalar> rt = rotation_.transpose();
    return {rt, -(rt * translation_)};
  }

  Vec3<Scalar> operator*(const Vec3<Scalar>& p) const { return rotation_ * p + translation_; }

  RigidTransform operator*(const RigidTransform& other) const {
    return {rotation_ * other.rotation_, rotation_ * other.translation_ + translation_};
  }

  template <typename Other>
  RigidTransform<Other> cast() const {
    return {rotation_.template cast<Other>(), translation_.template cast<Other>()};
  }

 private:
  Mat3<Scalar> rotation_;
  Vec3<Scalar> translation_;
};

using RigidTransformd = RigidTransform<double>;

template <typename Scalar>
RigidTransform<Scalar> params_to_transform(const PoseParams<Scalar>& theta) {
  return RigidTransform<Scalar>::from_params(theta);
}

template <typename Scalar>
PoseParams<Scalar> transform_to_params(const RigidTransform<Scalar>& transform) {
  return transform.params();
}

template <typename Scalar>
Vec3<Scalar> apply(const RigidTransform<Scalar>& transform, const Vec3<Scalar>& p) {
  return transform * p;
}

template <typename Scalar>
RigidTransform<Scalar> invert(const RigidTransform<Scalar>& transform) {
  return transform.inverse();
}

/// compose(a, b) maps p to a(b(p)).
template <typename Scalar>
RigidTransform<Scalar> compose(const RigidTransform<Scalar>& a, const RigidTransform<Scalar>& b) {
  return a * b;
}

template <typename Scalar>
struct SphericalPoint {
  Scalar radius;
  Scalar inclination;  // from +z, in [0, pi]
  Scalar azimuth;      // from +x towards +y, in (-pi, pi]
};

using SphericalPointd = SphericalPoint<double>;

template <typename Scalar>
SphericalPoint<Scalar> to_spherical(const Vec3<Scalar>& p) {
  using std::acos;
  using std::atan2;
  const Scalar radius = p.norm();
  if (!(radius > Scalar(0))) throw DataError("spherical coordinates undefined at the origin");
  const Scalar cos_incl = std::clamp(p.z() / radius, Scalar(-1), Scalar(1));
  return {radius, acos(cos_incl), atan2(p.y(), p.x())};
}

template <typename Scalar>
Vec3<Scalar> from_spherical(const SphericalPoint<Scalar>& s) {
  using std::cos;
  using std::sin;
  return {s.radius * sin(s.inclination) * cos(s.azimuth),
          s.radius * sin(s.inclination) * sin(s.azimuth), s.radius * cos(s.inclination)};
}

/// Wraps an angle to (-pi, pi].
template <typename Scalar>
Scalar wrap_angle(Scalar a) {
  const Scalar two_pi = Scalar(2 * M_PI);
  a = std::fmod(a + Scalar(M_PI), two_pi);
  if (a < Scalar(0)) a += two_pi;
  return a - Scalar(M_PI);
}

/// Plane n . p + d = 0 with unit normal.
template <typename Scalar>
struct PlaneModel {
  Vec3<Scalar> normal = Vec3<Scalar>::UnitZ();
  Scalar d = Scalar(0);

  Scalar signed_distance(const Vec3<Scalar>& p) const { return normal.dot(p) + d; }

  static PlaneModel through(const Vec3<Scalar>& point, const Vec3<Scalar>& unit_normal) {
    return {unit_normal, -unit_normal.dot(point)};
  }
};

using PlaneModeld = PlaneModel<double>;

template <typename Scalar>
Scalar linear_error(const Vec3<Scalar>& t_hat, const Vec3<Scalar>& t) {
  return (t_hat - t).norm();
}

/// Angle of the relative rotation R_hat^-1 R.
///
/// Cosine from (trace - 1) / 2 clamped to [-1, 1], sine from the skew part;
/// atan2 keeps full precision near zero where a bare arccos bottoms out at ~1e-8.
template <typename Scalar>
Scalar angular_error(const Mat3<Scalar>& r_hat, const Mat3<Scalar>& r) {
  if (orthonormality_residual(r_hat) > Scalar(1e-6) || orthonormality_residual(r) > Scalar(1e-6)) {
    throw DataError("angular_error: input is not a rotation matrix");
  }
  const Mat3<Scalar> rel = r_hat.transpose() * r;
  const Scalar c = std::clamp((rel.trace() - Scalar(1)) / Scalar(2), Scalar(-1), Scalar(1));
  const Vec3<Scalar> axis(rel(2, 1) - rel(1, 2), rel(0, 2) - rel(2, 0), rel(1, 0) - rel(0, 1));
  const Scalar s = std::min(axis.norm() / Scalar(2), Scalar(1));
  return std::atan2(s, c);
}

template <typename Scalar>
Scalar angular_error(const RigidTransform<Scalar>& a, const RigidTransform<Scalar>& b) {
  return angular_error(a.rotation(), b.rotation());
}

template <typename Scalar>
Scalar linear_error(const RigidTransform<Scalar>& a, const RigidTransform<Scalar>& b) {
  return linear_error(a.translation(), b.translation());
}

extern template class RigidTransform<double>;
extern template class RigidTransform<float>;

}  // namespace holecalib
