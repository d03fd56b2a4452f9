#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "holecalib/registration.hpp"
#include "test_support.hpp"

namespace holecalib {
namespace {

Eigen::Matrix3Xd random_cloud(std::mt19937_64& rng, int n, double scale = 3.0) {
  Eigen::Matrix3Xd out(3, n);
  for (int i = 0; i < n; ++i) out.col(i) = testing::random_point(rng, scale);
  return out;
}

Eigen::Matrix3Xd transformed(const RigidTransformd& t, const Eigen::Matrix3Xd& pts) {
  Eigen::Matrix3Xd out(3, pts.cols());
  for (Eigen::Index i = 0; i < pts.cols(); ++i) out.col(i) = t * Vec3d(pts.col(i));
  return out;
}

std::vector<LabeledPoint> labeled(const std::vector<std::array<Point3d, 4>>& poses) {
  std::vector<LabeledPoint> out;
  for (std::size_t m = 0; m < poses.size(); ++m) {
    for (HoleLabel label : kHoleLabels) {
      out.push_back({poses[m][static_cast<int>(label)], label, static_cast<int>(m)});
    }
  }
  return out;
}

TEST(Umeyama, IdentityForEqualSets) {
  std::mt19937_64 rng(31);
  const Eigen::Matrix3Xd x = random_cloud(rng, 8);
  const RigidTransformd t = umeyama_rigid(x, x);
  EXPECT_LT(linear_error(t, RigidTransformd::identity()), 1e-12);
  EXPECT_LT(angular_error(t, RigidTransformd::identity()), 1e-12);
}

TEST(Umeyama, RecoversRandomTransform) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 1000; ++trial) {
    const RigidTransformd truth = testing::random_transform(rng);
    const Eigen::Matrix3Xd y = random_cloud(rng, 8);
    const RigidTransformd est = umeyama_rigid(transformed(truth, y), y);
    EXPECT_LT(linear_error(est, truth), 1e-9);
    EXPECT_LT(angular_error(est, truth), 1e-9);
    EXPECT_NEAR(est.rotation().determinant(), 1.0, 1e-12);
  }
}

TEST(Umeyama, CoplanarRectangle) {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 1000; ++trial) {
    const RigidTransformd truth = testing::random_transform(rng);
    const auto rect = target_hole_centers(testing::random_transform(rng), TargetGeometry{});
    Eigen::Matrix3Xd y(3, 4);
    for (int k = 0; k < 4; ++k) y.col(k) = rect[k];
    const RigidTransformd est = umeyama_rigid(transformed(truth, y), y);
    EXPECT_LT(linear_error(est, truth), 1e-9);
    EXPECT_LT(angular_error(est, truth), 1e-9);
    EXPECT_NEAR(est.rotation().determinant(), 1.0, 1e-12);
  }
}

TEST(Umeyama, DegenerateInputs) {
  Eigen::Matrix3Xd line(3, 4);
  for (int i = 0; i < 4; ++i) line.col(i) = Vec3d(i, 2 * i, -i);
  EXPECT_THROW(umeyama_rigid(line, line), DataError);
  Eigen::Matrix3Xd two(3, 2);
  two << 0, 1, 0, 0, 0, 1;
  EXPECT_THROW(umeyama_rigid(two, two), DataError);
  Eigen::Matrix3Xd same = Eigen::Matrix3Xd::Ones(3, 5);
  EXPECT_THROW(umeyama_rigid(same, same), DataError);
}

TEST(Umeyama, EquivariantUnderCommonMotion) {
  std::mt19937_64 rng(34);
  std::normal_distribution<double> noise(0, 0.01);
  for (int trial = 0; trial < 100; ++trial) {
    const RigidTransformd truth = testing::random_transform(rng);
    const RigidTransformd g = testing::random_transform(rng);
    const Eigen::Matrix3Xd y = random_cloud(rng, 12);
    Eigen::Matrix3Xd x = transformed(truth, y);
    for (Eigen::Index i = 0; i < x.cols(); ++i) x.col(i) += Vec3d(noise(rng), noise(rng), noise(rng));
    const RigidTransformd base = umeyama_rigid(x, y);
    const RigidTransformd moved = umeyama_rigid(transformed(g, x), transformed(g, y));
    const RigidTransformd expected = g * base * g.inverse();
    EXPECT_LT(linear_error(moved, expected), 1e-9);
    EXPECT_LT(angular_error(moved, expected), 1e-9);
  }
}

TEST(Umeyama, OptimalAgainstRivals) {
  std::mt19937_64 rng(35);
  std::normal_distribution<double> noise(0, 0.02);
  const RigidTransformd truth = testing::random_transform(rng);
  std::vector<std::array<Point3d, 4>> xs, ys;
  for (int m = 0; m < 3; ++m) {
    const auto rect = target_hole_centers(testing::random_transform(rng), TargetGeometry{});
    std::array<Point3d, 4> xm;
    for (int k = 0; k < 4; ++k) xm[k] = truth * rect[k] + Vec3d(noise(rng), noise(rng), noise(rng));
    xs.push_back(xm);
    ys.push_back(rect);
  }
  const CorrespondenceSet pairs = build_correspondences(labeled(xs), labeled(ys));
  const RigidTransformd est = umeyama_rigid(pairs);
  const double best = registration_rmse(pairs, est);
  EXPECT_LE(best, registration_rmse(pairs, truth));
  std::normal_distribution<double> perturb(0, 0.05);
  for (int i = 0; i < 1000; ++i) {
    const RigidTransformd rival =
        RigidTransformd::from_params(perturb(rng), perturb(rng), perturb(rng), perturb(rng),
                                     perturb(rng), perturb(rng)) *
        est;
    EXPECT_LE(best, registration_rmse(pairs, rival) + 1e-15);
  }
}

TEST(Correspondences, OrderAndErrors) {
  std::mt19937_64 rng(36);
  std::vector<std::array<Point3d, 4>> xs, ys;
  for (int m = 0; m < 3; ++m) {
    std::array<Point3d, 4> a, b;
    for (int k = 0; k < 4; ++k) {
      a[k] = testing::random_point(rng);
      b[k] = testing::random_point(rng);
    }
    xs.push_back(a);
    ys.push_back(b);
  }
  const auto x = labeled(xs);
  const auto y = labeled(ys);
  const CorrespondenceSet pairs = build_correspondences(x, y);
  ASSERT_EQ(pairs.size(), 12u);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    EXPECT_EQ(pairs[i].pose, static_cast<int>(i / 4));
    EXPECT_EQ(pairs[i].label, kHoleLabels[i % 4]);
    EXPECT_EQ(pairs[i].x, xs[i / 4][i % 4]);
    EXPECT_EQ(pairs[i].y, ys[i / 4][i % 4]);
  }
  EXPECT_EQ(build_correspondences(std::span(x).first(4), std::span(y).first(4)).size(), 4u);

  auto shuffled_x = x;
  auto shuffled_y = y;
  std::shuffle(shuffled_x.begin(), shuffled_x.end(), rng);
  std::shuffle(shuffled_y.begin(), shuffled_y.end(), rng);
  const CorrespondenceSet again = build_correspondences(shuffled_x, shuffled_y);
  ASSERT_EQ(again.size(), pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    EXPECT_EQ(again[i].x, pairs[i].x);
    EXPECT_EQ(again[i].y, pairs[i].y);
  }
  const RigidTransformd a = umeyama_rigid(pairs);
  const RigidTransformd b = umeyama_rigid(again);
  EXPECT_EQ(a.matrix(), b.matrix());

  std::vector<LabeledPoint> missing_pose;
  for (const auto& p : y) {
    if (p.pose != 2) missing_pose.push_back(p);
  }
  EXPECT_THROW(build_correspondences(x, missing_pose), DataError);
  auto duplicate = y;
  duplicate[1].label = duplicate[0].label;
  EXPECT_THROW(build_correspondences(x, duplicate), DataError);
}

TEST(RegistrationRmse, Examples) {
  CorrespondenceSet pairs;
  for (int k = 0; k < 4; ++k) pairs.push_back({Vec3d(k, 1, 0), Vec3d(k, 1, 0), kHoleLabels[k], 0});
  EXPECT_EQ(registration_rmse(pairs, RigidTransformd::identity()), 0.0);
  pairs[2].x += Vec3d(0, 0.01, 0);
  EXPECT_NEAR(registration_rmse(pairs, RigidTransformd::identity()), 0.005, 1e-15);
  EXPECT_EQ(registration_rmse({}, RigidTransformd::identity()), 0.0);
}

TEST(RegistrationRmse, JitterScalesWithSqrt3) {
  std::mt19937_64 rng(37);
  const double sigma = 0.01;
  std::normal_distribution<double> noise(0, sigma);
  double sum_sq = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    CorrespondenceSet pairs;
    for (int k = 0; k < 4; ++k) {
      const Point3d y = testing::random_point(rng);
      pairs.push_back({y + Vec3d(noise(rng), noise(rng), noise(rng)), y, kHoleLabels[k], 0});
    }
    const double r = registration_rmse(pairs, RigidTransformd::identity());
    sum_sq += r * r;
  }
  EXPECT_NEAR(std::sqrt(sum_sq / 1000), sigma * std::sqrt(3.0), 0.03 * sigma * std::sqrt(3.0));
}

}  // namespace
}  // namespace holecalib
