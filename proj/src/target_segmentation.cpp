#include "holecalib/target_segmentation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace holecalib {

namespace {

struct Support {
  int count = 0;
  double mean_abs_residual = std::numeric_limits<double>::infinity();

  bool better_than(const Support& other) const {
    if (count != other.count) return count > other.count;
    return mean_abs_residual < other.mean_abs_residual;
  }
};

bool is_vertical(const Vec3d& normal, const Vec3d& up, double alpha) {
  // |angle(n, up) - pi/2| == asin(|n . up|) for unit vectors.
  return std::asin(std::min(1.0, std::abs(normal.dot(up)))) <= alpha;
}

Support plane_support(const std::vector<Point3d>& pts, const PlaneModeld& plane, double delta) {
  Support s;
  double sum = 0.0;
  for (const auto& p : pts) {
    const double r = std::abs(plane.signed_distance(p));
    if (r <= delta) {
      ++s.count;
      sum += r;
    }
  }
  if (s.count > 0) s.mean_abs_residual = sum / s.count;
  return s;
}

bool fit_plane_least_squares(const std::vector<Point3d>& pts, const PlaneModeld& model,
                             double delta, PlaneModeld& out) {
  Vec3d centroid = Vec3d::Zero();
  int n = 0;
  for (const auto& p : pts) {
    if (std::abs(model.signed_distance(p)) <= delta) {
      centroid += p;
      ++n;
    }
  }
  if (n < 3) return false;
  centroid /= n;
  Mat3d cov = Mat3d::Zero();
  for (const auto& p : pts) {
    if (std::abs(model.signed_distance(p)) <= delta) {
      const Vec3d q = p - centroid;
      cov += q * q.transpose();
    }
  }
  Eigen::SelfAdjointEigenSolver<Mat3d> eig(cov);
  Vec3d normal = eig.eigenvectors().col(0).normalized();
  if (normal.dot(model.normal) < 0) normal = -normal;
  out = PlaneModeld::through(centroid, normal);
  return true;
}

}  // namespace

PlaneModeld ransac_plane_vertical(const PointCloud& cloud, const PlaneRansacParams& params) {
  const auto& pts = cloud.points;
  if (pts.size() < 3) throw DataError("plane RANSAC needs at least 3 points");
  const Vec3d up = params.up_axis.normalized();

  std::mt19937_64 rng(params.seed);
  std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);

  PlaneModeld best;
  Support best_support;
  bool found = false;
  for (int it = 0; it < params.max_iters; ++it) {
    const std::size_t i = pick(rng);
    const std::size_t j = pick(rng);
    const std::size_t k = pick(rng);
    if (i == j || j == k || i == k) continue;
    const Vec3d n = (pts[j] - pts[i]).cross(pts[k] - pts[i]);
    const double norm = n.norm();
    if (norm < 1e-12) continue;
    const PlaneModeld model = PlaneModeld::through(pts[i], n / norm);
    if (!is_vertical(model.normal, up, params.alpha_plane)) continue;
    const Support s = plane_support(pts, model, params.delta_plane);
    if (!found || s.better_than(best_support)) {
      best = model;
      best_support = s;
      found = true;
    }
  }
  if (!found || best_support.count < params.min_inliers) {
    throw FrameRejected(RejectReason::NoPlane, "no vertical plane with enough support");
  }

  for (int pass = 0; pass < 2; ++pass) {
    PlaneModeld refined;
    if (!fit_plane_least_squares(pts, best, params.delta_plane, refined)) break;
    if (!is_vertical(refined.normal, up, params.alpha_plane)) break;
    const Support s = plane_support(pts, refined, params.delta_plane);
    if (!s.better_than(best_support)) break;
    best = refined;
    best_support = s;
  }

  if (best.d < 0) {
    best.normal = -best.normal;
    best.d = -best.d;
  }
  return best;
}

PointCloud plane_inlier_filter(const PointCloud& cloud, const PlaneModeld& plane,
                               double delta_inliers) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    if (std::abs(plane.signed_distance(cloud.points[i])) <= delta_inliers) keep.push_back(i);
  }
  return cloud.select(keep);
}

PlaneProjection project_to_plane_2d(const PointCloud& cloud, const PlaneModeld& plane,
                                    const Vec3d& up_axis) {
  const Vec3d z = plane.normal.normalized();
  Vec3d x = up_axis.cross(z);
  if (x.norm() < 1e-9) {
    // Normal parallel to up: any in-plane direction works.
    x = z.unitOrthogonal();
  }
  x.normalize();
  const Vec3d y = z.cross(x);

  Vec3d centroid = Vec3d::Zero();
  for (const auto& p : cloud.points) centroid += p;
  if (!cloud.empty()) centroid /= static_cast<double>(cloud.size());
  const Vec3d origin = centroid - plane.signed_distance(centroid) * z;

  Mat3d r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = z;

  PlaneProjection out{{}, RigidTransformd(r, origin)};
  out.points.reserve(cloud.size());
  for (const auto& p : cloud.points) {
    const Vec3d q = p - origin;
    out.points.emplace_back(q.dot(x), q.dot(y));
  }
  return out;
}

bool circle_from_three_points(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                              const Eigen::Vector2d& c, Circle2D& out) {
  const Eigen::Vector2d ab = b - a;
  const Eigen::Vector2d ac = c - a;
  const double det = 2.0 * (ab.x() * ac.y() - ab.y() * ac.x());
  const double scale = ab.squaredNorm() * ac.squaredNorm();
  if (std::abs(det) <= 1e-12 * std::max(1e-300, std::sqrt(scale))) return false;
  const double ab2 = ab.squaredNorm();
  const double ac2 = ac.squaredNorm();
  const Eigen::Vector2d rel((ac.y() * ab2 - ab.y() * ac2) / det, (ab.x() * ac2 - ac.x() * ab2) / det);
  out.center = a + rel;
  out.radius = rel.norm();
  out.inlier_count = 0;
  return std::isfinite(out.radius);
}

namespace {

Support circle_support(const std::vector<Eigen::Vector2d>& pts,
                       const std::vector<std::size_t>& active, const Circle2D& c,
                       double delta) {
  Support s;
  double sum = 0.0;
  for (std::size_t i : active) {
    const double r = std::abs((pts[i] - c.center).norm() - c.radius);
    if (r <= delta) {
      ++s.count;
      sum += r;
    }
  }
  if (s.count > 0) s.mean_abs_residual = sum / s.count;
  return s;
}

// Gauss-Newton on sum (|p - c| - R)^2 over the model's inliers.
Circle2D refine_circle(const std::vector<Eigen::Vector2d>& pts,
                       const std::vector<std::size_t>& active, const Circle2D& start,
                       double delta) {
  std::vector<Eigen::Vector2d> inliers;
  for (std::size_t i : active) {
    if (std::abs((pts[i] - start.center).norm() - start.radius) <= delta) inliers.push_back(pts[i]);
  }
  Circle2D c = start;
  if (inliers.size() < 4) return c;
  for (int it = 0; it < 20; ++it) {
    Eigen::Matrix3d jtj = Eigen::Matrix3d::Zero();
    Eigen::Vector3d jtr = Eigen::Vector3d::Zero();
    for (const auto& p : inliers) {
      const Eigen::Vector2d diff = p - c.center;
      const double dist = diff.norm();
      if (dist < 1e-12) continue;
      const Eigen::Vector3d j(-diff.x() / dist, -diff.y() / dist, -1.0);
      const double res = dist - c.radius;
      jtj += j * j.transpose();
      jtr += j * res;
    }
    const Eigen::Vector3d step = jtj.ldlt().solve(-jtr);
    if (!step.allFinite()) break;
    c.center += step.head<2>();
    c.radius += step(2);
    if (step.norm() < 1e-12) break;
  }
  return c;
}

}  // namespace

std::vector<Circle2D> ransac_circles_iterative(const std::vector<Eigen::Vector2d>& points,
                                               const TargetGeometry& geometry,
                                               const CircleRansacParams& params) {
  const int min_points = std::max(3, params.min_circle_points);
  const double min_separation = 2.0 * (geometry.hole_radius - params.delta_circle);

  std::vector<std::size_t> active(points.size());
  for (std::size_t i = 0; i < active.size(); ++i) active[i] = i;

  std::mt19937_64 rng(params.seed);
  std::vector<Circle2D> accepted;

  auto admissible = [&](const Circle2D& c) {
    if (std::abs(c.radius - geometry.hole_radius) > params.delta_radius) return false;
    for (const auto& other : accepted) {
      if ((other.center - c.center).norm() < min_separation) return false;
    }
    return true;
  };

  while (static_cast<int>(active.size()) >= min_points) {
    std::uniform_int_distribution<std::size_t> pick(0, active.size() - 1);
    Circle2D best;
    Support best_support;
    bool found = false;
    for (int it = 0; it < params.max_iters; ++it) {
      const std::size_t i = pick(rng);
      const std::size_t j = pick(rng);
      const std::size_t k = pick(rng);
      if (i == j || j == k || i == k) continue;
      Circle2D model;
      if (!circle_from_three_points(points[active[i]], points[active[j]], points[active[k]], model)) {
        continue;
      }
      if (!admissible(model)) continue;
      const Support s = circle_support(points, active, model, params.delta_circle);
      if (!found || s.better_than(best_support)) {
        best = model;
        best_support = s;
        found = true;
      }
    }
    if (!found || best_support.count < min_points) break;

    const Circle2D refined = refine_circle(points, active, best, params.delta_circle);
    if (admissible(refined)) {
      const Support s = circle_support(points, active, refined, params.delta_circle);
      if (s.count >= min_points) {
        best = refined;
        best_support = s;
      }
    }
    best.inlier_count = best_support.count;
    accepted.push_back(best);

    std::vector<std::size_t> rest;
    rest.reserve(active.size());
    for (std::size_t idx : active) {
      if (std::abs((points[idx] - best.center).norm() - best.radius) > params.delta_circle) {
        rest.push_back(idx);
      }
    }
    active.swap(rest);
  }

  if (accepted.size() < 4) {
    throw FrameRejected(RejectReason::Circles,
                        "found " + std::to_string(accepted.size()) + " circles");
  }
  return accepted;
}

namespace {

// Orders four points as a quadrilateral cycle a-b-c-d. The diagonals are the
// pairing with the largest total length.
std::array<int, 4> quad_cycle(const std::array<Eigen::Vector2d, 4>& p) {
  constexpr int pairings[3][4] = {{0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}};
  int best = 0;
  double best_len = -1.0;
  for (int k = 0; k < 3; ++k) {
    const auto& q = pairings[k];
    const double len = (p[q[0]] - p[q[1]]).norm() + (p[q[2]] - p[q[3]]).norm();
    if (len > best_len) {
      best_len = len;
      best = k;
    }
  }
  const auto& q = pairings[best];
  // Diagonals (q0, q1) and (q2, q3): cycle q0 -> q2 -> q1 -> q3.
  return {q[0], q[2], q[1], q[3]};
}

struct QuadEvaluation {
  double residual;
  std::array<int, 4> cycle;
  bool first_side_is_width;  // side (cycle0, cycle1) runs along a row
};

QuadEvaluation evaluate_quad(const std::array<Eigen::Vector2d, 4>& p, const TargetGeometry& g) {
  const auto cyc = quad_cycle(p);
  auto dist = [&](int a, int b) { return (p[cyc[a]] - p[cyc[b]]).norm(); };
  const double s0 = dist(0, 1), s1 = dist(1, 2), s2 = dist(2, 3), s3 = dist(3, 0);
  const double diag = g.diagonal();
  const double common = std::max({std::abs(dist(0, 2) - diag), std::abs(dist(1, 3) - diag),
                                  std::abs(s0 + s1 + s2 + s3 - g.perimeter())});
  const double w = g.centers_width, h = g.centers_height;
  const double as_width = std::max({std::abs(s0 - w), std::abs(s2 - w), std::abs(s1 - h), std::abs(s3 - h)});
  const double as_height = std::max({std::abs(s0 - h), std::abs(s2 - h), std::abs(s1 - w), std::abs(s3 - w)});
  if (as_width <= as_height) return {std::max(common, as_width), cyc, true};
  return {std::max(common, as_height), cyc, false};
}

}  // namespace

double rectangle_residual(const std::array<Eigen::Vector2d, 4>& centers,
                          const TargetGeometry& geometry) {
  return evaluate_quad(centers, geometry).residual;
}

RectangleMatch geometric_consistency_select(const std::vector<Circle2D>& circles,
                                            const TargetGeometry& geometry,
                                            double delta_consistency) {
  const std::size_t n = circles.size();
  if (n < 4) throw FrameRejected(RejectReason::Consistency, "fewer than four circles");

  int passing = 0;
  RectangleMatch match;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      for (std::size_t c = b + 1; c < n; ++c)
        for (std::size_t d = c + 1; d < n; ++d) {
          const std::array<std::size_t, 4> ids = {a, b, c, d};
          std::array<Eigen::Vector2d, 4> p;
          for (int k = 0; k < 4; ++k) p[k] = circles[ids[k]].center;
          const QuadEvaluation eval = evaluate_quad(p, geometry);
          if (eval.residual > delta_consistency) continue;
          if (++passing > 1) {
            throw FrameRejected(RejectReason::Consistency, "more than one rectangle matches");
          }

          // Rows are the two width sides; the one with larger mean y is on top.
          const auto& cyc = eval.cycle;
          std::array<int, 2> row0, row1;
          if (eval.first_side_is_width) {
            row0 = {cyc[0], cyc[1]};
            row1 = {cyc[2], cyc[3]};
          } else {
            row0 = {cyc[1], cyc[2]};
            row1 = {cyc[3], cyc[0]};
          }
          auto mean_y = [&](const std::array<int, 2>& r) { return p[r[0]].y() + p[r[1]].y(); };
          const auto& top = mean_y(row0) >= mean_y(row1) ? row0 : row1;
          const auto& bottom = mean_y(row0) >= mean_y(row1) ? row1 : row0;
          auto left_first = [&](const std::array<int, 2>& r) {
            return p[r[0]].x() <= p[r[1]].x() ? r : std::array<int, 2>{r[1], r[0]};
          };
          const auto t = left_first(top);
          const auto bt = left_first(bottom);
          match.circles[static_cast<int>(HoleLabel::TopLeft)] = circles[ids[t[0]]];
          match.circles[static_cast<int>(HoleLabel::TopRight)] = circles[ids[t[1]]];
          match.circles[static_cast<int>(HoleLabel::BottomLeft)] = circles[ids[bt[0]]];
          match.circles[static_cast<int>(HoleLabel::BottomRight)] = circles[ids[bt[1]]];
          match.residual = eval.residual;
        }
  if (passing == 0) throw FrameRejected(RejectReason::Consistency, "no rectangle matches");
  return match;
}

ReferencePointSet lift_to_3d(const std::array<Circle2D, 4>& circles,
                             const RigidTransformd& plane_frame) {
  ReferencePointSet out;
  for (int k = 0; k < 4; ++k) {
    out.centers[k] = plane_frame * Vec3d(circles[k].center.x(), circles[k].center.y(), 0.0);
  }
  return out;
}

}  // namespace holecalib
