#include "holecalib/registration.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace holecalib {

namespace {

using Tag = std::pair<int, int>;  // (pose, label)

std::map<Tag, Point3d> index_by_tag(std::span<const LabeledPoint> pts, const char* side) {
  std::map<Tag, Point3d> out;
  for (const auto& p : pts) {
    if (!out.emplace(Tag{p.pose, static_cast<int>(p.label)}, p.point).second) {
      throw DataError(std::string("duplicate (label, pose) tag in ") + side + " points");
    }
  }
  return out;
}

}  // namespace

CorrespondenceSet build_correspondences(std::span<const LabeledPoint> x,
                                        std::span<const LabeledPoint> y) {
  const auto xs = index_by_tag(x, "X");
  const auto ys = index_by_tag(y, "Y");
  if (xs.size() != ys.size()) throw DataError("X and Y cover different (label, pose) tags");
  CorrespondenceSet out;
  out.reserve(xs.size());
  for (const auto& [tag, px] : xs) {
    const auto it = ys.find(tag);
    if (it == ys.end()) {
      throw DataError("Y is missing pose " + std::to_string(tag.first) + " label " +
                      std::string(to_string(static_cast<HoleLabel>(tag.second))));
    }
    out.push_back({px, it->second, static_cast<HoleLabel>(tag.second), tag.first});
  }
  return out;
}

RigidTransformd umeyama_rigid(const CorrespondenceSet& pairs) {
  Eigen::Matrix3Xd x(3, static_cast<Eigen::Index>(pairs.size()));
  Eigen::Matrix3Xd y(3, static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    x.col(static_cast<Eigen::Index>(i)) = pairs[i].x;
    y.col(static_cast<Eigen::Index>(i)) = pairs[i].y;
  }
  return umeyama_rigid(x, y);
}

double registration_rmse(const CorrespondenceSet& pairs, const RigidTransformd& transform) {
  if (pairs.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& c : pairs) sum += (c.x - transform * c.y).squaredNorm();
  return std::sqrt(sum / static_cast<double>(pairs.size()));
}

}  // namespace holecalib
