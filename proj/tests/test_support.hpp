#pragma once

#include <random>

#include "holecalib/geometry.hpp"

namespace holecalib::testing {

inline RigidTransformd random_transform(std::mt19937_64& rng, double max_t = 5.0) {
  std::uniform_real_distribution<double> t(-max_t, max_t);
  std::uniform_real_distribution<double> a(-M_PI, M_PI);
  std::uniform_real_distribution<double> p(-1.5, 1.5);
  return RigidTransformd::from_params(t(rng), t(rng), t(rng), a(rng), p(rng), a(rng));
}

inline Point3d random_point(std::mt19937_64& rng, double scale = 5.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng), u(rng)};
}

}  // namespace holecalib::testing
