#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "holecalib/geometry.hpp"

namespace holecalib {

/// Linear and angular calibration error against ground truth.
struct Metrics {
  double e_t = 0.0;
  double e_r = 0.0;
};

Metrics evaluate_transform(const RigidTransformd& estimate, const RigidTransformd& truth);

/// One row of `setup,pose_cfg,K,M,N,e_t_m,e_r_rad,rmse_m,seed`.
struct MetricsRow {
  std::string setup;
  std::string pose_cfg;
  double k = 0.0;
  int m = 0;
  int n = 0;
  Metrics metrics;
  double rmse = 0.0;
  std::uint64_t seed = 0;
};

inline constexpr const char* kMetricsHeader = "setup,pose_cfg,K,M,N,e_t_m,e_r_rad,rmse_m,seed";

std::string format_metrics_row(const MetricsRow& row);

/// Appends rows to a CSV file, writing the header first if the file is new
/// or empty.
void append_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows);

/// Line plot of mean e_t and e_r against the swept parameter, one panel each.
void write_sweep_svg(std::ostream& out, const std::string& parameter,
                     const std::vector<MetricsRow>& rows);

}  // namespace holecalib
