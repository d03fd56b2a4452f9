#include "holecalib/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "holecalib/errors.hpp"
#include "holecalib/io.hpp"

namespace holecalib {

Metrics evaluate_transform(const RigidTransformd& estimate, const RigidTransformd& truth) {
  return {linear_error(estimate, truth), angular_error(estimate, truth)};
}

std::string format_metrics_row(const MetricsRow& row) {
  std::ostringstream ss;
  ss << row.setup << ',' << row.pose_cfg << ',' << format_double(row.k) << ',' << row.m << ','
     << row.n << ',' << format_double(row.metrics.e_t) << ',' << format_double(row.metrics.e_r)
     << ',' << format_double(row.rmse) << ',' << row.seed;
  return ss.str();
}

void append_metrics_csv(const std::string& path, const std::vector<MetricsRow>& rows) {
  std::error_code ec;
  const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw DataError("cannot write " + path);
  if (fresh) out << kMetricsHeader << '\n';
  for (const auto& r : rows) out << format_metrics_row(r) << '\n';
}

namespace {

struct Series {
  std::vector<double> x;
  std::vector<double> y;
};

void panel(std::ostream& out, double ox, const std::string& title, const std::string& xlabel,
           const Series& s) {
  const double w = 360, h = 240, left = 60, top = 30;
  const double xmin = s.x.front(), xmax = std::max(s.x.back(), xmin + 1);
  const double ymax = std::max(*std::max_element(s.y.begin(), s.y.end()), 1e-12) * 1.1;
  auto px = [&](double v) { return ox + left + (v - xmin) / (xmax - xmin) * w; };
  auto py = [&](double v) { return top + h - v / ymax * h; };
  out << "<text x=\"" << ox + left + w / 2 << "\" y=\"18\" text-anchor=\"middle\">" << title
      << "</text>\n";
  out << "<rect x=\"" << ox + left << "\" y=\"" << top << "\" width=\"" << w << "\" height=\"" << h
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double v = ymax * i / 4;
    out << "<text x=\"" << ox + left - 4 << "\" y=\"" << py(v) + 4
        << "\" text-anchor=\"end\" font-size=\"10\">" << format_double(std::round(v * 1e6) / 1e6)
        << "</text>\n";
  }
  for (double v : s.x) {
    out << "<text x=\"" << px(v) << "\" y=\"" << top + h + 14
        << "\" text-anchor=\"middle\" font-size=\"10\">" << format_double(v) << "</text>\n";
  }
  out << "<text x=\"" << ox + left + w / 2 << "\" y=\"" << top + h + 30
      << "\" text-anchor=\"middle\">" << xlabel << "</text>\n";
  out << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < s.x.size(); ++i) out << (i ? " " : "") << px(s.x[i]) << ',' << py(s.y[i]);
  out << "\"/>\n";
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    out << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"3\"/>\n";
  }
}

}  // namespace

void write_sweep_svg(std::ostream& out, const std::string& parameter,
                     const std::vector<MetricsRow>& rows) {
  if (rows.empty()) throw DataError("nothing to plot");
  std::map<int, std::pair<Metrics, int>> by_value;
  for (const auto& r : rows) {
    auto& [sum, count] = by_value[parameter == "N" ? r.n : r.m];
    sum.e_t += r.metrics.e_t;
    sum.e_r += r.metrics.e_r;
    ++count;
  }
  Series et, er;
  for (const auto& [v, entry] : by_value) {
    et.x.push_back(v);
    er.x.push_back(v);
    et.y.push_back(entry.first.e_t / entry.second);
    er.y.push_back(entry.first.e_r / entry.second);
  }
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"880\" height=\"320\" "
         "font-family=\"sans-serif\" font-size=\"12\">\n";
  panel(out, 0, "mean e_t [m]", parameter, et);
  panel(out, 440, "mean e_r [rad]", parameter, er);
  out << "</svg>\n";
}

}  // namespace holecalib
