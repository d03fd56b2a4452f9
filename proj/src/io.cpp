#include "holecalib/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "holecalib/parallel.hpp"
#include "holecalib/presets.hpp"

namespace holecalib {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  if (v == 0.0) return "0";  // folds -0
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::ifstream open_in(const std::string& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

double parse_double(const std::string& token, const std::string& what) {
  double v = 0.0;
  const char* end = token.data() + token.size();
  const auto res = std::from_chars(token.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw DataError("malformed number '" + token + "' in " + what);
  }
  return v;
}

int parse_int(const std::string& token, const std::string& what) {
  int v = 0;
  const char* end = token.data() + token.size();
  const auto res = std::from_chars(token.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) {
    throw DataError("malformed integer '" + token + "' in " + what);
  }
  return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  return out;
}

std::vector<std::string> tokens(const std::string& line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) out.emplace_back(line, i, j - i);
    i = j;
  }
  return out;
}

json params_json(const RigidTransformd& t) {
  json out = json::array();
  const PoseParamsd p = t.params();
  for (int i = 0; i < 6; ++i) out.push_back(p(i));
  return out;
}

json matrix_json(const RigidTransformd& t) {
  json out = json::array();
  const Mat4d m = t.matrix();
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) out.push_back(m(r, c));
  }
  return out;
}

PoseParamsd params_from_json(const json& j) {
  if (!j.is_array() || j.size() != 6) throw DataError("expected [x, y, z, roll, pitch, yaw]");
  PoseParamsd p;
  for (int i = 0; i < 6; ++i) p(i) = j[static_cast<std::size_t>(i)].get<double>();
  return p;
}

RigidTransformd matrix_from_json(const json& j) {
  // Row-major, either flat (16 numbers) or nested (4 rows of 4).
  const bool nested = j.is_array() && j.size() == 4 &&
                      std::all_of(j.begin(), j.end(), [](const json& row) {
                        return row.is_array() && row.size() == 4;
                      });
  if (!nested && (!j.is_array() || j.size() != 16)) {
    throw DataError("expected a 4x4 matrix or 16 row-major entries");
  }
  Mat4d m;
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          nested ? j[r][c].get<double>() : j[r * 4 + c].get<double>();
    }
  }
  return RigidTransformd::from_matrix(m, 1e-6);
}

std::string sensor_kind_name(SensorKind k) {
  switch (k) {
    case SensorKind::Lidar:
      return "lidar";
    case SensorKind::Monocular:
      return "mono";
    case SensorKind::StereoRange:
      return "stereo-range";
  }
  return "?";
}

SensorKind sensor_kind_from_name(const std::string& name) {
  if (name == "lidar") return SensorKind::Lidar;
  if (name == "mono" || name == "monocular") return SensorKind::Monocular;
  if (name == "stereo-range" || name == "stereo") return SensorKind::StereoRange;
  throw DataError("unknown sensor kind '" + name + "'");
}

}  // namespace

void write_cloud(std::ostream& out, const PointCloud& cloud) {
  cloud.validate();
  out << "x y z";
  if (cloud.has_ring()) out << " ring";
  if (cloud.has_range()) out << " range";
  if (cloud.has_pixel()) out << " u v";
  if (cloud.has_azimuth_index()) out << " azimuth_index";
  out << '\n';
  if (cloud.has_azimuth_index()) {
    out << "#azimuth_count " << cloud.azimuth_count << '\n';
    out << "#circular_rings " << (cloud.circular_rings ? 1 : 0) << '\n';
  }
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3d& p = cloud.points[i];
    out << format_double(p.x()) << ' ' << format_double(p.y()) << ' ' << format_double(p.z());
    if (cloud.has_ring()) out << ' ' << cloud.ring[i];
    if (cloud.has_range()) out << ' ' << format_double(cloud.range[i]);
    if (cloud.has_pixel()) {
      out << ' ' << format_double(cloud.pixel[i].x()) << ' ' << format_double(cloud.pixel[i].y());
    }
    if (cloud.has_azimuth_index()) out << ' ' << cloud.azimuth_index[i];
    out << '\n';
  }
}

PointCloud read_cloud(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("cloud file is empty");
  const auto header = tokens(line);
  if (header.size() < 3 || header[0] != "x" || header[1] != "y" || header[2] != "z") {
    throw DataError("cloud header must start with 'x y z'");
  }
  // Column position of each attribute, -1 when absent.
  int ring = -1, range = -1, u = -1, v = -1, az = -1;
  for (std::size_t i = 3; i < header.size(); ++i) {
    const std::string& h = header[i];
    const int col = static_cast<int>(i);
    if (h == "ring") ring = col;
    else if (h == "range") range = col;
    else if (h == "u") u = col;
    else if (h == "v") v = col;
    else if (h == "azimuth_index") az = col;
    else throw DataError("unknown cloud column '" + h + "'");
  }
  if ((u < 0) != (v < 0)) throw DataError("cloud columns u and v must appear together");

  PointCloud cloud;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = tokens(line);
    if (t.empty()) continue;
    if (line[0] == '#') {
      if (t.size() == 2 && t[0] == "#azimuth_count") cloud.azimuth_count = parse_int(t[1], "cloud");
      if (t.size() == 2 && t[0] == "#circular_rings") cloud.circular_rings = t[1] == "1";
      continue;
    }
    if (t.size() != header.size()) {
      throw DataError("cloud line " + std::to_string(line_no) + " has " + std::to_string(t.size()) +
                      " columns, header declares " + std::to_string(header.size()));
    }
    cloud.points.emplace_back(parse_double(t[0], "cloud"), parse_double(t[1], "cloud"),
                              parse_double(t[2], "cloud"));
    if (ring >= 0) cloud.ring.push_back(parse_int(t[ring], "cloud"));
    if (range >= 0) cloud.range.push_back(parse_double(t[range], "cloud"));
    if (u >= 0) cloud.pixel.emplace_back(parse_double(t[u], "cloud"), parse_double(t[v], "cloud"));
    if (az >= 0) cloud.azimuth_index.push_back(parse_int(t[az], "cloud"));
  }
  return cloud;
}

void save_cloud(const std::string& path, const PointCloud& cloud) {
  auto out = open_out(path);
  write_cloud(out, cloud);
}

PointCloud load_cloud(const std::string& path) {
  auto in = open_in(path);
  try {
    return read_cloud(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

void save_pgm(const std::string& path, const IntensityImage& image, bool ascii) {
  auto out = open_out(path, !ascii);
  out << (ascii ? "P2" : "P5") << '\n' << image.width << ' ' << image.height << "\n255\n";
  if (ascii) {
    for (int v = 0; v < image.height; ++v) {
      for (int u = 0; u < image.width; ++u) {
        out << static_cast<int>(image.at(u, v)) << (u + 1 < image.width ? ' ' : '\n');
      }
    }
  } else {
    out.write(reinterpret_cast<const char*>(image.data.data()),
              static_cast<std::streamsize>(image.data.size()));
  }
}

namespace {

// Next header token of a PNM file, skipping comments.
std::string pnm_token(std::istream& in) {
  std::string tok;
  char c = 0;
  while (in.get(c)) {
    if (c == '#') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(c);
  }
  return tok;
}

}  // namespace

IntensityImage load_pgm(const std::string& path) {
  auto in = open_in(path, true);
  const std::string magic = pnm_token(in);
  if (magic != "P2" && magic != "P5") throw DataError(path + ": not a P2/P5 PGM file");
  const int w = parse_int(pnm_token(in), path);
  const int h = parse_int(pnm_token(in), path);
  const int maxval = parse_int(pnm_token(in), path);
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255) {
    throw DataError(path + ": unsupported PGM size or depth");
  }
  IntensityImage img(w, h);
  if (magic == "P5") {
    in.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.data.size())) {
      throw DataError(path + ": truncated PGM data");
    }
  } else {
    for (auto& px : img.data) {
      const std::string tok = pnm_token(in);
      if (tok.empty()) throw DataError(path + ": truncated PGM data");
      const int val = parse_int(tok, path);
      if (val < 0 || val > maxval) throw DataError(path + ": PGM value out of range");
      px = static_cast<std::uint8_t>(val);
    }
  }
  if (maxval != 255) {
    for (auto& px : img.data) px = static_cast<std::uint8_t>((px * 255 + maxval / 2) / maxval);
  }
  return img;
}

json detections_to_json(const MarkerDetections& d) {
  json markers = json::array();
  for (const auto& m : d.markers) {
    json corners = json::array();
    for (const auto& c : m.corners) corners.push_back({c.x(), c.y()});
    markers.push_back({{"id", m.id}, {"corners", corners}});
  }
  return {{"frame", d.frame}, {"markers", markers}};
}

MarkerDetections detections_from_json(const json& j) {
  MarkerDetections d;
  try {
    d.frame = j.value("frame", 0);
    for (const auto& m : j.at("markers")) {
      MarkerDetection det;
      det.id = m.at("id").get<int>();
      const json& corners = m.at("corners");
      if (!corners.is_array() || corners.size() != 4) throw DataError("marker needs 4 corners");
      for (std::size_t c = 0; c < 4; ++c) {
        det.corners[c] = {corners[c].at(0).get<double>(), corners[c].at(1).get<double>()};
      }
      d.markers.push_back(det);
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed detections: ") + e.what());
  }
  return d;
}

void write_labeled_centers(std::ostream& out, const std::vector<LabeledCenters>& poses) {
  out << "pose,label,x,y,z\n";
  for (const auto& p : poses) {
    for (HoleLabel label : kHoleLabels) {
      const Point3d& c = p.at(label);
      out << p.pose << ',' << to_string(label) << ',' << format_double(c.x()) << ','
          << format_double(c.y()) << ',' << format_double(c.z()) << '\n';
    }
  }
}

std::vector<LabeledCenters> read_labeled_centers(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "pose,label,x,y,z") {
    throw DataError("labeled centers must start with 'pose,label,x,y,z'");
  }
  std::map<int, std::pair<LabeledCenters, int>> by_pose;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 5) throw DataError("labeled centers line needs 5 fields: " + line);
    const int pose = parse_int(f[0], "labeled centers");
    const auto label = parse_hole_label(f[1]);
    if (!label) throw DataError("unknown hole label '" + f[1] + "'");
    auto& [centers, mask] = by_pose[pose];
    centers.pose = pose;
    const int bit = 1 << static_cast<int>(*label);
    if (mask & bit) throw DataError("duplicate label in pose " + f[0]);
    mask |= bit;
    centers.centers[static_cast<int>(*label)] = Point3d(parse_double(f[2], "labeled centers"),
                                 parse_double(f[3], "labeled centers"),
                                 parse_double(f[4], "labeled centers"));
  }
  std::vector<LabeledCenters> out;
  for (const auto& [pose, entry] : by_pose) {
    if (entry.second != 0xf) throw DataError("pose " + std::to_string(pose) + " lacks labels");
    out.push_back(entry.first);
  }
  return out;
}

void write_frame_log(std::ostream& out, const std::vector<FrameLog>& log) {
  out << "pose,frame,status\n";
  for (const auto& e : log) {
    out << e.pose << ',' << e.frame << ','
        << (e.rejection ? std::string(to_string(*e.rejection)) : std::string("ok")) << '\n';
  }
}

void write_result(std::ostream& out, const CalibrationResult& result, const CalibConfig& config) {
  const PoseParamsd theta = result.transform.params();
  const Mat4d m = result.transform.matrix();
  out << "sensor_x " << result.sensor_x << '\n';
  out << "sensor_y " << result.sensor_y << '\n';
  out << "theta";
  for (int i = 0; i < 6; ++i) out << ' ' << format_double(theta(i));
  out << "\nmatrix\n";
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) out << (c ? " " : "") << format_double(m(r, c));
    out << '\n';
  }
  out << "rmse " << format_double(result.rmse) << '\n';
  out << "M " << result.poses << '\n';
  out << "N " << result.frames << '\n';
  out << "per_pose pose tl tr bl br rmse\n";
  for (const auto& p : result.per_pose) {
    out << p.pose;
    for (double r : p.residuals) out << ' ' << format_double(r);
    out << ' ' << format_double(p.rmse) << '\n';
  }
  // The worker count does not affect the result, so it is left out to keep
  // result files identical across thread counts.
  json echoed = config;
  echoed.erase("workers");
  out << "config " << echoed.dump() << '\n';
}

ParsedResult read_result(std::istream& in) {
  ParsedResult r;
  bool have_matrix = false, have_rmse = false, have_m = false, have_n = false;
  std::string line;
  while (std::getline(in, line)) {
    const auto t = tokens(line);
    if (t.empty()) continue;
    if (t[0] == "sensor_x" && t.size() == 2) {
      r.sensor_x = t[1];
    } else if (t[0] == "sensor_y" && t.size() == 2) {
      r.sensor_y = t[1];
    } else if (t[0] == "matrix") {
      Mat4d m;
      for (int row = 0; row < 4; ++row) {
        if (!std::getline(in, line)) throw DataError("result matrix is truncated");
        const auto v = tokens(line);
        if (v.size() != 4) throw DataError("result matrix rows need 4 values");
        for (int c = 0; c < 4; ++c) m(row, c) = parse_double(v[c], "result matrix");
      }
      r.transform = RigidTransformd::from_matrix(m, 1e-6);
      have_matrix = true;
    } else if (t[0] == "rmse" && t.size() == 2) {
      r.rmse = parse_double(t[1], "result");
      have_rmse = true;
    } else if (t[0] == "M" && t.size() == 2) {
      r.poses = parse_int(t[1], "result");
      have_m = true;
    } else if (t[0] == "N" && t.size() == 2) {
      r.frames = parse_int(t[1], "result");
      have_n = true;
    }
  }
  if (!have_matrix || !have_rmse || !have_m || !have_n) {
    throw DataError("result file lacks matrix, rmse, M or N");
  }
  return r;
}

ParsedResult load_result(const std::string& path) {
  auto in = open_in(path);
  try {
    return read_result(in);
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

json load_json(const std::string& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

Scene scene_from_json(const json& j) {
  Scene scene;
  try {
    if (j.contains("target")) from_json(j.at("target"), scene.target);
    if (j.contains("target_poses")) {
      for (const auto& p : j.at("target_poses")) {
        scene.target_poses.push_back(RigidTransformd::from_params(params_from_json(p)));
      }
    } else if (j.contains("target_pose_preset")) {
      const std::string name = j.at("target_pose_preset").get<std::string>();
      const auto poses = target_pose_preset(name);
      if (!poses) throw DataError("unknown target pose preset '" + name + "'");
      for (const auto& p : *poses) scene.target_poses.push_back(RigidTransformd::from_params(p));
    }
    if (j.contains("wall")) {
      const json& w = j.at("wall");
      scene.wall.standoff = w.value("standoff", scene.wall.standoff);
      scene.wall.width = w.value("width", scene.wall.width);
      scene.wall.height = w.value("height", scene.wall.height);
    }
    if (j.contains("noise")) {
      const json& n = j.at("noise");
      scene.noise.k = n.value("K", scene.noise.k);
      scene.noise.sigma0_range = n.value("sigma0_range", scene.noise.sigma0_range);
      scene.noise.sigma0_pixel = n.value("sigma0_pixel", scene.noise.sigma0_pixel);
      scene.noise.sigma0_disparity = n.value("sigma0_disparity", scene.noise.sigma0_disparity);
      scene.noise.sigma0_intensity = n.value("sigma0_intensity", scene.noise.sigma0_intensity);
    }
    scene.seed = j.value("seed", std::uint64_t{0});
    for (const auto& s : j.at("sensors")) {
      const std::string name = s.at("name").get<std::string>();
      std::optional<SensorModel> model;
      if (s.contains("preset")) {
        const std::string preset = s.at("preset").get<std::string>();
        model = sensor_preset(preset, name);
        if (!model) throw DataError("unknown sensor preset '" + preset + "'");
      } else {
        model = SensorModel{};
        model->name = name;
        model->kind = sensor_kind_from_name(s.at("kind").get<std::string>());
      }
      if (s.contains("lidar")) {
        const json& l = s.at("lidar");
        LidarSpec& spec = model->lidar;
        spec.layers = l.value("layers", spec.layers);
        spec.vfov_min_deg = l.value("vfov_min_deg", spec.vfov_min_deg);
        spec.vfov_max_deg = l.value("vfov_max_deg", spec.vfov_max_deg);
        spec.azimuth_resolution_deg = l.value("azimuth_resolution_deg", spec.azimuth_resolution_deg);
        spec.max_range = l.value("max_range", spec.max_range);
      }
      model->baseline = s.value("baseline", model->baseline);
      if (s.contains("intrinsics")) model->camera = s.at("intrinsics").get<CameraIntrinsics>();
      if (s.contains("mount")) {
        const json& m = s.at("mount");
        if (m.is_string()) {
          const auto p = mount_preset(m.get<std::string>());
          if (!p) throw DataError("unknown mount preset '" + m.get<std::string>() + "'");
          model->mount = RigidTransformd::from_params(*p);
        } else {
          model->mount = RigidTransformd::from_params(params_from_json(m));
        }
      }
      scene.sensors.push_back(*model);
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed scene: ") + e.what());
  }
  scene.validate();
  return scene;
}

json scene_to_json(const Scene& scene) {
  json poses = json::array();
  for (const auto& p : scene.target_poses) poses.push_back(params_json(p));
  json sensors = json::array();
  for (const auto& s : scene.sensors) {
    json js = {{"name", s.name}, {"kind", sensor_kind_name(s.kind)}, {"mount", params_json(s.mount)}};
    if (s.kind == SensorKind::Lidar) {
      js["lidar"] = {{"layers", s.lidar.layers},
                     {"vfov_min_deg", s.lidar.vfov_min_deg},
                     {"vfov_max_deg", s.lidar.vfov_max_deg},
                     {"azimuth_resolution_deg", s.lidar.azimuth_resolution_deg},
                     {"max_range", s.lidar.max_range}};
    } else {
      js["intrinsics"] = s.camera;
    }
    if (s.kind == SensorKind::StereoRange) js["baseline"] = s.baseline;
    sensors.push_back(js);
  }
  return {{"target", scene.target},
          {"target_poses", poses},
          {"wall", {{"standoff", scene.wall.standoff},
                    {"width", scene.wall.width},
                    {"height", scene.wall.height}}},
          {"noise", {{"K", scene.noise.k},
                     {"sigma0_range", scene.noise.sigma0_range},
                     {"sigma0_pixel", scene.noise.sigma0_pixel},
                     {"sigma0_disparity", scene.noise.sigma0_disparity},
                     {"sigma0_intensity", scene.noise.sigma0_intensity}}},
          {"sensors", sensors},
          {"seed", scene.seed}};
}

Scene load_scene(const std::string& path) {
  try {
    return scene_from_json(load_json(path));
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

json ground_truth_json(const Scene& scene) {
  json sensors = json::object();
  for (const auto& s : scene.sensors) {
    sensors[s.name] = {{"mount", params_json(s.mount)}, {"matrix", matrix_json(s.mount)}};
  }
  return {{"sensors", sensors}};
}

RigidTransformd relative_truth(const json& truth, const std::string& sensor_x,
                               const std::string& sensor_y) {
  try {
    if (truth.contains("transform")) return matrix_from_json(truth.at("transform"));
    const json& sensors = truth.at("sensors");
    auto mount = [&](const std::string& name) {
      if (!sensors.contains(name)) throw DataError("ground truth lacks sensor '" + name + "'");
      return matrix_from_json(sensors.at(name).at("matrix"));
    };
    return mount(sensor_x).inverse() * mount(sensor_y);
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed ground truth: ") + e.what());
  }
}

namespace {

std::string stem(const std::string& dir, int pose, int index) {
  std::ostringstream ss;
  ss << dir << "/pose_" << std::setw(2) << std::setfill('0') << pose << "/frame_"
     << std::setw(3) << std::setfill('0') << index;
  return ss.str();
}

}  // namespace

void write_dataset(const Scene& scene, int sensor, int frames, const std::string& dir,
                   int workers) {
  if (frames < 1) throw DataError("at least one frame per pose is required");
  const SensorModel& s = scene.sensors.at(static_cast<std::size_t>(sensor));
  const int poses = static_cast<int>(scene.target_poses.size());
  json hints = json::array();
  for (int m = 0; m < poses; ++m) {
    fs::create_directories(fs::path(stem(dir, m, 0)).parent_path());
    hints.push_back(target_passthrough(scene, sensor, m));
  }
  parallel_for(static_cast<std::size_t>(poses * frames), workers, [&](std::size_t k) {
    const int m = static_cast<int>(k) / frames;
    const int n = static_cast<int>(k) % frames;
    const std::string base = stem(dir, m, n);
    switch (s.kind) {
      case SensorKind::Lidar:
        save_cloud(base + ".cloud.txt", simulate_lidar_frame(scene, sensor, m, n));
        break;
      case SensorKind::Monocular: {
        auto out = open_out(base + ".json");
        out << detections_to_json(simulate_marker_detections(scene, sensor, m, n)).dump(1) << '\n';
        break;
      }
      case SensorKind::StereoRange: {
        const StereoFrame f = simulate_range_cloud(scene, sensor, m, n);
        save_cloud(base + ".cloud.txt", f.cloud);
        save_pgm(base + ".pgm", f.image);
        break;
      }
    }
  });
  json manifest = {{"sensor", s.name},
                   {"modality", sensor_kind_name(s.kind)},
                   {"poses", poses},
                   {"frames", frames},
                   {"passthrough", hints}};
  if (s.kind != SensorKind::Lidar) manifest["intrinsics"] = s.camera;
  auto out = open_out(dir + "/manifest.json");
  out << manifest.dump(1) << '\n';
}

DatasetSource::DatasetSource(const std::string& dir) : dir_(dir) {
  const json m = load_json(dir + "/manifest.json");
  try {
    name_ = m.at("sensor").get<std::string>();
    const auto mod = parse_modality(m.at("modality").get<std::string>());
    if (!mod) throw DataError("unknown modality in manifest");
    modality_ = *mod;
    poses_ = m.at("poses").get<int>();
    frames_ = m.at("frames").get<int>();
    if (m.contains("intrinsics")) intrinsics_ = m.at("intrinsics").get<CameraIntrinsics>();
    hints_.assign(static_cast<std::size_t>(std::max(poses_, 0)), std::nullopt);
    if (m.contains("passthrough")) {
      const json& h = m.at("passthrough");
      for (std::size_t i = 0; i < h.size() && i < hints_.size(); ++i) {
        if (!h[i].is_null()) hints_[i] = h[i].get<PassThroughBounds>();
      }
    }
  } catch (const json::exception& e) {
    throw DataError(dir + "/manifest.json: " + e.what());
  }
  if (poses_ < 1 || frames_ < 1) throw DataError(dir + ": manifest declares no frames");
  if (modality_ == Modality::Mono) intrinsics_.validate();
}

int DatasetSource::frame_count(int pose) const {
  if (pose < 0 || pose >= poses_) throw DataError("pose index out of range");
  return frames_;
}

std::string DatasetSource::frame_stem(int pose, int index) const {
  if (pose < 0 || pose >= poses_ || index < 0 || index >= frames_) {
    throw DataError("frame index out of range");
  }
  return stem(dir_, pose, index);
}

SensorFrame DatasetSource::frame(int pose, int index) const {
  const std::string base = frame_stem(pose, index);
  switch (modality_) {
    case Modality::Lidar:
      return load_cloud(base + ".cloud.txt");
    case Modality::Mono:
      return detections_from_json(load_json(base + ".json"));
    case Modality::StereoRange:
      return StereoFrame{load_cloud(base + ".cloud.txt"), load_pgm(base + ".pgm")};
  }
  throw DataError("unknown modality");
}

std::optional<PassThroughBounds> DatasetSource::passthrough_hint(int pose) const {
  if (pose < 0 || pose >= poses_) return std::nullopt;
  return hints_[static_cast<std::size_t>(pose)];
}

}  // namespace holecalib
