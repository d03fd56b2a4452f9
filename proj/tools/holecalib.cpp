#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "holecalib/calibration.hpp"
#include "holecalib/io.hpp"
#include "holecalib/presets.hpp"
#include "holecalib/report.hpp"

namespace fs = std::filesystem;
using namespace holecalib;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kDataError = 2, kRejected = 3 };

// Flags shared by the pipeline commands; unset flags leave the config alone.
struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> frames;
  std::optional<int> poses;
  std::optional<int> workers;

  void add(CLI::App* app) {
    app->add_option("--config", config, "JSON config (defaults for absent keys)");
    app->add_option("--seed", seed, "RANSAC seed");
    app->add_option("-n,--frames", frames, "frames per pose (N)");
    app->add_option("-m,--poses", poses, "target poses (M); 0 uses all");
    app->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  }

  CalibConfig load() const {
    CalibConfig c = config.empty() ? CalibConfig{} : load_config(config);
    if (seed) c.seed = *seed;
    if (frames) c.frames = *frames;
    if (poses) c.poses = *poses;
    if (workers) c.workers = *workers;
    c.validate();
    return c;
  }
};

std::ofstream open_out(const std::string& path) {
  if (const auto parent = fs::path(path).parent_path(); !parent.empty()) {
    fs::create_directories(parent);
  }
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

std::vector<int> parse_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stoi(item));
    } catch (const std::exception&) {
      throw DataError("malformed list '" + text + "'");
    }
  }
  if (out.empty()) throw DataError("empty list");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Target-based extrinsic calibration of LiDAR and camera pairs"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "render a dataset per sensor from a scene file");
  std::string sim_scene, sim_out;
  int sim_frames = 30;
  std::optional<std::uint64_t> sim_seed;
  std::optional<double> sim_k;
  int sim_workers = 1;
  sim->add_option("scene", sim_scene, "scene JSON")->required();
  sim->add_option("--out", sim_out, "output directory")->required();
  sim->add_option("-n,--frames", sim_frames, "frames per pose");
  sim->add_option("--seed", sim_seed, "noise seed (overrides the scene)");
  sim->add_option("--noise", sim_k, "noise factor K (overrides the scene)");
  sim->add_option("--workers", sim_workers, "worker threads")->check(CLI::PositiveNumber);

  // extract
  auto* ext = app.add_subcommand("extract", "reference points of one sensor");
  std::string ext_dataset, ext_modality, ext_out;
  CommonFlags ext_flags;
  ext->add_option("dataset", ext_dataset, "dataset directory")->required();
  ext->add_option("--modality", ext_modality, "expected modality")
      ->check(CLI::IsMember({"lidar", "mono", "stereo-range"}));
  ext->add_option("--out", ext_out, "labeled-centers CSV")->required();
  ext_flags.add(ext);

  // calibrate
  auto* cal = app.add_subcommand("calibrate", "extrinsics between two sensors");
  std::string cal_x, cal_y, cal_out;
  bool cal_inverse = false;
  CommonFlags cal_flags;
  cal->add_option("dataset_x", cal_x, "dataset of the reference sensor X")->required();
  cal->add_option("dataset_y", cal_y, "dataset of sensor Y")->required();
  cal->add_option("--out", cal_out, "result file")->required();
  cal->add_flag("--inverse", cal_inverse, "report T_YX instead of T_XY");
  cal_flags.add(cal);

  // evaluate
  auto* eva = app.add_subcommand("evaluate", "errors against ground truth, or an M/N sweep");
  std::string eva_result, eva_truth, eva_csv, eva_svg, eva_scene, eva_sweep, eva_values;
  std::string eva_setup, eva_pose_cfg = "-";
  double eva_k = 0.0;
  int eva_seeds = 1;
  std::string eva_x, eva_y;
  CommonFlags eva_flags;
  eva->add_option("--result", eva_result, "result file");
  eva->add_option("--truth", eva_truth, "ground-truth JSON");
  eva->add_option("--csv", eva_csv, "append metrics rows here");
  eva->add_option("--svg", eva_svg, "sweep plot");
  eva->add_option("--scene", eva_scene, "scene JSON for a sweep");
  eva->add_option("--sweep", eva_sweep, "swept parameter")->check(CLI::IsMember({"M", "N"}));
  eva->add_option("--values", eva_values, "comma-separated sweep values");
  eva->add_option("--seeds", eva_seeds, "seeds per sweep value")->check(CLI::PositiveNumber);
  eva->add_option("--x", eva_x, "sensor X name (sweep)");
  eva->add_option("--y", eva_y, "sensor Y name (sweep)");
  eva->add_option("--setup", eva_setup, "setup label for the CSV row");
  eva->add_option("--pose-cfg", eva_pose_cfg, "pose label for the CSV row");
  eva->add_option("--noise", eva_k, "noise factor K for the CSV row");
  eva_flags.add(eva);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*sim) {
      if (sim_frames < 1) throw DataError("--frames must be at least 1");
      Scene scene = load_scene(sim_scene);
      if (sim_seed) scene.seed = *sim_seed;
      if (sim_k) scene.noise.k = *sim_k;
      scene.validate();
      fs::create_directories(sim_out);
      for (std::size_t s = 0; s < scene.sensors.size(); ++s) {
        const std::string dir = sim_out + "/" + scene.sensors[s].name;
        write_dataset(scene, static_cast<int>(s), sim_frames, dir, sim_workers);
        std::cout << "wrote " << dir << '\n';
      }
      open_out(sim_out + "/ground_truth.json") << ground_truth_json(scene).dump(1) << '\n';
      open_out(sim_out + "/scene.json") << scene_to_json(scene).dump(1) << '\n';
      return kOk;
    }

    if (*ext) {
      const CalibConfig config = ext_flags.load();
      const DatasetSource source(ext_dataset);
      if (!ext_modality.empty() && parse_modality(ext_modality) != source.modality()) {
        throw DataError(ext_dataset + " holds " + std::string(to_string(source.modality())) +
                        " data, not " + ext_modality);
      }
      SensorCenters centers;
      centers.sensor = source.name();
      const int m = config.poses > 0 ? config.poses : source.pose_count();
      if (m > source.pose_count()) throw DataError("dataset has fewer poses than requested");
      try {
        for (int pose = 0; pose < m; ++pose) {
          centers.poses.push_back(extract_pose(source, pose, config, &centers.log));
        }
      } catch (const PoseRejected&) {
        write_frame_log(std::cout, centers.log);
        throw;
      }
      write_frame_log(std::cout, centers.log);
      auto out = open_out(ext_out);
      write_labeled_centers(out, centers.poses);
      return kOk;
    }

    if (*cal) {
      const CalibConfig config = cal_flags.load();
      const DatasetSource x(cal_x);
      const DatasetSource y(cal_y);
      CalibrationResult result = calibrate(x, y, config);
      if (cal_inverse) {
        result.transform = result.transform.inverse();
        std::swap(result.sensor_x, result.sensor_y);
      }
      auto out = open_out(cal_out);
      write_result(out, result, config);
      std::cout << "rmse " << format_double(result.rmse) << '\n';
      return kOk;
    }

    if (*eva) {
      std::vector<MetricsRow> rows;
      if (!eva_scene.empty()) {
        if (eva_sweep.empty() || eva_values.empty()) {
          throw DataError("a sweep needs --sweep and --values");
        }
        CalibConfig config = eva_flags.load();
        const auto base = std::make_shared<Scene>(load_scene(eva_scene));
        const int ix = eva_x.empty() ? 0 : base->sensor_index(eva_x);
        const int iy = eva_y.empty() ? 1 : base->sensor_index(eva_y);
        if (iy >= static_cast<int>(base->sensors.size())) throw DataError("scene needs two sensors");
        const RigidTransformd truth = ground_truth(*base, ix, iy);
        for (int value : parse_list(eva_values)) {
          for (int s = 0; s < eva_seeds; ++s) {
            auto scene = std::make_shared<Scene>(*base);
            scene->seed = base->seed + static_cast<std::uint64_t>(s);
            CalibConfig c = config;
            c.seed = config.seed + static_cast<std::uint64_t>(s);
            (eva_sweep == "M" ? c.poses : c.frames) = value;
            const SimulatedSource sx(scene, ix, c.frames);
            const SimulatedSource sy(scene, iy, c.frames);
            const CalibrationResult r = calibrate(sx, sy, c);
            MetricsRow row;
            row.setup = eva_setup.empty() ? r.sensor_x + "/" + r.sensor_y : eva_setup;
            row.pose_cfg = eva_pose_cfg;
            row.k = scene->noise.k;
            row.m = r.poses;
            row.n = r.frames;
            row.metrics = evaluate_transform(r.transform, truth);
            row.rmse = r.rmse;
            row.seed = scene->seed;
            rows.push_back(row);
            std::cout << format_metrics_row(row) << '\n';
          }
        }
        if (!eva_svg.empty()) {
          auto out = open_out(eva_svg);
          write_sweep_svg(out, eva_sweep, rows);
        }
      } else {
        if (eva_result.empty() || eva_truth.empty()) {
          throw DataError("evaluate needs --result and --truth, or --scene with a sweep");
        }
        const ParsedResult r = load_result(eva_result);
        const RigidTransformd truth = relative_truth(load_json(eva_truth), r.sensor_x, r.sensor_y);
        MetricsRow row;
        row.setup = eva_setup.empty() ? r.sensor_x + "/" + r.sensor_y : eva_setup;
        row.pose_cfg = eva_pose_cfg;
        row.k = eva_k;
        row.m = r.poses;
        row.n = r.frames;
        row.metrics = evaluate_transform(r.transform, truth);
        row.rmse = r.rmse;
        row.seed = eva_flags.seed.value_or(0);
        rows.push_back(row);
        std::cout << "e_t " << format_double(row.metrics.e_t) << '\n'
                  << "e_r " << format_double(row.metrics.e_r) << '\n';
      }
      if (!eva_csv.empty()) append_metrics_csv(eva_csv, rows);
      return kOk;
    }
  } catch (const PoseRejected& e) {
    std::cerr << "rejected: " << e.what() << '\n';
    return kRejected;
  } catch (const FrameRejected& e) {
    std::cerr << "rejected: " << e.what() << '\n';
    return kRejected;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDataError;
  }
  return kUsage;
}
