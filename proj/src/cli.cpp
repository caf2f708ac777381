#include "sarcam/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sarcam/bundle.hpp"
#include "sarcam/cam.hpp"
#include "sarcam/error.hpp"
#include "sarcam/grid_ops.hpp"
#include "sarcam/localizer.hpp"
#include "sarcam/npy.hpp"
#include "sarcam/render.hpp"

namespace sarcam::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Failure : public std::runtime_error {
 public:
  Failure(int code, const std::string& message) : std::runtime_error(message), code_(code) {}
  int code() const noexcept { return code_; }

 private:
  int code_;
};

int exit_code_for(const Error& e, int fallback) {
  switch (e.kind()) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::BadIntermediateSize:
    case ErrorKind::BadFraction:
      return kExitBadArguments;
    default:
      return fallback;
  }
}

// Runs `fn`, translating library errors into a Failure with `code`.
template <typename Fn>
auto guarded(int code, Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Failure(exit_code_for(e, code), e.what());
  }
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

std::string format_fraction(double f) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), f);
  return ec == std::errc() ? std::string(buf, end) : std::to_string(f);
}

double parse_decimal(std::string_view text, const std::string& what) {
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value, std::chars_format::fixed);
  if (ec != std::errc() || ptr != last || text.empty()) {
    throw Failure(kExitBadArguments, what + ": '" + std::string(text) + "' is not a decimal number");
  }
  return value;
}

int parse_int(std::string_view text, const std::string& what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw Failure(kExitBadArguments, what + ": '" + std::string(text) + "' is not an integer");
  }
  return value;
}

std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    parts.push_back(item);
  }
  return parts;
}

std::vector<double> parse_fractions(const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split_commas(text)) {
    const double f = parse_decimal(part, "--fractions");
    if (!(f > 0.0 && f <= 1.0)) throw Failure(kExitBadArguments, "--fractions: " + part + " outside (0, 1]");
    out.push_back(f);
  }
  if (out.empty()) throw Failure(kExitBadArguments, "--fractions: empty list");
  return out;
}

json bbox_json(const BBox& b) {
  return {{"row_min", b.row_min}, {"col_min", b.col_min}, {"row_max", b.row_max}, {"col_max", b.col_max}};
}

BBox parse_ground_truth(const std::string& arg) {
  json j;
  try {
    if (!arg.empty() && arg.front() == '{') {
      j = json::parse(arg);
    } else {
      std::ifstream in(arg);
      if (!in) throw Failure(kExitBadArguments, "--gt: cannot open " + arg);
      j = json::parse(in);
    }
    BBox b{j.at("row_min").get<int>(), j.at("col_min").get<int>(), j.at("row_max").get<int>(),
           j.at("col_max").get<int>()};
    if (b.row_min < 0 || b.col_min < 0 || b.row_max < b.row_min || b.col_max < b.col_min) {
      throw Failure(kExitBadArguments, "--gt: box corners are not ordered");
    }
    return b;
  } catch (const json::exception& e) {
    throw Failure(kExitBadArguments, std::string("--gt: ") + e.what());
  }
}

// Image scaled for display: values above 1 are brought down by the maximum.
Grid display_image(const Grid& image) {
  const float peak = image.empty() ? 0.0f : *std::max_element(image.values().begin(), image.values().end());
  if (peak <= 1.0f) return image;
  Grid out = image;
  for (auto& v : out.values()) v /= peak;
  return out;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Failure(kExitComputeFailure, "cannot write " + path.string());
  out << j.dump(2) << "\n";
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Failure(kExitComputeFailure, "cannot create output directory " + dir.string());
}

unsigned thread_cap() {
  unsigned cap = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("SARCAM_THREADS")) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(env, env + std::char_traits<char>::length(env), v);
    if (ec == std::errc() && v >= 1) cap = static_cast<unsigned>(v);
  }
  return cap;
}

struct CamOptions {
  std::string bundle;
  std::string method;
  std::string m_size = "auto";
  std::string channel_strategy;
  std::string channels;
  std::string out;
  double alpha = 0.5;
};

struct Job {
  fs::path bundle_dir;
  fs::path out_dir;
  std::string name;
};

struct JobResult {
  int code = kExitOk;
  std::string message;
  std::vector<std::string> outputs;
  std::string log;
};

std::string bundle_name(const fs::path& dir) {
  auto name = dir.filename().string();
  if (name.empty()) name = dir.parent_path().filename().string();
  return name;
}

// A bundle directory yields one job writing into `out`; a directory of
// bundle directories yields one job per bundle writing into out/<name>.
std::vector<Job> expand_jobs(const fs::path& bundle, const fs::path& out) {
  if (!is_bundle_dir(bundle) && fs::is_directory(bundle)) {
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(bundle)) {
      if (entry.is_directory() && is_bundle_dir(entry.path())) dirs.push_back(entry.path());
    }
    std::sort(dirs.begin(), dirs.end());
    if (!dirs.empty()) {
      std::vector<Job> jobs;
      for (const auto& d : dirs) jobs.push_back({d, out / bundle_name(d), bundle_name(d)});
      return jobs;
    }
  }
  return {{bundle, out, bundle_name(bundle)}};
}

std::vector<JobResult> run_jobs(const std::vector<Job>& jobs, const std::function<void(const Job&, JobResult&)>& fn) {
  std::vector<JobResult> results(jobs.size());
  auto run_one = [&](std::size_t i) {
    try {
      fn(jobs[i], results[i]);
    } catch (const Failure& f) {
      results[i].code = f.code();
      results[i].message = f.what();
    } catch (const Error& e) {
      results[i].code = kExitComputeFailure;
      results[i].message = e.what();
    } catch (const std::exception& e) {
      results[i].code = kExitComputeFailure;
      results[i].message = e.what();
    }
  };
  const unsigned workers = std::min<unsigned>(thread_cap(), static_cast<unsigned>(jobs.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) run_one(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < jobs.size(); i = next++) run_one(i);
    });
  }
  return results;
}

CamConfig make_config(const CamOptions& o) {
  CamConfig config;
  config.method = guarded(kExitBadArguments, [&] { return parse_method(o.method); });
  if (o.m_size != "auto") config.intermediate_side = parse_int(o.m_size, "--m-size");
  if (!o.channel_strategy.empty()) {
    config.channel_strategy = guarded(kExitBadArguments, [&] { return parse_channel_strategy(o.channel_strategy); });
  }
  if (!o.channels.empty()) {
    std::vector<int> subset;
    for (const auto& part : split_commas(o.channels)) subset.push_back(parse_int(part, "--channels"));
    config.channel_subset = subset;
  }
  if (!(o.alpha >= 0.0 && o.alpha <= 1.0)) throw Failure(kExitBadArguments, "--alpha must lie in [0, 1]");
  return config;
}

json config_json(const CamOptions& o) {
  return {{"method", o.method},       {"m_size", o.m_size}, {"channel_strategy", o.channel_strategy},
          {"channels", o.channels},   {"alpha", o.alpha}};
}

struct ComputedMap {
  FeatureBundle bundle;
  SaliencyMap map;
  int m = 0;
};

ComputedMap compute_for(const Job& job, const CamConfig& config) {
  ComputedMap c;
  c.bundle = guarded(kExitBadInput, [&] { return load_bundle(job.bundle_dir); });
  c.m = guarded(kExitComputeFailure, [&] { return effective_intermediate_side(c.bundle, config); });
  c.map = guarded(kExitComputeFailure, [&] { return compute_cam(c.bundle, config); });
  return c;
}

std::string stem_for(const Job& job, const CamConfig& config, int m) {
  return job.name + "_" + std::string(to_string(config.method)) + "_M" + std::to_string(m);
}

bool identically_zero(const Grid& map) {
  return std::all_of(map.values().begin(), map.values().end(), [](float v) { return v == 0.0f; });
}

json report_json(const LocalizationReport& r) {
  json j = {
      {"threshold_fraction", r.threshold_fraction},
      {"mask_area", r.mask.count()},
      {"component_count", r.component_count},
      {"largest_component_area", r.largest_component_area},
      {"bbox", r.bbox ? bbox_json(*r.bbox) : json(nullptr)},
      {"iou", r.iou ? json(*r.iou) : json(nullptr)},
  };
  if (r.iou) j["iou_note"] = "IoU against supplied ground truth; a proxy for localization quality";
  return j;
}

void write_manifest(const fs::path& path, const std::string& command, json config, const std::vector<std::string>& inputs,
                    const std::vector<JobResult>& results, std::chrono::steady_clock::time_point start) {
  json outputs = json::array();
  for (const auto& r : results) {
    for (const auto& o : r.outputs) outputs.push_back(o);
  }
  json manifest = {
      {"command", command},
      {"tool_version", kToolVersion},
      {"config", std::move(config)},
      {"inputs", inputs},
      {"outputs", outputs},
      {"wall_time_ms",
       std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count()},
  };
  write_json(path, manifest);
}

int finish(const std::vector<JobResult>& results, std::ostream& out, std::ostream& err) {
  int code = kExitOk;
  for (const auto& r : results) {
    out << r.log;
    if (r.code != kExitOk) {
      err << "ERROR:" << r.code << ": " << one_line(r.message) << "\n";
      if (code == kExitOk) code = r.code;
    }
  }
  return code;
}

void add_cam_options(CLI::App* sub, CamOptions& o) {
  sub->add_option("--bundle", o.bundle, "Bundle directory, or a directory of bundle directories")->required();
  sub->add_option("--method", o.method, "ms-cam | grad-cam | grad-cam-pp | layer-cam | self-matching-cam")->required();
  sub->add_option("--m-size", o.m_size, "Intermediate matching side M, or 'auto'");
  sub->add_option("--channel-strategy", o.channel_strategy, "gradcam | gradcampp | uniform");
  sub->add_option("--channels", o.channels, "Comma-separated channel subset");
  sub->add_option("--alpha", o.alpha, "Overlay opacity of the heatmap");
  sub->add_option("--out", o.out, "Output directory")->required();
}

int cmd_cam(const CamOptions& o, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const CamConfig config = make_config(o);
  ensure_dir(o.out);
  const auto jobs = expand_jobs(o.bundle, o.out);
  auto results = run_jobs(jobs, [&](const Job& job, JobResult& res) {
    const ComputedMap c = compute_for(job, config);
    ensure_dir(job.out_dir);
    const std::string stem = stem_for(job, config, c.m);
    const RgbImage heat = colorize(c.map);
    const auto saliency_path = job.out_dir / "saliency.npy";
    const auto heat_path = job.out_dir / (stem + "_heat.png");
    const auto overlay_path = job.out_dir / (stem + ".png");
    guarded(kExitComputeFailure, [&] {
      npy::write(saliency_path, {c.map.height(), c.map.width()}, c.map.data());
      write_png(heat_path, heat);
      write_png(overlay_path, overlay(display_image(c.bundle.image), heat, o.alpha));
      return 0;
    });
    res.outputs = {saliency_path.string(), heat_path.string(), overlay_path.string()};
    res.log = job.name + ": wrote " + saliency_path.string() + "\n";
  });
  write_manifest(fs::path(o.out) / "run_manifest.json", "cam", config_json(o), {o.bundle}, results, start);
  return finish(results, out, err);
}

struct LocalizeOptions {
  CamOptions cam;
  double threshold = kDefaultThreshold;
  std::string gt;
};

int cmd_localize(const LocalizeOptions& o, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const CamConfig config = make_config(o.cam);
  if (!(o.threshold > 0.0 && o.threshold <= 1.0)) {
    throw Failure(kExitBadArguments, "--threshold " + format_fraction(o.threshold) + " outside (0, 1]");
  }
  std::optional<BBox> gt;
  if (!o.gt.empty()) gt = parse_ground_truth(o.gt);
  ensure_dir(o.cam.out);
  const auto jobs = expand_jobs(o.cam.bundle, o.cam.out);
  auto results = run_jobs(jobs, [&](const Job& job, JobResult& res) {
    const ComputedMap c = compute_for(job, config);
    if (identically_zero(c.map)) {
      throw Failure(kExitNoLocalization, job.name + ": saliency map is identically zero; no localization possible");
    }
    if (gt && !gt->valid_within(c.map.height(), c.map.width())) {
      throw Failure(kExitBadArguments, "--gt: box lies outside the " + c.map.shape_string() + " image");
    }
    const LocalizationReport report = localize(c.map, o.threshold, gt);
    ensure_dir(job.out_dir);

    json j = report_json(report);
    j["bundle"] = job.name;
    j["method"] = to_string(config.method);
    j["intermediate_side"] = c.m;
    if (gt) j["ground_truth"] = bbox_json(*gt);
    const auto report_path = job.out_dir / "localization.json";
    write_json(report_path, j);

    RgbImage annotated = overlay(display_image(c.bundle.image), colorize(c.map), o.cam.alpha);
    if (report.bbox) annotated = draw_bbox(std::move(annotated), *report.bbox);
    const auto png_path = job.out_dir / (stem_for(job, config, c.m) + "_t" + format_fraction(o.threshold) + ".png");
    guarded(kExitComputeFailure, [&] { write_png(png_path, annotated); return 0; });

    res.outputs = {report_path.string(), png_path.string()};
    std::ostringstream log;
    log << job.name << ": t=" << format_fraction(o.threshold);
    if (report.bbox) {
      log << " bbox=(" << report.bbox->row_min << "," << report.bbox->col_min << "," << report.bbox->row_max << ","
          << report.bbox->col_max << ")";
    }
    if (report.iou) log << " iou=" << *report.iou;
    log << "\n";
    res.log = log.str();
  });
  json cfg = config_json(o.cam);
  cfg["threshold"] = o.threshold;
  cfg["gt"] = o.gt;
  write_manifest(fs::path(o.cam.out) / "run_manifest.json", "localize", cfg, {o.cam.bundle}, results, start);
  return finish(results, out, err);
}

struct SweepOptions {
  CamOptions cam;
  std::string fractions = "0.30,0.45,0.60";
  std::string gt;
};

int cmd_sweep(const SweepOptions& o, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  const CamConfig config = make_config(o.cam);
  const std::vector<double> fractions = parse_fractions(o.fractions);
  std::optional<BBox> gt;
  if (!o.gt.empty()) gt = parse_ground_truth(o.gt);
  ensure_dir(o.cam.out);
  const auto jobs = expand_jobs(o.cam.bundle, o.cam.out);
  auto results = run_jobs(jobs, [&](const Job& job, JobResult& res) {
    const ComputedMap c = compute_for(job, config);
    if (identically_zero(c.map)) {
      throw Failure(kExitNoLocalization, job.name + ": saliency map is identically zero; no localization possible");
    }
    if (gt && !gt->valid_within(c.map.height(), c.map.width())) {
      throw Failure(kExitBadArguments, "--gt: box lies outside the " + c.map.shape_string() + " image");
    }
    const SweepResult swept = sweep(c.map, fractions, gt);
    ensure_dir(job.out_dir);

    const RgbImage base = overlay(display_image(c.bundle.image), colorize(c.map), o.cam.alpha);
    const auto lines_path = job.out_dir / "sweep.jsonl";
    std::ofstream lines(lines_path, std::ios::trunc);
    if (!lines) throw Failure(kExitComputeFailure, "cannot write " + lines_path.string());
    res.outputs.push_back(lines_path.string());
    std::ostringstream log;
    for (std::size_t i = 0; i < swept.reports.size(); ++i) {
      const auto& report = swept.reports[i];
      json j = report_json(report);
      j["bundle"] = job.name;
      j["method"] = to_string(config.method);
      j["intermediate_side"] = c.m;
      if (swept.best) j["best"] = (*swept.best == i);
      lines << j.dump() << "\n";

      RgbImage annotated = base;
      if (report.bbox) annotated = draw_bbox(std::move(annotated), *report.bbox);
      const auto png_path =
          job.out_dir / (stem_for(job, config, c.m) + "_t" + format_fraction(report.threshold_fraction) + ".png");
      guarded(kExitComputeFailure, [&] { write_png(png_path, annotated); return 0; });
      res.outputs.push_back(png_path.string());
      log << job.name << ": t=" << format_fraction(report.threshold_fraction)
          << (swept.best && *swept.best == i ? " (best)" : "") << "\n";
    }
    if (!lines) throw Failure(kExitComputeFailure, "write failed for " + lines_path.string());
    res.log = log.str();
  });
  json cfg = config_json(o.cam);
  cfg["fractions"] = fractions;
  cfg["gt"] = o.gt;
  write_manifest(fs::path(o.cam.out) / "run_manifest.json", "sweep", cfg, {o.cam.bundle}, results, start);
  return finish(results, out, err);
}

int cmd_validate(const std::string& bundle, std::ostream& out, std::ostream& err) {
  const auto jobs = expand_jobs(bundle, {});
  std::vector<JobResult> results(jobs.size());
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    try {
      const FeatureBundle b = guarded(kExitBadInput, [&] { return load_bundle(jobs[i].bundle_dir); });
      std::ostringstream log;
      log << jobs[i].bundle_dir.string() << ": OK\n"
          << "  model=" << b.model_name << " layer=" << b.layer_name << " class_id=" << b.class_id << "\n"
          << "  image " << b.image.shape_string() << " float32\n"
          << "  features " << b.features.shape_string() << " <f4\n"
          << "  grads " << b.grads.shape_string() << " <f4\n";
      results[i].log = log.str();
    } catch (const Failure& f) {
      results[i].code = f.code();
      results[i].message = f.what();
    }
  }
  return finish(results, out, err);
}

struct RenderOptions {
  std::vector<std::string> maps;
  std::vector<std::string> images;
  std::vector<std::string> labels;
  int columns = 0;
  double alpha = 0.5;
  std::string out;
};

int cmd_render(const RenderOptions& o, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  if (!o.images.empty() && o.images.size() != o.maps.size()) {
    throw Failure(kExitBadArguments, "--maps has " + std::to_string(o.maps.size()) + " entries but --images has " +
                                         std::to_string(o.images.size()));
  }
  if (!o.labels.empty() && o.labels.size() != o.maps.size()) {
    throw Failure(kExitBadArguments, "--labels has " + std::to_string(o.labels.size()) + " entries but --maps has " +
                                         std::to_string(o.maps.size()));
  }
  if (o.columns < 0) throw Failure(kExitBadArguments, "--columns must be >= 1");
  if (!(o.alpha >= 0.0 && o.alpha <= 1.0)) throw Failure(kExitBadArguments, "--alpha must lie in [0, 1]");

  std::vector<RgbImage> tiles;
  for (std::size_t i = 0; i < o.maps.size(); ++i) {
    const Grid map = guarded(kExitBadInput, [&] {
      npy::Array a = npy::read(o.maps[i], o.maps[i]);
      if (a.shape.size() != 2) throw Error(ErrorKind::ShapeMismatch, o.maps[i] + ": expected a 2-D map");
      return Grid(a.shape[0], a.shape[1], std::move(a.data));
    });
    const RgbImage heat = colorize(map);
    if (o.images.empty()) {
      tiles.push_back(heat);
      continue;
    }
    const Grid image = guarded(kExitBadInput, [&] { return load_image(o.images[i]); });
    if (image.height() != map.height() || image.width() != map.width()) {
      throw Failure(kExitBadInput, o.maps[i] + " shape " + map.shape_string() + " vs " + o.images[i] + " shape " +
                                       image.shape_string());
    }
    tiles.push_back(overlay(display_image(image), heat, o.alpha));
  }
  if (std::any_of(tiles.begin(), tiles.end(), [&](const RgbImage& t) {
        return t.height != tiles.front().height || t.width != tiles.front().width;
      })) {
    throw Failure(kExitBadInput, "all maps must share one size for a panel");
  }
  const int columns = o.columns == 0 ? static_cast<int>(tiles.size()) : o.columns;
  const RgbImage sheet = guarded(kExitComputeFailure, [&] { return panel(tiles, o.labels, columns); });

  const fs::path out_path(o.out);
  if (out_path.has_parent_path()) ensure_dir(out_path.parent_path());
  guarded(kExitComputeFailure, [&] { write_png(out_path, sheet); return 0; });

  JobResult res;
  res.outputs = {out_path.string()};
  res.log = "wrote " + out_path.string() + "\n";
  std::vector<std::string> inputs = o.maps;
  inputs.insert(inputs.end(), o.images.begin(), o.images.end());
  json cfg = {{"columns", columns}, {"alpha", o.alpha}, {"labels", o.labels}};
  fs::path manifest_path = out_path;
  manifest_path.replace_extension(".run_manifest.json");
  write_manifest(manifest_path, "render", cfg, inputs, {res}, start);
  return finish({res}, out, err);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Saliency maps and weakly-supervised localization from exported CNN activations", "sarcam"};
  app.set_version_flag("--version", kToolVersion);
  app.set_config("--config", "", "TOML-style key=value file with one [section] per command; flags win");
  app.require_subcommand(1);

  CamOptions cam_opts;
  auto* cam = app.add_subcommand("cam", "Compute a saliency map, heatmap and overlay");
  add_cam_options(cam, cam_opts);

  LocalizeOptions loc_opts;
  auto* loc = app.add_subcommand("localize", "Box the largest thresholded saliency segment");
  add_cam_options(loc, loc_opts.cam);
  loc->add_option("--threshold", loc_opts.threshold, "Fraction of the map maximum");
  loc->add_option("--gt", loc_opts.gt, "Ground-truth box: JSON file or inline JSON object");

  SweepOptions sweep_opts;
  auto* swp = app.add_subcommand("sweep", "Localize at several threshold fractions");
  add_cam_options(swp, sweep_opts.cam);
  swp->add_option("--fractions", sweep_opts.fractions, "Comma-separated fractions");
  swp->add_option("--gt", sweep_opts.gt, "Ground-truth box: JSON file or inline JSON object");

  std::string validate_bundle_dir;
  auto* val = app.add_subcommand("validate", "Check a bundle against the on-disk contract");
  val->add_option("--bundle", validate_bundle_dir, "Bundle directory")->required();

  RenderOptions render_opts;
  auto* ren = app.add_subcommand("render", "Compose saliency maps into a comparison sheet");
  ren->add_option("--maps", render_opts.maps, "saliency.npy files")->required();
  ren->add_option("--images", render_opts.images, "Images matching each map (PNG or NPY)");
  ren->add_option("--labels", render_opts.labels, "Tile labels");
  ren->add_option("--columns", render_opts.columns, "Tiles per row (default: all in one row)");
  ren->add_option("--alpha", render_opts.alpha, "Overlay opacity of the heatmap");
  ren->add_option("--out", render_opts.out, "Output PNG")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "ERROR:" << kExitBadArguments << ": " << one_line(e.what()) << "\n";
    return kExitBadArguments;
  }

  try {
    if (cam->parsed()) return cmd_cam(cam_opts, out, err);
    if (loc->parsed()) return cmd_localize(loc_opts, out, err);
    if (swp->parsed()) return cmd_sweep(sweep_opts, out, err);
    if (val->parsed()) return cmd_validate(validate_bundle_dir, out, err);
    if (ren->parsed()) return cmd_render(render_opts, out, err);
  } catch (const Failure& f) {
    err << "ERROR:" << f.code() << ": " << one_line(f.what()) << "\n";
    return f.code();
  } catch (const std::exception& e) {
    err << "ERROR:" << kExitComputeFailure << ": " << one_line(e.what()) << "\n";
    return kExitComputeFailure;
  }
  return kExitBadArguments;
}

int run(int argc, const char* const argv[], std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace sarcam::cli
