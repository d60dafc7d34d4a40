// nvs: command-line front end for reprojection, dataset generation, hole filling and evaluation.

#include <fmt/format.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "nvs/dataset.hpp"
#include "nvs/error.hpp"
#include "nvs/image_io.hpp"
#include "nvs/inpaint.hpp"
#include "nvs/metrics.hpp"
#include "nvs/renderer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

// Raised for argument problems CLI11 cannot detect on its own.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw nvs::IoError(fmt::format("cannot read '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nvs::Pose parse_pose(const std::string& text) {
  std::istringstream in(text);
  std::vector<double> v;
  std::string token;
  while (in >> token) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw UsageError(fmt::format("pose value '{}' is not a number", token));
    }
  }
  if (v.size() != 12) {
    throw UsageError(fmt::format("pose needs 12 numbers (3x4 row-major), got {}", v.size()));
  }
  try {
    const nvs::Pose loose = nvs::Pose::from_row_major(std::span<const double, 12>(v.data(), 12), 1e-3);
    return nvs::Pose::orthonormalized(loose.rotation(), loose.translation());
  } catch (const nvs::CalibrationError& e) {
    throw UsageError(e.what());
  }
}

nvs::DepthEncoding parse_encoding(const std::string& name) {
  return name == "sun3d" ? nvs::DepthEncoding::kSun3d : nvs::DepthEncoding::kMillimeters;
}

json finite_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return nullptr;
  return v;
}

// ---------------------------------------------------------------------------------------------
// reproject

struct ReprojectArgs {
  std::string color;
  std::string depth;
  std::string intrinsics;
  std::string pose;
  std::string pose_file;
  std::string out = ".";
  std::string ply;
  std::string encoding = "mm";
  int splat_radius = 1;
  unsigned threads = 0;
};

int run_reproject(const ReprojectArgs& a) {
  // The flag is the novel camera's camera-to-world pose with the source camera as world frame.
  const nvs::Pose novel = a.pose_file.empty() ? parse_pose(a.pose) : parse_pose(slurp(a.pose_file));
  const nvs::Pose t_rel = nvs::invert(novel);
  nvs::RgbdFrame frame;
  frame.color = nvs::read_color(a.color);
  frame.depth = nvs::read_depth(a.depth, parse_encoding(a.encoding));
  frame.intrinsics = nvs::parse_intrinsics(slurp(a.intrinsics));
  frame.intrinsics.width = frame.color.width();
  frame.intrinsics.height = frame.color.height();

  nvs::RenderConfig cfg;
  cfg.splat_radius = a.splat_radius;
  const nvs::RenderOutput r = nvs::reproject(frame, frame.intrinsics, t_rel, cfg, a.threads);

  const fs::path out(a.out);
  fs::create_directories(out);
  nvs::write_color_png(out / "color.png", r.color);
  nvs::write_mask_png(out / "mask.png", r.mask);
  nvs::write_depth_png(out / "depth.png", r.zbuffer);
  if (!a.ply.empty()) {
    nvs::write_ply(a.ply, nvs::transform_cloud(nvs::cloud_from_rgbd(frame, a.threads), t_rel));
  }

  const json stats{{"points_total", r.stats.points_total},
                   {"points_behind", r.stats.points_behind},
                   {"points_clipped", r.stats.points_clipped},
                   {"points_drawn", r.stats.points_drawn},
                   {"coverage", r.coverage()},
                   {"splat_radius", a.splat_radius},
                   {"width", r.color.width()},
                   {"height", r.color.height()}};
  std::cout << stats.dump() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------------------------
// gen

struct GenArgs {
  std::vector<std::string> seqs;
  std::string out;
  std::string encoding = "mm";
  std::uint64_t seed = 0;
  int splat_radius = 1;
  unsigned threads = 0;
  // paired
  int pairs_per_seq = 50;
  int max_gap = 10;
  // unpaired
  int count = 300;
  double rot_deg = 15.0;
  double trans_m = 0.2;
};

std::vector<nvs::Sequence> load_all(const GenArgs& a) {
  nvs::IngestConfig ingest;
  ingest.depth_encoding = parse_encoding(a.encoding);
  std::vector<nvs::Sequence> seqs;
  for (const auto& dir : a.seqs) seqs.push_back(nvs::load_sequence(dir, ingest));
  return seqs;
}

int run_gen_paired(const GenArgs& a) {
  nvs::PairedOptions opts;
  opts.pairs_per_sequence = a.pairs_per_seq;
  opts.max_gap = a.max_gap;
  opts.seed = a.seed;
  opts.render.splat_radius = a.splat_radius;
  opts.threads = a.threads;
  const auto result = nvs::generate_paired_dataset(load_all(a), opts, a.out);
  if (result.shortfall > 0) {
    std::cerr << fmt::format("warning: {} requested pairs unavailable (distinct pairs exhausted)\n",
                             result.shortfall);
  }
  std::cout << json{{"mode", "paired"},
                    {"records", result.records.size()},
                    {"shortfall", result.shortfall},
                    {"manifest", (fs::path(a.out) / "manifest.jsonl").string()}}
                   .dump()
            << '\n';
  return 0;
}

int run_gen_unpaired(const GenArgs& a) {
  nvs::UnpairedOptions opts;
  opts.total_items = a.count;
  opts.ranges = {a.rot_deg, a.rot_deg, a.rot_deg, a.trans_m, a.trans_m, a.trans_m};
  opts.seed = a.seed;
  opts.render.splat_radius = a.splat_radius;
  opts.threads = a.threads;
  const auto records = nvs::gen_unpaired(load_all(a), opts, a.out);
  std::cout << json{{"mode", "unpaired"},
                    {"records", records.size()},
                    {"manifest", (fs::path(a.out) / "manifest.jsonl").string()}}
                   .dump()
            << '\n';
  return 0;
}

// ---------------------------------------------------------------------------------------------
// eval

struct EvalArgs {
  std::string pred;
  std::string truth;
  std::string mask;
  std::string out;
};

std::map<std::string, fs::path> image_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw nvs::IoError(fmt::format("'{}' is not a directory", dir.string()));
  std::map<std::string, fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".png" || ext == ".jpg" || ext == ".jpeg") files[e.path().filename().string()] = e.path();
  }
  return files;
}

double mean_or_inf(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

int run_eval(const EvalArgs& a) {
  const auto pred = image_files(a.pred);
  const auto truth = image_files(a.truth);
  std::optional<std::map<std::string, fs::path>> masks;
  if (!a.mask.empty()) masks = image_files(a.mask);

  std::vector<std::string> unmatched;
  for (const auto& [name, _] : pred) {
    if (!truth.contains(name)) unmatched.push_back("pred/" + name);
    else if (masks && !masks->contains(name)) unmatched.push_back("mask/" + name);
  }
  for (const auto& [name, _] : truth) {
    if (!pred.contains(name)) unmatched.push_back("truth/" + name);
  }
  if (!unmatched.empty()) {
    std::cerr << "unmatched files:\n";
    for (const auto& u : unmatched) std::cerr << "  " << u << '\n';
    return kExitRuntime;
  }
  if (pred.empty()) {
    std::cerr << "no images to evaluate\n";
    return kExitRuntime;
  }

  json items = json::array();
  std::vector<double> psnrs, hole_psnrs, ssims, coverages;
  for (const auto& [name, pred_path] : pred) {
    const nvs::ColorImage p = nvs::read_color(pred_path);
    const nvs::ColorImage t = nvs::read_color(truth.at(name));
    json item{{"file", name}};
    const double full = nvs::psnr(p, t);
    item["psnr"] = finite_or_inf(full);
    psnrs.push_back(full);
    if (p.width() >= nvs::kSsimWindow && p.height() >= nvs::kSsimWindow) {
      const double s = nvs::ssim(p, t);
      item["ssim"] = s;
      ssims.push_back(s);
    } else {
      item["ssim"] = nullptr;
    }
    if (masks) {
      const nvs::MaskImage m = nvs::read_mask(masks->at(name));
      const double cov = nvs::coverage(m);
      item["coverage"] = cov;
      coverages.push_back(cov);
      if (cov < 1.0) {
        const double hp = nvs::psnr(p, t, nvs::invert_mask(m));
        item["psnr_holes_only"] = finite_or_inf(hp);
        hole_psnrs.push_back(hp);
      } else {
        item["psnr_holes_only"] = nullptr;
      }
    } else {
      item["coverage"] = nullptr;
      item["psnr_holes_only"] = nullptr;
    }
    items.push_back(std::move(item));
  }

  const json aggregate{{"count", items.size()},
                       {"psnr", finite_or_inf(mean_or_inf(psnrs))},
                       {"psnr_holes_only", finite_or_inf(mean_or_inf(hole_psnrs))},
                       {"ssim", finite_or_inf(mean_or_inf(ssims))},
                       {"coverage", finite_or_inf(mean_or_inf(coverages))}};
  const json report{{"items", items}, {"aggregate", aggregate}};
  std::ofstream out(a.out, std::ios::binary | std::ios::trunc);
  if (!out) throw nvs::IoError(fmt::format("cannot write report '{}'", a.out));
  out << report.dump(2) << '\n';
  std::cout << aggregate.dump() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------------------------
// fill

struct FillArgs {
  std::string color;
  std::string mask;
  std::string method = "nearest";
  std::string out;
};

int run_fill(const FillArgs& a) {
  const nvs::ColorImage color = nvs::read_color(a.color);
  const nvs::MaskImage mask = nvs::read_mask(a.mask);
  const nvs::ColorImage filled = nvs::fill_holes(color, mask, nvs::parse_fill_method(a.method));
  nvs::write_color_png(a.out, filled);
  std::size_t holes = 0;
  for (auto m : mask.data()) holes += m ? 0 : 1;
  std::cout << json{{"method", a.method}, {"filled_pixels", holes}, {"out", a.out}}.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Novel-view synthesis toolkit: RGBD reprojection, datasets, hole filling, metrics"};
  app.require_subcommand(1);
  const std::set<std::string> encodings{"mm", "sun3d"};

  ReprojectArgs rp;
  auto* reproject = app.add_subcommand("reproject", "Render an RGBD frame from a new camera pose");
  reproject->add_option("--color", rp.color, "Color image")->required()->check(CLI::ExistingFile);
  reproject->add_option("--depth", rp.depth, "16-bit depth PNG")->required()->check(CLI::ExistingFile);
  reproject->add_option("--intrinsics", rp.intrinsics, "3x3 camera matrix file")
      ->required()
      ->check(CLI::ExistingFile);
  auto* pose_opt = reproject->add_option("--pose", rp.pose,
                                         "12 numbers: 3x4 row-major camera-to-world pose of the "
                                         "novel camera in the source camera frame");
  auto* pose_file_opt = reproject->add_option("--pose-file", rp.pose_file, "File holding the 12 numbers")
                            ->check(CLI::ExistingFile);
  pose_opt->excludes(pose_file_opt);
  reproject->add_option("--splat-radius", rp.splat_radius, "Splat half-width in pixels")
      ->check(CLI::Range(0, nvs::RenderConfig::kMaxSplatRadius));
  reproject->add_option("--out", rp.out, "Output directory");
  reproject->add_option("--ply", rp.ply, "Also write the transformed cloud as ASCII PLY");
  reproject->add_option("--depth-encoding", rp.encoding, "mm or sun3d")->check(CLI::IsMember(encodings));
  reproject->add_option("--threads", rp.threads, "Worker cap (0 = all cores)");

  GenArgs ga;
  auto* gen = app.add_subcommand("gen", "Generate training datasets");
  gen->require_subcommand(1);
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--seq", ga.seqs, "Sequence directories")->required()->expected(1, -1);
    cmd->add_option("--out", ga.out, "Output directory")->required();
    cmd->add_option("--seed", ga.seed, "Master seed");
    cmd->add_option("--splat-radius", ga.splat_radius, "Splat half-width in pixels")
        ->check(CLI::Range(0, nvs::RenderConfig::kMaxSplatRadius));
    cmd->add_option("--depth-encoding", ga.encoding, "mm or sun3d")->check(CLI::IsMember(encodings));
    cmd->add_option("--threads", ga.threads, "Worker cap (0 = all cores)");
  };
  auto* paired = gen->add_subcommand("paired", "Reprojected view A paired with real view B");
  add_common(paired);
  paired->add_option("--pairs-per-seq", ga.pairs_per_seq, "Pairs per sequence")
      ->check(CLI::PositiveNumber);
  paired->add_option("--max-gap", ga.max_gap, "Largest frame gap between A and B")
      ->check(CLI::PositiveNumber);
  auto* unpaired = gen->add_subcommand("unpaired", "Randomly perturbed reprojections + originals");
  add_common(unpaired);
  unpaired->add_option("--count", ga.count, "Number of items")->check(CLI::PositiveNumber);
  unpaired->add_option("--rot-deg", ga.rot_deg, "Yaw/pitch/roll half-range in degrees")
      ->check(CLI::NonNegativeNumber);
  unpaired->add_option("--trans-m", ga.trans_m, "Per-axis translation half-range in meters")
      ->check(CLI::NonNegativeNumber);

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Compare predicted images against ground truth");
  eval->add_option("--pred", ea.pred, "Predicted image directory")->required();
  eval->add_option("--truth", ea.truth, "Ground-truth image directory")->required();
  eval->add_option("--mask", ea.mask, "Mask directory (255 = valid, 0 = hole)");
  eval->add_option("--out", ea.out, "Report JSON path")->required();

  FillArgs fa;
  auto* fill = app.add_subcommand("fill", "Fill holes of a reprojected image");
  fill->add_option("--color", fa.color, "Color image")->required()->check(CLI::ExistingFile);
  fill->add_option("--mask", fa.mask, "Mask image")->required()->check(CLI::ExistingFile);
  fill->add_option("--method", fa.method, "nearest or pushpull")
      ->check(CLI::IsMember({"nearest", "pushpull"}));
  fill->add_option("--out", fa.out, "Output PNG")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*reproject) {
      if (rp.pose.empty() && rp.pose_file.empty()) throw UsageError("one of --pose or --pose-file is required");
      return run_reproject(rp);
    }
    if (*paired) return run_gen_paired(ga);
    if (*unpaired) return run_gen_unpaired(ga);
    if (*eval) return run_eval(ea);
    if (*fill) return run_fill(fa);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
