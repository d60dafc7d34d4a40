#include "nvs/dataset.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <nlohmann/json.hpp>

#include "nvs/error.hpp"
#include "nvs/image_io.hpp"
#include "nvs/parallel.hpp"
#include "nvs/random.hpp"

namespace nvs {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DatasetError(fmt::format("missing calibration file '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> parse_numbers(const std::string& text, const char* what) {
  std::istringstream in(text);
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size() || !std::isfinite(v)) {
      throw CalibrationError(fmt::format("{}: '{}' is not a finite number", what, token));
    }
    values.push_back(v);
  }
  return values;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<fs::path> list_images(const fs::path& dir, std::initializer_list<const char*> exts) {
  if (!fs::is_directory(dir)) {
    throw DatasetError(fmt::format("missing image directory '{}'", dir.string()));
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string ext = lower(entry.path().extension().string());
    if (std::any_of(exts.begin(), exts.end(), [&](const char* e) { return ext == e; })) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  return files;
}

json matrix_json(const Matrix34& m) { return json(std::vector<double>(m.begin(), m.end())); }

void prepare_layout(const fs::path& out_dir) {
  for (const char* sub : {"source", "target", "mask"}) fs::create_directories(out_dir / sub);
}

struct ItemPaths {
  std::string source;
  std::string target;
  std::string mask;
};

ItemPaths item_paths(const std::string& id) {
  return {"source/" + id + ".png", "target/" + id + ".png", "mask/" + id + ".png"};
}

}  // namespace

RgbdFrame Sequence::load_frame(std::size_t position) const {
  const FrameRef& ref = frames.at(position);
  RgbdFrame frame;
  frame.color = read_color(ref.color_path);
  frame.depth = read_depth(ref.depth_path, ingest.depth_encoding);
  frame.intrinsics = intrinsics;
  frame.pose = ref.pose;
  frame.frame_index = ref.frame_index;
  frame.validate();
  return frame;
}

CameraIntrinsics parse_intrinsics(const std::string& text) {
  const std::vector<double> v = parse_numbers(text, "intrinsics");
  if (v.size() != 9) {
    throw CalibrationError(fmt::format("intrinsics must hold 9 numbers, found {}", v.size()));
  }
  if (v[1] != 0.0 || v[3] != 0.0 || v[6] != 0.0 || v[7] != 0.0 || v[8] != 1.0) {
    throw CalibrationError("intrinsics must have the form [fx 0 cx; 0 fy cy; 0 0 1]");
  }
  CameraIntrinsics k;
  k.fx = v[0];
  k.cx = v[2];
  k.fy = v[4];
  k.cy = v[5];
  if (!(k.fx > 0.0 && k.fy > 0.0)) throw CalibrationError("focal lengths must be positive");
  return k;
}

std::vector<Pose> parse_extrinsics(const std::string& text, double rotation_tolerance) {
  const std::vector<double> v = parse_numbers(text, "extrinsics");
  if (v.size() % 12 != 0) {
    throw CalibrationError(
        fmt::format("extrinsics must hold 12 numbers per frame, found {} numbers", v.size()));
  }
  std::vector<Pose> poses;
  poses.reserve(v.size() / 12);
  for (std::size_t f = 0; f < v.size() / 12; ++f) {
    const std::span<const double, 12> m(v.data() + f * 12, 12);
    try {
      // Checked at the ingest tolerance, then snapped onto SO(3).
      const Pose loose = Pose::from_row_major(m, rotation_tolerance);
      poses.push_back(Pose::orthonormalized(loose.rotation(), loose.translation()));
    } catch (const CalibrationError& e) {
      throw CalibrationError(fmt::format("extrinsics frame {}: {}", f, e.what()));
    }
  }
  return poses;
}

Sequence load_sequence(const fs::path& dir, const IngestConfig& cfg) {
  if (!fs::is_directory(dir)) {
    throw DatasetError(fmt::format("sequence directory '{}' does not exist", dir.string()));
  }
  const auto colors = list_images(dir / "color", {".png", ".jpg", ".jpeg"});
  const auto depths = list_images(dir / "depth", {".png"});
  if (colors.size() != depths.size()) {
    throw DatasetError(fmt::format("'{}': {} color images but {} depth images", dir.string(),
                                   colors.size(), depths.size()));
  }
  if (colors.empty()) throw DatasetError(fmt::format("'{}' contains no frames", dir.string()));

  Sequence seq;
  seq.id = fs::absolute(dir).lexically_normal().filename().string();
  if (seq.id.empty()) seq.id = fs::absolute(dir).lexically_normal().parent_path().filename().string();
  seq.ingest = cfg;
  seq.intrinsics = parse_intrinsics(read_text(dir / "intrinsics.txt"));
  const auto poses = parse_extrinsics(read_text(dir / "extrinsics.txt"), cfg.rotation_tolerance);
  if (poses.size() != colors.size()) {
    throw DatasetError(fmt::format("'{}': {} frames but {} extrinsics entries", dir.string(),
                                   colors.size(), poses.size()));
  }

  const ColorImage first = read_color(colors.front());
  seq.intrinsics.width = first.width();
  seq.intrinsics.height = first.height();
  seq.intrinsics.validate();

  seq.frames.reserve(colors.size());
  for (std::size_t i = 0; i < colors.size(); ++i) {
    seq.frames.push_back({colors[i], depths[i], poses[i], static_cast<int>(i)});
  }
  return seq;
}

Pose PerturbationParams::pose() const {
  constexpr double deg = std::numbers::pi / 180.0;
  return Pose::from_euler(yaw_deg * deg, pitch_deg * deg, roll_deg * deg, {tx, ty, tz});
}

json to_json(const PairRecord& r) {
  return json{{"pair_id", r.pair_id},
              {"sequence_id", r.sequence_id},
              {"source_frame_index", r.source_frame_index},
              {"target_frame_index", r.target_frame_index},
              {"relative_pose", matrix_json(r.relative_pose)},
              {"paths",
               {{"source_reprojected_image", r.source_reprojected_image},
                {"target_real_image", r.target_real_image},
                {"mask_image", r.mask_image}}},
              {"splat_radius", r.splat_radius}};
}

json to_json(const UnpairedRecord& r) {
  const PerturbationParams& p = r.perturbation_params;
  return json{{"item_id", r.item_id},
              {"sequence_id", r.sequence_id},
              {"frame_index", r.frame_index},
              {"perturbation", matrix_json(r.perturbation)},
              {"perturbation_params",
               {{"yaw_deg", p.yaw_deg},
                {"pitch_deg", p.pitch_deg},
                {"roll_deg", p.roll_deg},
                {"tx", p.tx},
                {"ty", p.ty},
                {"tz", p.tz}}},
              {"paths",
               {{"source_reprojected_image", r.source_reprojected_image},
                {"target_original_image", r.target_original_image},
                {"mask_image", r.mask_image}}},
              {"splat_radius", r.splat_radius}};
}

void PairedOptions::validate() const {
  if (pairs_per_sequence < 1) throw DatasetError("pairs per sequence must be at least 1");
  if (max_gap < 1) throw DatasetError("max gap must be at least 1");
  render.validate();
}

void PerturbationRanges::validate() const {
  for (double v : {yaw_deg, pitch_deg, roll_deg, tx, ty, tz}) {
    if (!std::isfinite(v) || v < 0.0) {
      throw DatasetError("perturbation ranges must be finite and non-negative");
    }
  }
}

std::vector<std::pair<std::size_t, std::size_t>> sample_pairs(const Sequence& seq,
                                                              const PairedOptions& opts,
                                                              std::size_t* shortfall) {
  opts.validate();
  if (seq.frames.size() < 2) {
    throw DatasetError(fmt::format("sequence '{}' needs at least 2 frames, has {}", seq.id,
                                   seq.frames.size()));
  }
  // Successor candidates per source position, by frame index distance.
  std::vector<std::size_t> sources;
  std::vector<std::vector<std::size_t>> successors(seq.frames.size());
  std::size_t combinations = 0;
  for (std::size_t a = 0; a < seq.frames.size(); ++a) {
    for (std::size_t b = a + 1; b < seq.frames.size(); ++b) {
      const int gap = seq.frames[b].frame_index - seq.frames[a].frame_index;
      if (gap > opts.max_gap) break;
      if (gap >= 1) successors[a].push_back(b);
    }
    if (!successors[a].empty()) sources.push_back(a);
    combinations += successors[a].size();
  }
  if (combinations == 0) {
    throw DatasetError(fmt::format("sequence '{}' has no frame pairs within gap {}", seq.id,
                                   opts.max_gap));
  }

  const auto requested = static_cast<std::size_t>(opts.pairs_per_sequence);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (requested >= combinations) {
    for (std::size_t a : sources) {
      for (std::size_t b : successors[a]) pairs.emplace_back(a, b);
    }
    if (shortfall) *shortfall = requested - combinations;
    return pairs;
  }

  std::set<std::pair<std::size_t, std::size_t>> used;
  for (std::size_t k = 0; k < requested; ++k) {
    Rng rng(derive_seed(opts.seed, seq.id, k));
    std::pair<std::size_t, std::size_t> pick;
    do {
      const std::size_t a = sources[rng.uniform_index(sources.size())];
      const auto& succ = successors[a];
      pick = {a, succ[rng.uniform_index(succ.size())]};
    } while (used.contains(pick));
    used.insert(pick);
    pairs.push_back(pick);
  }
  if (shortfall) *shortfall = 0;
  return pairs;
}

PairedResult gen_paired(const Sequence& seq, const PairedOptions& opts,
                        const fs::path& out_dir) {
  PairedResult result;
  const auto pairs = sample_pairs(seq, opts, &result.shortfall);
  prepare_layout(out_dir);
  result.records.resize(pairs.size());
  parallel_for_chunks(pairs.size(), opts.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const auto [a, b] = pairs[k];
      const RgbdFrame source = seq.load_frame(a);
      const RgbdFrame target = seq.load_frame(b);
      const Pose rel = relative_pose(source.pose, target.pose);
      const RenderOutput rendered = reproject(source, seq.intrinsics, rel, opts.render);

      PairRecord& rec = result.records[k];
      rec.pair_id = fmt::format("{}_{:05}", seq.id, k);
      rec.sequence_id = seq.id;
      rec.source_frame_index = source.frame_index;
      rec.target_frame_index = target.frame_index;
      rec.relative_pose = rel.to_row_major();
      const ItemPaths paths = item_paths(rec.pair_id);
      rec.source_reprojected_image = paths.source;
      rec.target_real_image = paths.target;
      rec.mask_image = paths.mask;
      rec.splat_radius = opts.render.splat_radius;

      write_color_png(out_dir / paths.source, rendered.color);
      write_color_png(out_dir / paths.target, target.color);
      write_mask_png(out_dir / paths.mask, rendered.mask);
    }
  });
  return result;
}

PairedResult generate_paired_dataset(const std::vector<Sequence>& seqs, const PairedOptions& opts,
                                     const fs::path& out_dir) {
  if (seqs.empty()) throw DatasetError("no sequences given");
  std::set<std::string> ids;
  for (const auto& s : seqs) {
    if (!ids.insert(s.id).second) {
      throw DatasetError(fmt::format("duplicate sequence id '{}'", s.id));
    }
  }
  PairedResult all;
  std::vector<json> lines;
  for (const auto& seq : seqs) {
    PairedResult part = gen_paired(seq, opts, out_dir);
    all.shortfall += part.shortfall;
    for (auto& rec : part.records) {
      lines.push_back(to_json(rec));
      all.records.push_back(std::move(rec));
    }
  }
  write_manifest(out_dir / "manifest.jsonl", lines);
  return all;
}

std::vector<UnpairedRecord> gen_unpaired(const std::vector<Sequence>& seqs,
                                         const UnpairedOptions& opts, const fs::path& out_dir) {
  opts.render.validate();
  opts.ranges.validate();
  if (opts.total_items < 1) throw DatasetError("item count must be at least 1");
  std::vector<std::pair<std::size_t, std::size_t>> frames;  // (sequence, position)
  for (std::size_t s = 0; s < seqs.size(); ++s) {
    for (std::size_t f = 0; f < seqs[s].frames.size(); ++f) frames.emplace_back(s, f);
  }
  if (frames.empty()) throw DatasetError("unpaired generation needs at least one frame");

  prepare_layout(out_dir);
  const auto count = static_cast<std::size_t>(opts.total_items);
  std::vector<UnpairedRecord> records(count);
  const PerturbationRanges& rg = opts.ranges;
  parallel_for_chunks(count, opts.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      Rng rng(derive_seed(opts.seed, "", k));
      const auto [s, f] = frames[rng.uniform_index(frames.size())];
      PerturbationParams p;
      p.yaw_deg = rng.uniform(-rg.yaw_deg, rg.yaw_deg);
      p.pitch_deg = rng.uniform(-rg.pitch_deg, rg.pitch_deg);
      p.roll_deg = rng.uniform(-rg.roll_deg, rg.roll_deg);
      p.tx = rng.uniform(-rg.tx, rg.tx);
      p.ty = rng.uniform(-rg.ty, rg.ty);
      p.tz = rng.uniform(-rg.tz, rg.tz);
      const Pose perturbation = p.pose();

      const Sequence& seq = seqs[s];
      const RgbdFrame frame = seq.load_frame(f);
      const RenderOutput rendered = reproject(frame, seq.intrinsics, perturbation, opts.render);

      UnpairedRecord& rec = records[k];
      rec.item_id = fmt::format("u{:06}", k);
      rec.sequence_id = seq.id;
      rec.frame_index = frame.frame_index;
      rec.perturbation = perturbation.to_row_major();
      rec.perturbation_params = p;
      const ItemPaths paths = item_paths(rec.item_id);
      rec.source_reprojected_image = paths.source;
      rec.target_original_image = paths.target;
      rec.mask_image = paths.mask;
      rec.splat_radius = opts.render.splat_radius;

      write_color_png(out_dir / paths.source, rendered.color);
      write_color_png(out_dir / paths.target, frame.color);
      write_mask_png(out_dir / paths.mask, rendered.mask);
    }
  });

  std::vector<json> lines;
  lines.reserve(records.size());
  for (const auto& r : records) lines.push_back(to_json(r));
  write_manifest(out_dir / "manifest.jsonl", lines);
  return records;
}

void write_manifest(const fs::path& path, const std::vector<json>& lines) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write manifest '{}'", path.string()));
  for (const auto& line : lines) out << line.dump() << '\n';
  if (!out) throw IoError(fmt::format("failed writing manifest '{}'", path.string()));
}

std::vector<json> read_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read manifest '{}'", path.string()));
  std::vector<json> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(json::parse(line));
  }
  return lines;
}

}  // namespace nvs
