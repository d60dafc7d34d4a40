#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "nvs/geometry.hpp"
#include "nvs/image_io.hpp"
#include "nvs/pointcloud.hpp"
#include "nvs/renderer.hpp"

namespace nvs {

struct IngestConfig {
  DepthEncoding depth_encoding = DepthEncoding::kMillimeters;
  // Maximum |R^T R - I| / |det R - 1| accepted in extrinsics before re-orthonormalization.
  double rotation_tolerance = 1e-3;
};

struct FrameRef {
  std::filesystem::path color_path;
  std::filesystem::path depth_path;
  Pose pose;
  int frame_index = 0;
};

// RGBD sequence on disk; frames are decoded on demand.
struct Sequence {
  std::string id;
  CameraIntrinsics intrinsics;
  std::vector<FrameRef> frames;
  IngestConfig ingest;

  RgbdFrame load_frame(std::size_t position) const;
};

// 3x3 whitespace-separated camera matrix; width and height are left at 1.
CameraIntrinsics parse_intrinsics(const std::string& text);
// One 3x4 row-major camera-to-world matrix per frame.
std::vector<Pose> parse_extrinsics(const std::string& text, double rotation_tolerance);

// Layout: color/*.png|jpg, depth/*.png, intrinsics.txt, extrinsics.txt. The id is the
// directory name. Throws DatasetError, CalibrationError or IoError.
Sequence load_sequence(const std::filesystem::path& dir, const IngestConfig& cfg = {});

using Matrix34 = std::array<double, 12>;

struct PairRecord {
  std::string pair_id;
  std::string sequence_id;
  int source_frame_index = 0;
  int target_frame_index = 0;
  Matrix34 relative_pose{};
  // Relative to the dataset root.
  std::string source_reprojected_image;
  std::string target_real_image;
  std::string mask_image;
  int splat_radius = 0;
};

struct PerturbationParams {
  double yaw_deg = 0.0;
  double pitch_deg = 0.0;
  double roll_deg = 0.0;
  double tx = 0.0;
  double ty = 0.0;
  double tz = 0.0;

  Pose pose() const;
};

struct UnpairedRecord {
  std::string item_id;
  std::string sequence_id;
  int frame_index = 0;
  Matrix34 perturbation{};
  PerturbationParams perturbation_params;
  std::string source_reprojected_image;
  std::string target_original_image;
  std::string mask_image;
  int splat_radius = 0;
};

nlohmann::json to_json(const PairRecord& r);
nlohmann::json to_json(const UnpairedRecord& r);

struct PairedOptions {
  int pairs_per_sequence = 50;
  int max_gap = 10;
  std::uint64_t seed = 0;
  RenderConfig render;
  unsigned threads = 1;

  void validate() const;
};

struct PairedResult {
  std::vector<PairRecord> records;
  // Requested pairs that could not be produced because distinct (A, B) combinations ran out.
  std::size_t shortfall = 0;
};

// Chooses (source, target) frame positions for one sequence; deterministic in the seed.
std::vector<std::pair<std::size_t, std::size_t>> sample_pairs(const Sequence& seq,
                                                              const PairedOptions& opts,
                                                              std::size_t* shortfall = nullptr);

// Writes source/, target/ and mask/ images for one sequence and returns its records.
PairedResult gen_paired(const Sequence& seq, const PairedOptions& opts,
                        const std::filesystem::path& out_dir);

// All sequences plus manifest.jsonl.
PairedResult generate_paired_dataset(const std::vector<Sequence>& seqs, const PairedOptions& opts,
                                     const std::filesystem::path& out_dir);

// Symmetric half-widths of the uniform perturbation ranges.
struct PerturbationRanges {
  double yaw_deg = 15.0;
  double pitch_deg = 15.0;
  double roll_deg = 15.0;
  double tx = 0.2;
  double ty = 0.2;
  double tz = 0.2;

  void validate() const;
};

struct UnpairedOptions {
  int total_items = 300;
  PerturbationRanges ranges;
  std::uint64_t seed = 0;
  RenderConfig render;
  unsigned threads = 1;
};

// Writes source/, target/, mask/ and manifest.jsonl.
std::vector<UnpairedRecord> gen_unpaired(const std::vector<Sequence>& seqs,
                                         const UnpairedOptions& opts,
                                         const std::filesystem::path& out_dir);

// One compact JSON object per line, in the given order.
void write_manifest(const std::filesystem::path& path, const std::vector<nlohmann::json>& lines);
std::vector<nlohmann::json> read_manifest(const std::filesystem::path& path);

}  // namespace nvs
