#include "nvs/renderer.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <vector>

#include "nvs/error.hpp"
#include "nvs/parallel.hpp"

namespace nvs {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Splat {
  int x;
  int y;
  double z;
  std::size_t index;
};

struct ProjectedChunk {
  std::vector<Splat> splats;
  RenderStats stats;
};

ProjectedChunk project_range(const ColoredPointCloud& cloud, const CameraIntrinsics& k,
                             std::size_t begin, std::size_t end) {
  ProjectedChunk chunk;
  chunk.splats.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    const Point3& p = cloud.positions[i];
    ++chunk.stats.points_total;
    if (!(p.z() > 0.0)) {
      ++chunk.stats.points_behind;
      continue;
    }
    const PixelCoord uv = project(p, k);
    // std::round rounds half away from zero; NaN fails both comparisons.
    const double px = std::round(uv.u);
    const double py = std::round(uv.v);
    if (!(px >= 0.0 && px < k.width && py >= 0.0 && py < k.height)) {
      ++chunk.stats.points_clipped;
      continue;
    }
    ++chunk.stats.points_drawn;
    chunk.splats.push_back({static_cast<int>(px), static_cast<int>(py), p.z(), i});
  }
  return chunk;
}

}  // namespace

void RenderConfig::validate() const {
  if (splat_radius < 0 || splat_radius > kMaxSplatRadius) {
    throw Error(fmt::format("splat radius must be in [0, {}], got {}", kMaxSplatRadius,
                            splat_radius));
  }
  if (!(depth_epsilon >= 0.0) || !std::isfinite(depth_epsilon)) {
    throw Error(fmt::format("depth epsilon must be finite and non-negative, got {}",
                            depth_epsilon));
  }
}

double RenderOutput::coverage() const {
  if (mask.empty()) return 0.0;
  std::size_t valid = 0;
  for (auto m : mask.data()) valid += m ? 1 : 0;
  return static_cast<double>(valid) / static_cast<double>(mask.size());
}

RenderOutput render(const ColoredPointCloud& cloud, const CameraIntrinsics& k,
                    const RenderConfig& cfg, unsigned threads) {
  k.validate();
  cfg.validate();
  if (cloud.positions.size() != cloud.colors.size()) {
    throw DimensionError("point cloud positions and colors differ in length");
  }
  if (threads == 0) threads = default_thread_count();

  // Projection: chunks are concatenated in order, so splats stay sorted by point index.
  const std::size_t n = cloud.size();
  const std::size_t chunk_count = std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
  std::vector<ProjectedChunk> chunks(chunk_count);
  parallel_for_chunks(chunk_count, threads, [&](std::size_t cb, std::size_t ce) {
    for (std::size_t c = cb; c < ce; ++c) {
      chunks[c] = project_range(cloud, k, n * c / chunk_count, n * (c + 1) / chunk_count);
    }
  });

  RenderOutput out;
  out.color = ColorImage(k.width, k.height, cfg.hole_color);
  out.mask = MaskImage(k.width, k.height, 0);
  out.zbuffer = DepthImage(k.width, k.height, kInf);
  for (const auto& c : chunks) {
    out.stats.points_total += c.stats.points_total;
    out.stats.points_behind += c.stats.points_behind;
    out.stats.points_clipped += c.stats.points_clipped;
    out.stats.points_drawn += c.stats.points_drawn;
  }

  // Rasterization: each worker owns a horizontal band of rows and visits splats in index
  // order, so every pixel sees exactly the sequential sequence of depth tests.
  const int r = cfg.splat_radius;
  const auto bands = static_cast<std::size_t>(k.height);
  parallel_for_chunks(bands, threads, [&](std::size_t row_begin, std::size_t row_end) {
    const int y0 = static_cast<int>(row_begin);
    const int y1 = static_cast<int>(row_end);  // exclusive
    for (const auto& chunk : chunks) {
      for (const Splat& s : chunk.splats) {
        const int top = std::max(s.y - r, y0);
        const int bottom = std::min(s.y + r, y1 - 1);
        if (top > bottom) continue;
        const int left = std::max(s.x - r, 0);
        const int right = std::min(s.x + r, k.width - 1);
        const Rgb color = cloud.colors[s.index];
        for (int y = top; y <= bottom; ++y) {
          const std::size_t row = out.zbuffer.index(0, y);
          for (int x = left; x <= right; ++x) {
            double& z = out.zbuffer[row + x];
            if (s.z < z) {
              z = s.z;
              out.color[row + x] = color;
              out.mask[row + x] = 1;
            }
          }
        }
      }
    }
  });
  return out;
}

RenderOutput reproject(const RgbdFrame& frame, const CameraIntrinsics& target_k,
                       const Pose& t_rel, const RenderConfig& cfg, unsigned threads) {
  return render(transform_cloud(cloud_from_rgbd(frame, threads), t_rel), target_k, cfg, threads);
}

}  // namespace nvs
