#pragma once

#include <cstddef>

#include "nvs/geometry.hpp"
#include "nvs/image.hpp"
#include "nvs/pointcloud.hpp"

namespace nvs {

struct RenderConfig {
  static constexpr int kMaxSplatRadius = 16;

  // A point covers the (2r+1)x(2r+1) square centered on its rounded projection.
  int splat_radius = 1;
  Rgb hole_color{0, 0, 0};
  // Depth tolerance under which two splats count as a tie. The rasterizer itself always keeps
  // the earlier point on an exact tie.
  double depth_epsilon = 1e-9;

  void validate() const;
};

struct RenderStats {
  std::size_t points_total = 0;
  std::size_t points_behind = 0;   // z <= 0
  std::size_t points_clipped = 0;  // rounded projection outside the image
  std::size_t points_drawn = 0;

  friend bool operator==(const RenderStats&, const RenderStats&) = default;
};

struct RenderOutput {
  ColorImage color;
  MaskImage mask;
  // Nearest depth per pixel; +infinity where mask is 0.
  DepthImage zbuffer;
  RenderStats stats;

  double coverage() const;
};

// Z-buffered square splatting of a cloud already expressed in the target camera frame.
// Output is identical for every thread count.
RenderOutput render(const ColoredPointCloud& cloud, const CameraIntrinsics& k,
                    const RenderConfig& cfg, unsigned threads = 1);

// render(transform_cloud(cloud_from_rgbd(frame), t_rel), target_k, cfg), with t_rel mapping
// source-camera coordinates into the target camera.
RenderOutput reproject(const RgbdFrame& frame, const CameraIntrinsics& target_k,
                       const Pose& t_rel, const RenderConfig& cfg, unsigned threads = 1);

}  // namespace nvs
