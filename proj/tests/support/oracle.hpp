#pragma once

// Reference rasterizer: for every pixel, scan every point and keep the lexicographically
// smallest (depth, point index) whose splat square covers the pixel.

#include <cmath>
#include <limits>

#include "nvs/renderer.hpp"

namespace nvs::testing {

inline RenderOutput brute_force_render(const ColoredPointCloud& cloud, const CameraIntrinsics& k,
                                       const RenderConfig& cfg) {
  RenderOutput out;
  out.color = ColorImage(k.width, k.height, cfg.hole_color);
  out.mask = MaskImage(k.width, k.height, 0);
  out.zbuffer = DepthImage(k.width, k.height, std::numeric_limits<double>::infinity());

  struct Center {
    bool drawn;
    double px, py;
  };
  std::vector<Center> centers(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const Point3& p = cloud.positions[i];
    ++out.stats.points_total;
    if (!(p.z() > 0.0)) {
      ++out.stats.points_behind;
      centers[i] = {false, 0, 0};
      continue;
    }
    const double u = k.fx * p.x() / p.z() + k.cx;
    const double v = k.fy * p.y() / p.z() + k.cy;
    // Half away from zero.
    const double px = u < 0 ? -std::floor(-u + 0.5) : std::floor(u + 0.5);
    const double py = v < 0 ? -std::floor(-v + 0.5) : std::floor(v + 0.5);
    const bool inside = px >= 0 && px <= k.width - 1 && py >= 0 && py <= k.height - 1;
    centers[i] = {inside, px, py};
    if (inside) {
      ++out.stats.points_drawn;
    } else {
      ++out.stats.points_clipped;
    }
  }

  const double r = cfg.splat_radius;
  for (int y = 0; y < k.height; ++y) {
    for (int x = 0; x < k.width; ++x) {
      std::size_t best = cloud.size();
      for (std::size_t i = 0; i < cloud.size(); ++i) {
        const Center& c = centers[i];
        if (!c.drawn || std::abs(c.px - x) > r || std::abs(c.py - y) > r) continue;
        if (best == cloud.size() || cloud.positions[i].z() < cloud.positions[best].z()) best = i;
      }
      if (best == cloud.size()) continue;
      out.color(x, y) = cloud.colors[best];
      out.mask(x, y) = 1;
      out.zbuffer(x, y) = cloud.positions[best].z();
    }
  }
  return out;
}

}  // namespace nvs::testing
