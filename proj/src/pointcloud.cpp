#include "nvs/pointcloud.hpp"

#include <fmt/format.h>
#include <fmt/os.h>

#include <cmath>

#include "nvs/error.hpp"
#include "nvs/parallel.hpp"

namespace nvs {

void RgbdFrame::validate() const {
  intrinsics.validate();
  if (!color.same_shape(depth)) {
    throw DimensionError(fmt::format("color {}x{} and depth {}x{} differ", color.width(),
                                     color.height(), depth.width(), depth.height()));
  }
  if (color.width() != intrinsics.width || color.height() != intrinsics.height) {
    throw DimensionError(fmt::format("image {}x{} does not match intrinsics {}x{}", color.width(),
                                     color.height(), intrinsics.width, intrinsics.height));
  }
  for (double d : depth.data()) {
    if (!std::isfinite(d) || d < 0.0) {
      throw InvalidDepthError(fmt::format("depth image contains invalid value {}", d));
    }
  }
}

ColoredPointCloud cloud_from_rgbd(const RgbdFrame& frame, unsigned threads) {
  frame.validate();
  const int width = frame.depth.width();
  const int height = frame.depth.height();
  const CameraIntrinsics& k = frame.intrinsics;

  // Count valid pixels per row first so rows can be filled concurrently at fixed offsets.
  std::vector<std::size_t> row_offset(static_cast<std::size_t>(height) + 1, 0);
  for (int y = 0; y < height; ++y) {
    std::size_t n = 0;
    for (int x = 0; x < width; ++x) n += frame.depth(x, y) > 0.0 ? 1 : 0;
    row_offset[y + 1] = row_offset[y] + n;
  }

  ColoredPointCloud cloud;
  cloud.positions.resize(row_offset.back());
  cloud.colors.resize(row_offset.back());
  parallel_for_chunks(static_cast<std::size_t>(height), threads,
                      [&](std::size_t begin, std::size_t end) {
                        for (std::size_t y = begin; y < end; ++y) {
                          std::size_t out = row_offset[y];
                          const int row = static_cast<int>(y);
                          for (int x = 0; x < width; ++x) {
                            const double d = frame.depth(x, row);
                            if (!(d > 0.0)) continue;
                            cloud.positions[out] = unproject(x, row, d, k);
                            cloud.colors[out] = frame.color(x, row);
                            ++out;
                          }
                        }
                      });
  return cloud;
}

ColoredPointCloud transform_cloud(const ColoredPointCloud& cloud, const Pose& t) {
  ColoredPointCloud out;
  out.colors = cloud.colors;
  out.positions.reserve(cloud.size());
  for (const Point3& p : cloud.positions) out.positions.push_back(t.apply(p));
  return out;
}

void write_ply(const std::filesystem::path& path, const ColoredPointCloud& cloud) {
  try {
    auto file = fmt::output_file(path.string());
    file.print(
        "ply\nformat ascii 1.0\nelement vertex {}\n"
        "property float x\nproperty float y\nproperty float z\n"
        "property uchar red\nproperty uchar green\nproperty uchar blue\nend_header\n",
        cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
      const Point3& p = cloud.positions[i];
      const Rgb& c = cloud.colors[i];
      file.print("{} {} {} {} {} {}\n", static_cast<float>(p.x()), static_cast<float>(p.y()),
                 static_cast<float>(p.z()), c.r, c.g, c.b);
    }
  } catch (const std::system_error& e) {
    throw IoError(fmt::format("cannot write '{}': {}", path.string(), e.what()));
  }
}

}  // namespace nvs
