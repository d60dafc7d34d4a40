#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "nvs/geometry.hpp"
#include "nvs/image.hpp"

namespace nvs {

struct RgbdFrame {
  ColorImage color;
  DepthImage depth;
  CameraIntrinsics intrinsics;
  Pose pose;  // camera-to-world
  int frame_index = 0;
  std::optional<double> timestamp;

  // Throws DimensionError / InvalidDepthError / CalibrationError.
  void validate() const;
};

// Positions and colors are stored as parallel arrays, one entry per point.
struct ColoredPointCloud {
  std::vector<Point3> positions;
  std::vector<Rgb> colors;

  std::size_t size() const { return positions.size(); }
  bool empty() const { return positions.empty(); }
  void reserve(std::size_t n) {
    positions.reserve(n);
    colors.reserve(n);
  }
  void push_back(const Point3& p, Rgb c) {
    positions.push_back(p);
    colors.push_back(c);
  }
};

// One point per strictly positive depth pixel, in row-major order, in the source camera frame.
ColoredPointCloud cloud_from_rgbd(const RgbdFrame& frame, unsigned threads = 1);

ColoredPointCloud transform_cloud(const ColoredPointCloud& cloud, const Pose& t);

// ASCII PLY: float x,y,z and uchar red,green,blue per vertex.
void write_ply(const std::filesystem::path& path, const ColoredPointCloud& cloud);

}  // namespace nvs
