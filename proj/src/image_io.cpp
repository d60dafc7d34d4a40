#include "nvs/image_io.hpp"

#include <fmt/format.h>

#include <cmath>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "nvs/error.hpp"

namespace nvs {
namespace {

cv::Mat read_unchanged(const std::filesystem::path& path) {
  cv::Mat m = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (m.empty()) throw IoError(fmt::format("cannot read image '{}'", path.string()));
  return m;
}

void write_mat(const std::filesystem::path& path, const cv::Mat& m) {
  // Level 6 zlib output is stable across runs, which keeps generated datasets byte-identical.
  const std::vector<int> params{cv::IMWRITE_PNG_COMPRESSION, 6};
  bool ok = false;
  try {
    ok = cv::imwrite(path.string(), m, params);
  } catch (const cv::Exception& e) {
    throw IoError(fmt::format("cannot write '{}': {}", path.string(), e.what()));
  }
  if (!ok) throw IoError(fmt::format("cannot write '{}'", path.string()));
}

}  // namespace

ColorImage read_color(const std::filesystem::path& path) {
  cv::Mat m = read_unchanged(path);
  if (m.depth() != CV_8U) {
    cv::Mat scaled;
    m.convertTo(scaled, CV_8U, m.depth() == CV_16U ? 1.0 / 257.0 : 1.0);
    m = scaled;
  }
  cv::Mat rgb;
  switch (m.channels()) {
    case 1: cv::cvtColor(m, rgb, cv::COLOR_GRAY2RGB); break;
    case 3: cv::cvtColor(m, rgb, cv::COLOR_BGR2RGB); break;
    case 4: cv::cvtColor(m, rgb, cv::COLOR_BGRA2RGB); break;
    default:
      throw IoError(fmt::format("'{}' has unsupported channel count {}", path.string(),
                                m.channels()));
  }
  ColorImage out(rgb.cols, rgb.rows);
  for (int y = 0; y < rgb.rows; ++y) {
    const auto* row = rgb.ptr<cv::Vec3b>(y);
    for (int x = 0; x < rgb.cols; ++x) out(x, y) = {row[x][0], row[x][1], row[x][2]};
  }
  return out;
}

void write_color_png(const std::filesystem::path& path, const ColorImage& image) {
  cv::Mat bgr(image.height(), image.width(), CV_8UC3);
  for (int y = 0; y < image.height(); ++y) {
    auto* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < image.width(); ++x) {
      const Rgb& c = image(x, y);
      row[x] = {c.b, c.g, c.r};
    }
  }
  write_mat(path, bgr);
}

double decode_depth_value(std::uint16_t raw, DepthEncoding encoding) {
  std::uint16_t mm = raw;
  if (encoding == DepthEncoding::kSun3d) {
    mm = static_cast<std::uint16_t>((raw >> 3) | (raw << 13));
  }
  return static_cast<double>(mm) / 1000.0;
}

std::uint16_t depth_to_millimeters(double meters) {
  if (!std::isfinite(meters) || meters <= 0.0) return 0;
  const double mm = std::round(meters * 1000.0);
  return mm >= 65535.0 ? std::uint16_t{65535} : static_cast<std::uint16_t>(mm);
}

DepthImage read_depth(const std::filesystem::path& path, DepthEncoding encoding) {
  const cv::Mat m = read_unchanged(path);
  if (m.channels() != 1 || m.depth() != CV_16U) {
    throw IoError(fmt::format("'{}' is not a single-channel 16-bit depth PNG", path.string()));
  }
  DepthImage out(m.cols, m.rows);
  for (int y = 0; y < m.rows; ++y) {
    const auto* row = m.ptr<std::uint16_t>(y);
    for (int x = 0; x < m.cols; ++x) out(x, y) = decode_depth_value(row[x], encoding);
  }
  return out;
}

void write_depth_png(const std::filesystem::path& path, const DepthImage& depth) {
  cv::Mat m(depth.height(), depth.width(), CV_16UC1);
  for (int y = 0; y < depth.height(); ++y) {
    auto* row = m.ptr<std::uint16_t>(y);
    for (int x = 0; x < depth.width(); ++x) row[x] = depth_to_millimeters(depth(x, y));
  }
  write_mat(path, m);
}

MaskImage read_mask(const std::filesystem::path& path) {
  cv::Mat m = read_unchanged(path);
  if (m.channels() != 1) {
    cv::Mat gray;
    cv::cvtColor(m, gray, m.channels() == 4 ? cv::COLOR_BGRA2GRAY : cv::COLOR_BGR2GRAY);
    m = gray;
  }
  MaskImage out(m.cols, m.rows);
  for (int y = 0; y < m.rows; ++y) {
    for (int x = 0; x < m.cols; ++x) {
      const bool valid = m.depth() == CV_16U ? m.at<std::uint16_t>(y, x) != 0
                                             : m.at<std::uint8_t>(y, x) != 0;
      out(x, y) = valid ? 1 : 0;
    }
  }
  return out;
}

void write_mask_png(const std::filesystem::path& path, const MaskImage& mask) {
  cv::Mat m(mask.height(), mask.width(), CV_8UC1);
  for (int y = 0; y < mask.height(); ++y) {
    auto* row = m.ptr<std::uint8_t>(y);
    for (int x = 0; x < mask.width(); ++x) row[x] = mask(x, y) ? 255 : 0;
  }
  write_mat(path, m);
}

}  // namespace nvs
