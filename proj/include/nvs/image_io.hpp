#pragma once

#include <cstdint>
#include <filesystem>

#include "nvs/image.hpp"

namespace nvs {

enum class DepthEncoding {
  kMillimeters,  // 16-bit PNG, meters = raw / 1000
  kSun3d,        // raw value rotated right by 3 bits, then millimeters
};

// PNG or JPEG, any channel count; gray inputs are expanded to RGB.
ColorImage read_color(const std::filesystem::path& path);
void write_color_png(const std::filesystem::path& path, const ColorImage& image);

// 16-bit single-channel PNG.
DepthImage read_depth(const std::filesystem::path& path,
                      DepthEncoding encoding = DepthEncoding::kMillimeters);
// Millimeters, rounded, clamped to 65535; non-finite and non-positive depths become 0.
void write_depth_png(const std::filesystem::path& path, const DepthImage& depth);
std::uint16_t depth_to_millimeters(double meters);
double decode_depth_value(std::uint16_t raw, DepthEncoding encoding);

// 8-bit PNG with 255 = valid, 0 = hole. Reading treats any nonzero value as valid.
MaskImage read_mask(const std::filesystem::path& path);
void write_mask_png(const std::filesystem::path& path, const MaskImage& mask);

}  // namespace nvs
