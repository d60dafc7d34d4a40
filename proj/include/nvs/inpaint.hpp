#pragma once

#include <string_view>

#include "nvs/image.hpp"
#include "nvs/renderer.hpp"

namespace nvs {

enum class FillMethod {
  kNearest,   // color of the Euclidean-nearest valid pixel, ties broken by row-major order
  kPushPull,  // pyramid average down to 1x1, bilinear pull back into holes
};

// Parses "nearest" or "pushpull"; throws Error otherwise.
FillMethod parse_fill_method(std::string_view name);

// Valid pixels are returned untouched. Throws AllHolesError when nothing is valid.
ColorImage fill_holes(const ColorImage& color, const MaskImage& mask, FillMethod method);
ColorImage fill_holes(const RenderOutput& r, FillMethod method);

}  // namespace nvs
