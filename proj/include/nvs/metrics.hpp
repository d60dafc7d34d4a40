#pragma once

#include <optional>

#include "nvs/image.hpp"

namespace nvs {

inline constexpr int kSsimWindow = 8;

// PSNR in dB with peak 255, over all channels of the selected pixels. Identical selections
// give +infinity. Throws DimensionError or EmptySelectionError.
double psnr(const ColorImage& a, const ColorImage& b,
            const std::optional<MaskImage>& mask = std::nullopt);

// Mean SSIM on luma (0.299 R + 0.587 G + 0.114 B), uniform 8x8 window, stride 1.
double ssim(const ColorImage& a, const ColorImage& b);

// Fraction of nonzero mask pixels.
double coverage(const MaskImage& mask);

MaskImage invert_mask(const MaskImage& mask);

}  // namespace nvs
