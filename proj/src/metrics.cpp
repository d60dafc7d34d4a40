#include "nvs/metrics.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>
#include <vector>

#include "nvs/error.hpp"

namespace nvs {
namespace {

void require_same_shape(const ColorImage& a, const ColorImage& b) {
  if (!a.same_shape(b)) {
    throw DimensionError(fmt::format("image sizes differ: {}x{} vs {}x{}", a.width(), a.height(),
                                     b.width(), b.height()));
  }
}

std::vector<double> luma(const ColorImage& img) {
  std::vector<double> y(img.size());
  for (std::size_t i = 0; i < img.size(); ++i) {
    y[i] = 0.299 * img[i].r + 0.587 * img[i].g + 0.114 * img[i].b;
  }
  return y;
}

}  // namespace

double psnr(const ColorImage& a, const ColorImage& b, const std::optional<MaskImage>& mask) {
  require_same_shape(a, b);
  if (mask && !a.same_shape(*mask)) {
    throw DimensionError(fmt::format("mask {}x{} does not match images {}x{}", mask->width(),
                                     mask->height(), a.width(), a.height()));
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (mask && !(*mask)[i]) continue;
    const double dr = a[i].r - b[i].r;
    const double dg = a[i].g - b[i].g;
    const double db = a[i].b - b[i].b;
    sum += dr * dr + dg * dg + db * db;
    count += 3;
  }
  if (count == 0) throw EmptySelectionError("PSNR mask selects no pixels");
  if (sum == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = sum / static_cast<double>(count);
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double ssim(const ColorImage& a, const ColorImage& b) {
  require_same_shape(a, b);
  const int w = a.width();
  const int h = a.height();
  if (w < kSsimWindow || h < kSsimWindow) {
    throw DimensionError(fmt::format("SSIM needs at least {0}x{0} pixels, got {1}x{2}",
                                     kSsimWindow, w, h));
  }
  const std::vector<double> ya = luma(a);
  const std::vector<double> yb = luma(b);
  constexpr double c1 = (0.01 * 255.0) * (0.01 * 255.0);
  constexpr double c2 = (0.03 * 255.0) * (0.03 * 255.0);
  constexpr double n = kSsimWindow * kSsimWindow;
  double total = 0.0;
  std::size_t windows = 0;
  for (int y = 0; y + kSsimWindow <= h; ++y) {
    for (int x = 0; x + kSsimWindow <= w; ++x) {
      double sum_a = 0.0;
      double sum_b = 0.0;
      for (int dy = 0; dy < kSsimWindow; ++dy) {
        const std::size_t row = static_cast<std::size_t>(y + dy) * w + x;
        for (int dx = 0; dx < kSsimWindow; ++dx) {
          sum_a += ya[row + dx];
          sum_b += yb[row + dx];
        }
      }
      const double mu_a = sum_a / n;
      const double mu_b = sum_b / n;
      double var_a = 0.0;
      double var_b = 0.0;
      double cov = 0.0;
      for (int dy = 0; dy < kSsimWindow; ++dy) {
        const std::size_t row = static_cast<std::size_t>(y + dy) * w + x;
        for (int dx = 0; dx < kSsimWindow; ++dx) {
          const double da = ya[row + dx] - mu_a;
          const double db = yb[row + dx] - mu_b;
          var_a += da * da;
          var_b += db * db;
          cov += da * db;
        }
      }
      var_a /= n;
      var_b /= n;
      cov /= n;
      total += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
               ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
      ++windows;
    }
  }
  return total / static_cast<double>(windows);
}

double coverage(const MaskImage& mask) {
  if (mask.empty()) return 0.0;
  std::size_t valid = 0;
  for (auto m : mask.data()) valid += m ? 1 : 0;
  return static_cast<double>(valid) / static_cast<double>(mask.size());
}

MaskImage invert_mask(const MaskImage& mask) {
  MaskImage out(mask.width(), mask.height());
  for (std::size_t i = 0; i < mask.size(); ++i) out[i] = mask[i] ? 0 : 1;
  return out;
}

}  // namespace nvs
