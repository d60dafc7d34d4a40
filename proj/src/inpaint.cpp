#include "nvs/inpaint.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "nvs/error.hpp"

namespace nvs {
namespace {

constexpr int kNone = -1;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Column candidate for the row sweep: nearest valid row in column `col` (upper one on ties).
struct ColumnHit {
  int row = kNone;
  std::int64_t dist2 = 0;  // squared vertical distance
};

// Largest integer x at which candidate q beats candidate r (q < r as columns) under the order
// (squared distance, source row, source column).
std::int64_t last_win(int q, const ColumnHit& hq, int r, const ColumnHit& hr) {
  // f_q(x) - f_r(x) = a*x + c with a > 0.
  const std::int64_t a = 2 * static_cast<std::int64_t>(r - q);
  const std::int64_t c = static_cast<std::int64_t>(q) * q - static_cast<std::int64_t>(r) * r +
                         hq.dist2 - hr.dist2;
  // q wins strictly where a*x < -c; at a*x == -c the lower source row (then column q) wins.
  const bool q_wins_tie = hq.row <= hr.row;
  const std::int64_t fl = floor_div(-c, a);
  if (q_wins_tie) return fl;
  return (fl * a == -c) ? fl - 1 : fl;
}

ColorImage fill_nearest(const ColorImage& color, const MaskImage& mask) {
  const int w = color.width();
  const int h = color.height();

  // Vertical pass: per pixel, the nearest valid row in the same column.
  std::vector<int> above(static_cast<std::size_t>(w) * h, kNone);
  std::vector<int> below(static_cast<std::size_t>(w) * h, kNone);
  for (int x = 0; x < w; ++x) {
    int last = kNone;
    for (int y = 0; y < h; ++y) {
      if (mask(x, y)) last = y;
      above[mask.index(x, y)] = last;
    }
    last = kNone;
    for (int y = h - 1; y >= 0; --y) {
      if (mask(x, y)) last = y;
      below[mask.index(x, y)] = last;
    }
  }

  ColorImage out = color;
  std::vector<ColumnHit> hits(w);
  std::vector<int> hull(w);
  std::vector<std::int64_t> bound(w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int up = above[mask.index(x, y)];
      const int down = below[mask.index(x, y)];
      ColumnHit hit;
      if (up != kNone) hit = {up, static_cast<std::int64_t>(y - up) * (y - up)};
      if (down != kNone) {
        const std::int64_t d2 = static_cast<std::int64_t>(down - y) * (down - y);
        if (hit.row == kNone || d2 < hit.dist2) hit = {down, d2};
      }
      hits[x] = hit;
    }

    // Lower envelope of the candidate parabolas; bound[j] is the last x won by hull[j].
    int size = 0;
    for (int col = 0; col < w; ++col) {
      if (hits[col].row == kNone) continue;
      while (size > 0) {
        const std::int64_t b = last_win(hull[size - 1], hits[hull[size - 1]], col, hits[col]);
        const std::int64_t prev = size > 1 ? bound[size - 2] : std::numeric_limits<std::int64_t>::min();
        if (b <= prev) {
          --size;
        } else {
          bound[size - 1] = b;
          break;
        }
      }
      hull[size] = col;
      bound[size] = std::numeric_limits<std::int64_t>::max();
      ++size;
    }
    if (size == 0) continue;  // unreachable when any pixel is valid

    int j = 0;
    for (int x = 0; x < w; ++x) {
      while (bound[j] < x) ++j;
      if (mask(x, y)) continue;
      const int col = hull[j];
      out(x, y) = color(col, hits[col].row);
    }
  }
  return out;
}

struct Level {
  int w = 0;
  int h = 0;
  std::vector<std::array<double, 3>> rgb;
  std::vector<double> weight;
};

ColorImage fill_pushpull(const ColorImage& color, const MaskImage& mask) {
  std::vector<Level> pyramid;
  Level base{color.width(), color.height(), {}, {}};
  base.rgb.resize(color.size());
  base.weight.resize(color.size());
  for (std::size_t i = 0; i < color.size(); ++i) {
    const double wgt = mask[i] ? 1.0 : 0.0;
    base.rgb[i] = {color[i].r * wgt, color[i].g * wgt, color[i].b * wgt};
    base.weight[i] = wgt;
  }
  pyramid.push_back(std::move(base));

  // Push: 2x2 weighted averages down to 1x1. rgb holds weighted sums divided by weight.
  auto normalized = [](const Level& l, std::size_t i) {
    std::array<double, 3> c = l.rgb[i];
    if (l.weight[i] > 0.0) {
      for (auto& v : c) v /= l.weight[i];
    }
    return c;
  };
  while (pyramid.back().w > 1 || pyramid.back().h > 1) {
    const Level& fine = pyramid.back();
    Level coarse{(fine.w + 1) / 2, (fine.h + 1) / 2, {}, {}};
    coarse.rgb.assign(static_cast<std::size_t>(coarse.w) * coarse.h, {0.0, 0.0, 0.0});
    coarse.weight.assign(coarse.rgb.size(), 0.0);
    for (int y = 0; y < fine.h; ++y) {
      for (int x = 0; x < fine.w; ++x) {
        const std::size_t fi = static_cast<std::size_t>(y) * fine.w + x;
        const std::size_t ci = static_cast<std::size_t>(y / 2) * coarse.w + x / 2;
        for (int c = 0; c < 3; ++c) coarse.rgb[ci][c] += fine.rgb[fi][c];
        coarse.weight[ci] += fine.weight[fi];
      }
    }
    pyramid.push_back(std::move(coarse));
  }

  // Pull: from the 1x1 level upward, holes take bilinear samples of the filled coarser level.
  std::vector<std::array<double, 3>> filled(1, normalized(pyramid.back(), 0));
  for (int li = static_cast<int>(pyramid.size()) - 2; li >= 0; --li) {
    const Level& fine = pyramid[li];
    const Level& coarse = pyramid[li + 1];
    std::vector<std::array<double, 3>> next(fine.rgb.size());
    for (int y = 0; y < fine.h; ++y) {
      for (int x = 0; x < fine.w; ++x) {
        const std::size_t fi = static_cast<std::size_t>(y) * fine.w + x;
        if (fine.weight[fi] > 0.0) {
          next[fi] = normalized(fine, fi);
          continue;
        }
        const double sx = std::clamp((x + 0.5) / 2.0 - 0.5, 0.0, coarse.w - 1.0);
        const double sy = std::clamp((y + 0.5) / 2.0 - 0.5, 0.0, coarse.h - 1.0);
        const int x0 = static_cast<int>(sx);
        const int y0 = static_cast<int>(sy);
        const int x1 = std::min(x0 + 1, coarse.w - 1);
        const int y1 = std::min(y0 + 1, coarse.h - 1);
        const double ax = sx - x0;
        const double ay = sy - y0;
        auto at = [&](int cx, int cy) { return filled[static_cast<std::size_t>(cy) * coarse.w + cx]; };
        for (int c = 0; c < 3; ++c) {
          next[fi][c] = (1 - ay) * ((1 - ax) * at(x0, y0)[c] + ax * at(x1, y0)[c]) +
                        ay * ((1 - ax) * at(x0, y1)[c] + ax * at(x1, y1)[c]);
        }
      }
    }
    filled = std::move(next);
  }

  ColorImage out = color;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (mask[i]) continue;
    auto to_u8 = [](double v) {
      return static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
    };
    out[i] = {to_u8(filled[i][0]), to_u8(filled[i][1]), to_u8(filled[i][2])};
  }
  return out;
}

}  // namespace

FillMethod parse_fill_method(std::string_view name) {
  if (name == "nearest") return FillMethod::kNearest;
  if (name == "pushpull") return FillMethod::kPushPull;
  throw Error(fmt::format("unknown fill method '{}' (expected nearest or pushpull)", name));
}

ColorImage fill_holes(const ColorImage& color, const MaskImage& mask, FillMethod method) {
  if (!color.same_shape(mask)) {
    throw DimensionError(fmt::format("color {}x{} and mask {}x{} differ", color.width(),
                                     color.height(), mask.width(), mask.height()));
  }
  const bool any_valid = std::any_of(mask.data().begin(), mask.data().end(),
                                     [](std::uint8_t m) { return m != 0; });
  if (!any_valid) throw AllHolesError("mask has no valid pixels to fill from");
  switch (method) {
    case FillMethod::kNearest: return fill_nearest(color, mask);
    case FillMethod::kPushPull: return fill_pushpull(color, mask);
  }
  throw Error("unknown fill method");
}

ColorImage fill_holes(const RenderOutput& r, FillMethod method) {
  return fill_holes(r.color, r.mask, method);
}

}  // namespace nvs
