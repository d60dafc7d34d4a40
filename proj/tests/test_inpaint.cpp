#include <doctest.h>

#include <algorithm>
#include <set>

#include "nvs/error.hpp"
#include "nvs/inpaint.hpp"
#include "support/synthetic.hpp"

using namespace nvs;

namespace {

constexpr Rgb kRed{255, 0, 0};

// O(N^2) reference: minimize (squared distance, row, column) over valid pixels.
ColorImage brute_force_nearest(const ColorImage& color, const MaskImage& mask) {
  ColorImage out = color;
  for (int y = 0; y < color.height(); ++y) {
    for (int x = 0; x < color.width(); ++x) {
      if (mask(x, y)) continue;
      long best = -1;
      int by = 0, bx = 0;
      for (int yy = 0; yy < color.height(); ++yy) {
        for (int xx = 0; xx < color.width(); ++xx) {
          if (!mask(xx, yy)) continue;
          const long d = static_cast<long>(xx - x) * (xx - x) + static_cast<long>(yy - y) * (yy - y);
          if (best < 0 || d < best) {
            best = d;
            bx = xx;
            by = yy;
          }
        }
      }
      out(x, y) = color(bx, by);
    }
  }
  return out;
}

MaskImage random_mask(int w, int h, Rng& rng, std::uint64_t hole_per_mille) {
  MaskImage m(w, h);
  for (auto& v : m.data()) v = rng.uniform_index(1000) < hole_per_mille ? 0 : 1;
  if (std::none_of(m.data().begin(), m.data().end(), [](auto v) { return v != 0; })) {
    m[rng.uniform_index(m.size())] = 1;
  }
  return m;
}

}  // namespace

TEST_CASE("fill method names") {
  CHECK(parse_fill_method("nearest") == FillMethod::kNearest);
  CHECK(parse_fill_method("pushpull") == FillMethod::kPushPull);
  CHECK_THROWS_AS(parse_fill_method("diffusion"), Error);
}

TEST_CASE("complete images are returned unchanged") {
  Rng rng(1);
  const ColorImage img = testing::random_color_image(13, 7, rng);
  const MaskImage full(13, 7, 1);
  for (auto m : {FillMethod::kNearest, FillMethod::kPushPull}) CHECK(fill_holes(img, full, m) == img);
}

TEST_CASE("a hole between two red pixels becomes red") {
  ColorImage img(3, 1);
  img(0, 0) = kRed;
  img(2, 0) = kRed;
  MaskImage mask(3, 1, 1);
  mask(1, 0) = 0;
  for (auto m : {FillMethod::kNearest, FillMethod::kPushPull}) {
    CHECK(fill_holes(img, mask, m)(1, 0) == kRed);
  }
}

TEST_CASE("a single valid pixel floods the image") {
  for (auto [w, h] : {std::pair{9, 5}, std::pair{1, 1}, std::pair{1, 12}, std::pair{17, 1}}) {
    ColorImage img(w, h, {1, 1, 1});
    MaskImage mask(w, h, 0);
    img(w / 2, h / 2) = {12, 34, 56};
    mask(w / 2, h / 2) = 1;
    const ColorImage filled = fill_holes(img, mask, FillMethod::kNearest);
    CHECK(std::all_of(filled.data().begin(), filled.data().end(),
                      [](Rgb c) { return c == Rgb{12, 34, 56}; }));
    const ColorImage pp = fill_holes(img, mask, FillMethod::kPushPull);
    CHECK(std::all_of(pp.data().begin(), pp.data().end(),
                      [](Rgb c) { return c == Rgb{12, 34, 56}; }));
  }
}

TEST_CASE("all-hole masks are rejected") {
  const ColorImage img(4, 4);
  const MaskImage mask(4, 4, 0);
  CHECK_THROWS_AS(fill_holes(img, mask, FillMethod::kNearest), AllHolesError);
  CHECK_THROWS_AS(fill_holes(img, mask, FillMethod::kPushPull), AllHolesError);
  CHECK_THROWS_AS(fill_holes(img, MaskImage(3, 4, 1), FillMethod::kNearest), DimensionError);
}

TEST_CASE("nearest fill breaks equal-distance ties by row-major order") {
  // Hole at (1,1) is at distance 1 from (1,0), (0,1), (2,1) and (1,2): (1,0) comes first.
  ColorImage img(3, 3);
  MaskImage mask(3, 3, 0);
  const std::pair<int, int> valid[] = {{1, 0}, {0, 1}, {2, 1}, {1, 2}};
  std::uint8_t shade = 10;
  for (auto [x, y] : valid) {
    mask(x, y) = 1;
    img(x, y) = {shade, shade, shade};
    shade += 10;
  }
  const ColorImage out = fill_holes(img, mask, FillMethod::kNearest);
  CHECK(out(1, 1) == Rgb{10, 10, 10});
  // (0,0): (1,0) and (0,1) tie at distance 1; row 0 wins.
  CHECK(out(0, 0) == Rgb{10, 10, 10});
  // (2,2): (2,1) and (1,2) tie; row 1 wins.
  CHECK(out(2, 2) == Rgb{30, 30, 30});
}

TEST_CASE("nearest fill matches exhaustive search") {
  Rng rng(555);
  for (int i = 0; i < 300; ++i) {
    const int w = 1 + static_cast<int>(rng.uniform_index(24));
    const int h = 1 + static_cast<int>(rng.uniform_index(24));
    // Few distinct colors make wrong tie-breaking visible.
    ColorImage img(w, h);
    for (auto& c : img.data()) {
      const auto s = static_cast<std::uint8_t>(rng.uniform_index(4) * 60);
      c = {s, static_cast<std::uint8_t>(rng.uniform_index(256)), s};
    }
    const MaskImage mask = random_mask(w, h, rng, 1 + rng.uniform_index(999));
    REQUIRE(fill_holes(img, mask, FillMethod::kNearest) == brute_force_nearest(img, mask));
  }
}

TEST_CASE("fill preserves valid pixels and nearest draws only from valid colors") {
  Rng rng(808);
  for (int i = 0; i < 60; ++i) {
    const int w = 1 + static_cast<int>(rng.uniform_index(40));
    const int h = 1 + static_cast<int>(rng.uniform_index(40));
    const ColorImage img = testing::random_color_image(w, h, rng);
    const MaskImage mask = random_mask(w, h, rng, rng.uniform_index(1000));
    std::set<std::uint32_t> palette;
    for (std::size_t p = 0; p < img.size(); ++p) {
      if (mask[p]) palette.insert(img[p].r << 16 | img[p].g << 8 | img[p].b);
    }
    for (auto method : {FillMethod::kNearest, FillMethod::kPushPull}) {
      const ColorImage out = fill_holes(img, mask, method);
      for (std::size_t p = 0; p < img.size(); ++p) {
        if (mask[p]) REQUIRE(out[p] == img[p]);
        if (method == FillMethod::kNearest) {
          REQUIRE(palette.contains(out[p].r << 16 | out[p].g << 8 | out[p].b));
        }
      }
      // Filling the filled image again changes nothing.
      REQUIRE(fill_holes(out, MaskImage(w, h, 1), method) == out);
    }
  }
}

TEST_CASE("push-pull blends across a hole") {
  // Left half black, right half white, a hole column in the middle gets an intermediate value.
  ColorImage img(8, 8);
  MaskImage mask(8, 8, 1);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) img(x, y) = x < 4 ? Rgb{0, 0, 0} : Rgb{200, 200, 200};
    mask(3, y) = 0;
    mask(4, y) = 0;
  }
  const ColorImage out = fill_holes(img, mask, FillMethod::kPushPull);
  for (int y = 0; y < 8; ++y) {
    CHECK(out(3, y).r > 0);
    CHECK(out(4, y).r < 200);
    CHECK(out(3, y).r <= out(4, y).r);
  }
}
