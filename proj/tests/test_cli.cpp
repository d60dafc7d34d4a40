#include <doctest.h>

#include <fmt/format.h>
#include <sys/wait.h>

#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>

#include "nvs/dataset.hpp"
#include "nvs/image_io.hpp"
#include "support/synthetic.hpp"

using namespace nvs;
namespace fs = std::filesystem;
using nlohmann::json;

#ifndef NVS_CLI_PATH
#error "NVS_CLI_PATH must point at the nvs executable"
#endif

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = fmt::format("'{}' {} 2>/dev/null", NVS_CLI_PATH, args);
  Run r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

struct Workspace {
  fs::path root = testing::scratch_dir("cli");
  ~Workspace() { fs::remove_all(root); }
};

const char* kIdentity = "\"1 0 0 0 0 1 0 0 0 0 1 0\"";

}  // namespace

TEST_CASE("reproject subcommand") {
  Workspace ws;
  const auto seq = testing::make_sequence(ws.root, "s", 1, testing::default_intrinsics(40, 30));
  const std::string base = fmt::format("reproject --color {0}/color/00000.png --depth {0}/depth/00000.png "
                                       "--intrinsics {0}/intrinsics.txt",
                                       seq.string());

  SUBCASE("identity pose reproduces valid pixels") {
    const auto out = ws.root / "r";
    const Run r = run(fmt::format("{} --pose {} --splat-radius 0 --out {} --ply {}/c.ply --threads 2",
                                  base, kIdentity, out.string(), out.string()));
    REQUIRE(r.code == 0);
    const json stats = json::parse(r.out);
    for (const char* key : {"points_total", "points_drawn", "coverage"}) CHECK(stats.contains(key));
    const ColorImage in = read_color(seq / "color/00000.png");
    const DepthImage depth = read_depth(seq / "depth/00000.png");
    const ColorImage color = read_color(out / "color.png");
    const MaskImage mask = read_mask(out / "mask.png");
    const DepthImage zbuf = read_depth(out / "depth.png");
    for (std::size_t p = 0; p < in.size(); ++p) {
      REQUIRE(mask[p] == (depth[p] > 0 ? 1 : 0));
      if (mask[p]) {
        REQUIRE(color[p] == in[p]);
        REQUIRE(zbuf[p] == depth[p]);
      }
    }
    CHECK(stats["points_drawn"] == stats["points_total"]);
    CHECK(fs::exists(out / "c.ply"));
  }

  SUBCASE("pose file is accepted") {
    std::ofstream(ws.root / "pose.txt") << "1 0 0 0.05\n0 1 0 0\n0 0 1 0\n";
    CHECK(run(fmt::format("{} --pose-file {} --out {}", base, (ws.root / "pose.txt").string(),
                          (ws.root / "pf").string()))
              .code == 0);
  }

  SUBCASE("pose moves the novel camera, not the scene") {
    // Plane at 2 m, fx = 200: a camera 0.1 m to the right sees content 10 px further left.
    const auto plane = ws.root / "plane";
    fs::create_directories(plane);
    Rng rng(4);
    const ColorImage img = testing::random_color_image(40, 20, rng);
    write_color_png(plane / "c.png", img);
    write_depth_png(plane / "d.png", DepthImage(40, 20, 2.0));
    std::ofstream(plane / "K.txt") << "200 0 19.5\n0 200 9.5\n0 0 1\n";
    REQUIRE(run(fmt::format("reproject --color {0}/c.png --depth {0}/d.png --intrinsics {0}/K.txt "
                            "--pose \"1 0 0 0.1 0 1 0 0 0 0 1 0\" --splat-radius 0 --out {0}/o",
                            plane.string()))
                .code == 0);
    const ColorImage out = read_color(plane / "o/color.png");
    for (int y = 0; y < 20; ++y) {
      for (int x = 0; x + 10 < 40; ++x) REQUIRE(out(x, y) == img(x + 10, y));
    }
  }

  SUBCASE("usage errors exit with 2") {
    CHECK(run(fmt::format("reproject --color {0}/color/00000.png --intrinsics {0}/intrinsics.txt --pose {1}",
                          seq.string(), kIdentity))
              .code == 2);
    CHECK(run(fmt::format("{} --pose \"1 0 0\"", base)).code == 2);
    CHECK(run(fmt::format("{} --pose \"2 0 0 0 0 1 0 0 0 0 1 0\"", base)).code == 2);
    CHECK(run(fmt::format("{}", base)).code == 2);
    CHECK(run(fmt::format("{} --pose {} --splat-radius 17", base, kIdentity)).code == 2);
    CHECK(run("").code == 2);
    CHECK(run("bogus").code == 2);
  }

  SUBCASE("validation failures exit with 1") {
    // Intrinsics whose principal point lies outside the 40x30 image.
    std::ofstream(ws.root / "bad_k.txt") << "30 0 100\n0 30 10\n0 0 1\n";
    CHECK(run(fmt::format("reproject --color {0}/color/00000.png --depth {0}/depth/00000.png "
                          "--intrinsics {1} --pose {2} --out {3}",
                          seq.string(), (ws.root / "bad_k.txt").string(), kIdentity,
                          (ws.root / "x").string()))
              .code == 1);
  }
}

TEST_CASE("gen subcommands") {
  Workspace ws;
  const auto k = testing::default_intrinsics(24, 18);
  const auto a = testing::make_sequence(ws.root, "a", 6, k);
  const auto b = testing::make_sequence(ws.root, "b", 6, k, 2.0);
  const std::string seqs = fmt::format("--seq {} {}", a.string(), b.string());

  SUBCASE("paired") {
    const auto o1 = ws.root / "p1";
    const auto o2 = ws.root / "p2";
    const Run r1 = run(fmt::format("gen paired {} --pairs-per-seq 4 --max-gap 3 --seed 11 --out {} --threads 1",
                                   seqs, o1.string()));
    REQUIRE(r1.code == 0);
    CHECK(json::parse(r1.out)["records"] == 8);
    REQUIRE(run(fmt::format("gen paired {} --pairs-per-seq 4 --max-gap 3 --seed 11 --out {} --threads 3",
                            seqs, o2.string()))
                .code == 0);
    CHECK(read_manifest(o1 / "manifest.jsonl").size() == 8);
    CHECK(testing::read_tree(o1) == testing::read_tree(o2));
    CHECK(run(fmt::format("gen paired {} --max-gap 0 --out {}", seqs, (ws.root / "bad").string())).code == 2);
    CHECK(run(fmt::format("gen paired --seq {} --out {}", (ws.root / "missing").string(),
                          (ws.root / "bad2").string()))
              .code == 1);
  }

  SUBCASE("unpaired") {
    const auto o = ws.root / "u";
    const Run r = run(fmt::format("gen unpaired {} --count 5 --rot-deg 10 --trans-m 0.1 --seed 3 --out {}",
                                  seqs, o.string()));
    REQUIRE(r.code == 0);
    const auto lines = read_manifest(o / "manifest.jsonl");
    REQUIRE(lines.size() == 5);
    for (const auto& line : lines) {
      CHECK(std::abs(line["perturbation_params"]["yaw_deg"].get<double>()) <= 10.0);
      CHECK(std::abs(line["perturbation_params"]["tx"].get<double>()) <= 0.1);
    }
    CHECK(run(fmt::format("gen unpaired {} --count 0 --out {}", seqs, o.string())).code == 2);
  }
}

TEST_CASE("eval subcommand") {
  Workspace ws;
  const auto pred = ws.root / "pred";
  const auto truth = ws.root / "truth";
  const auto mask = ws.root / "mask";
  for (const auto& d : {pred, truth, mask}) fs::create_directories(d);

  SUBCASE("empty directories fail") {
    CHECK(run(fmt::format("eval --pred {} --truth {} --out {}", pred.string(), truth.string(),
                          (ws.root / "r.json").string()))
              .code == 1);
  }

  SUBCASE("identical directories") {
    Rng rng(1);
    for (const char* name : {"x.png", "y.png"}) {
      const ColorImage img = testing::random_color_image(16, 12, rng);
      write_color_png(pred / name, img);
      write_color_png(truth / name, img);
    }
    const Run r = run(fmt::format("eval --pred {} --truth {} --out {}", pred.string(), truth.string(),
                                  (ws.root / "r.json").string()));
    REQUIRE(r.code == 0);
    const json report = read_json(ws.root / "r.json");
    CHECK(report["aggregate"]["psnr"] == "inf");
    CHECK(report["aggregate"]["ssim"] == 1.0);
    CHECK(report["items"].size() == 2);
    CHECK(json::parse(r.out)["psnr"] == "inf");
  }

  SUBCASE("all-0 versus all-128 with a mask") {
    write_color_png(pred / "f.png", ColorImage(10, 10, {0, 0, 0}));
    write_color_png(truth / "f.png", ColorImage(10, 10, {128, 128, 128}));
    MaskImage m(10, 10, 1);
    for (int x = 0; x < 10; ++x) m(x, 0) = 0;
    write_mask_png(mask / "f.png", m);
    REQUIRE(run(fmt::format("eval --pred {} --truth {} --mask {} --out {}", pred.string(), truth.string(),
                            mask.string(), (ws.root / "r.json").string()))
                .code == 0);
    const json report = read_json(ws.root / "r.json");
    const json& item = report["items"][0];
    CHECK(item["psnr"].get<double>() == doctest::Approx(5.9865).epsilon(1e-4));
    CHECK(std::abs(item["psnr"].get<double>() - 5.992) < 0.01);
    CHECK(item["psnr_holes_only"].get<double>() == doctest::Approx(item["psnr"].get<double>()));
    CHECK(item["coverage"].get<double>() == doctest::Approx(0.9));
  }

  SUBCASE("unmatched files fail") {
    write_color_png(pred / "a.png", ColorImage(4, 4));
    write_color_png(truth / "b.png", ColorImage(4, 4));
    CHECK(run(fmt::format("eval --pred {} --truth {} --out {}", pred.string(), truth.string(),
                          (ws.root / "r.json").string()))
              .code == 1);
  }
}

TEST_CASE("fill subcommand") {
  Workspace ws;
  const auto color = ws.root / "c.png";
  const auto mask = ws.root / "m.png";
  const auto out = ws.root / "o.png";
  ColorImage img(3, 1);
  img(0, 0) = {255, 0, 0};
  img(2, 0) = {255, 0, 0};
  MaskImage m(3, 1, 1);
  m(1, 0) = 0;
  write_color_png(color, img);
  write_mask_png(mask, m);
  for (const char* method : {"nearest", "pushpull"}) {
    REQUIRE(run(fmt::format("fill --color {} --mask {} --method {} --out {}", color.string(),
                            mask.string(), method, out.string()))
                .code == 0);
    CHECK(read_color(out)(1, 0) == Rgb{255, 0, 0});
  }
  write_mask_png(mask, MaskImage(3, 1, 1));
  REQUIRE(run(fmt::format("fill --color {} --mask {} --out {}", color.string(), mask.string(), out.string()))
              .code == 0);
  CHECK(read_color(out) == img);

  write_mask_png(mask, MaskImage(3, 1, 0));
  CHECK(run(fmt::format("fill --color {} --mask {} --out {}", color.string(), mask.string(), out.string()))
            .code == 1);
  CHECK(run(fmt::format("fill --color {} --mask {} --method magic --out {}", color.string(), mask.string(),
                        out.string()))
            .code == 2);
}
