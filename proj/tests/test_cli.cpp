#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "syncvision/cli.hpp"
#include "syncvision/image.hpp"
#include "syncvision/random.hpp"
#include "syncvision/synthbench.hpp"
#include "tmpdir.hpp"

using namespace syncvision;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliRun {
  int code;
  std::string out, err;
};

CliRun run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

fs::path write_scene(const TempDir& dir, const std::string& name, int size, std::uint64_t seed) {
  SceneConfig sc = SceneConfig{}.scaled_to(size);
  sc.seed = seed;
  const fs::path p = dir / name;
  save_image(generate_crater_scene(sc), p);
  return p;
}

}  // namespace

TEST(CliRegister, WritesOutputsAndIsByteStable) {
  TempDir dir("cli_reg");
  const fs::path img = write_scene(dir, "a.png", 256, 3);
  for (const char* m : {"sift", "orb", "intfeat"}) {
    const fs::path o1 = dir / (std::string(m) + "1"), o2 = dir / (std::string(m) + "2");
    const CliRun a = run({"register", img.string(), img.string(), "--method", m, "--out", o1.string()});
    ASSERT_EQ(a.code, 0) << a.err;
    const CliRun b = run({"register", img.string(), img.string(), "--method", m, "--out", o2.string()});
    ASSERT_EQ(b.code, 0);
    EXPECT_TRUE(fs::exists(o1 / "registered.png"));
    EXPECT_EQ(slurp(o1 / "report.json"), slurp(o2 / "report.json"));
    EXPECT_EQ(slurp(o1 / "registered.png"), slurp(o2 / "registered.png"));
    const json r = json::parse(slurp(o1 / "report.json"));
    EXPECT_EQ(r["status"], "OK");
    EXPECT_EQ(r["homography"].size(), 9u);
    EXPECT_EQ(r["interp"], "NONE");
    EXPECT_FALSE(r.contains("runtime_ms"));
  }
}

TEST(CliRegister, BlankInputsExitTwoWithoutImage) {
  TempDir dir("cli_blank");
  save_image(Image(64, 64, 0.5f), dir / "b.png");
  const CliRun r = run({"register", (dir / "b.png").string(), (dir / "b.png").string(), "--out", (dir / "o").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_FALSE(fs::exists(dir / "o" / "registered.png"));
  const json j = json::parse(slurp(dir / "o" / "report.json"));
  EXPECT_EQ(j["status"], "TOO_FEW_FEATURES");
  EXPECT_TRUE(j["homography"].is_null());
}

TEST(CliRegister, TimingsAndInterp) {
  TempDir dir("cli_interp");
  const fs::path high = write_scene(dir, "high.png", 256, 4);
  save_image(box_downsample(load_image(high), 2), dir / "low.png");
  const CliRun r = run({"register", (dir / "low.png").string(), high.string(), "--interp", "bicubic", "--method", "sift",
                     "--timings", "--out", (dir / "o").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(slurp(dir / "o" / "report.json"));
  EXPECT_EQ(j["interp"], "BICUBIC");
  EXPECT_TRUE(j.contains("runtime_ms"));
  EXPECT_EQ(run({"register", "x.png", "y.png"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"register", "missing1.png", "missing2.png", "--out", (dir / "m").string()}).code, cli::kExitIo);
}

TEST(CliUpscale, ShapesAndIdentity) {
  TempDir dir("cli_up");
  Rng rng(1);
  std::vector<float> d(128 * 128);
  for (float& v : d) v = static_cast<float>(rng.uniform());
  save_image(Image(128, 128, d), dir / "in.png");
  const CliRun r = run({"upscale", (dir / "in.png").string(), "--factor", "8", "--interp", "bicubic"});
  ASSERT_EQ(r.code, 0) << r.err;
  const Image up = load_image(dir / "in_upscaled.png");
  EXPECT_EQ(up.width(), 1024);
  EXPECT_EQ(up.height(), 1024);
  ASSERT_EQ(run({"upscale", (dir / "in.png").string(), "--factor", "1", "--out", (dir / "same.png").string()}).code, 0);
  EXPECT_EQ(slurp(dir / "same.png"), slurp(dir / "in.png"));
  EXPECT_EQ(run({"upscale", (dir / "in.png").string(), "--factor", "2", "--interp", "lanczos"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"upscale", (dir / "in.png").string(), "--factor", "-2"}).code, cli::kExitUsage);
}

TEST(CliBench, SyntheticRowsAndReruns) {
  TempDir dir("cli_bench");
  const std::vector<std::string> args{"bench", "--synth", "--pairs", "1", "--size", "256", "--ratio", "2", "--out",
                                      (dir / "o").string()};
  const CliRun a = run(args), b = run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  std::istringstream in(a.out);
  std::string line;
  int n = 0;
  while (std::getline(in, line)) ++n;
  EXPECT_EQ(n, 7);
  EXPECT_EQ(slurp(dir / "o" / "bench.csv"), a.out);
  const json j = json::parse(slurp(dir / "o" / "bench.json"));
  EXPECT_EQ(j["rows"].size(), 6u);
  const CliRun js = run({"bench", "--synth", "--pairs", "1", "--size", "256", "--ratio", "2", "--methods", "sift",
                      "--interps", "bilinear", "--format", "json"});
  ASSERT_EQ(js.code, 0);
  EXPECT_EQ(json::parse(js.out)["rows"].size(), 1u);
  EXPECT_EQ(run({"bench"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"bench", "--synth", "--dir", dir.path.string()}).code, cli::kExitUsage);
}

TEST(CliBench, DirectoryOfPairs) {
  TempDir dir("cli_bdir");
  for (const char* p : {"p1", "p2"}) {
    const CliRun s = run({"synth", "--out", (dir / "set" / p).string(), "--size", "256", "--pair", "--ratio", "2",
                       "--seed", p[1] == '1' ? "5" : "6"});
    ASSERT_EQ(s.code, 0) << s.err;
  }
  const CliRun r = run({"bench", "--dir", (dir / "set").string(), "--methods", "sift", "--interps", "bicubic",
                     "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  ASSERT_EQ(j["rows"].size(), 1u);
  EXPECT_EQ(j["rows"][0]["runs"], 2);
  fs::create_directories(dir / "empty");
  EXPECT_EQ(run({"bench", "--dir", (dir / "empty").string()}).code, cli::kExitIo);
}

TEST(CliMetrics, KnownValues) {
  TempDir dir("cli_met");
  save_image(Image(32, 32, 1.0f), dir / "w.png");
  save_image(Image(32, 32, 0.0f), dir / "k.png");
  save_image(Image(16, 32, 0.0f), dir / "s.png");
  const CliRun same = run({"metrics", (dir / "w.png").string(), (dir / "w.png").string()});
  ASSERT_EQ(same.code, 0) << same.err;
  const json a = json::parse(same.out);
  EXPECT_EQ(a["psnr_db"], "inf");
  EXPECT_DOUBLE_EQ(a["ssim"].get<double>(), 1.0);
  const json b = json::parse(run({"metrics", (dir / "w.png").string(), (dir / "k.png").string()}).out);
  EXPECT_NEAR(b["psnr_db"].get<double>(), 0.0, 1e-12);
  EXPECT_NEAR(b["mse"].get<double>(), 65025.0, 1e-9);
  EXPECT_EQ(run({"metrics", (dir / "w.png").string(), (dir / "s.png").string()}).code, cli::kExitIo);
}

TEST(CliSynth, DeterministicFiles) {
  TempDir dir("cli_syn");
  for (const char* o : {"a", "b"})
    ASSERT_EQ(run({"synth", "--out", (dir / o).string(), "--seed", "9", "--size", "128", "--pair", "--ratio", "4"}).code, 0);
  for (const char* f : {"scene.png", "scene.json", "low.png", "high.png", "homography.json"})
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  EXPECT_EQ(load_image(dir / "a" / "low.png").width(), 32);
  EXPECT_EQ(run({"synth", "--out", (dir / "c").string(), "--elevation", "0"}).code, cli::kExitUsage);
}

TEST(CliGeo, Subcommands) {
  TempDir dir("cli_geo");
  const CliRun h = run({"geo", "haversine", "--from", "0,0", "--to", "0,90", "--radius", "1"});
  ASSERT_EQ(h.code, 0) << h.err;
  EXPECT_NEAR(json::parse(h.out)["distance_km"].get<double>(), 1.5707963267948966, 1e-12);

  write_file(dir / "pairs.csv", "src_x,src_y,dst_x,dst_y\n0,0,0,0\n1,0,1,0\n0,1,0,1\n2,3,2,3\n");
  const json a = json::parse(run({"geo", "affine", "--pairs", (dir / "pairs.csv").string()}).out);
  EXPECT_NEAR(a["matrix"][0][0].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(a["matrix"][1][2].get<double>(), 0.0, 1e-12);

  write_file(dir / "pts.csv", "x,y\n10,5\n50,8\n47,40\n-3,33\n");
  const json b = json::parse(run({"geo", "bbox", "--points", (dir / "pts.csv").string()}).out);
  EXPECT_EQ(b.dump(), json::parse(run({"geo", "bbox", "--points", (dir / "pts.csv").string()}).out).dump());

  write_file(dir / "grid.csv", "row,col,lat_deg,lon_deg\n0,0,0,0\n0,1,0,1\n");
  write_file(dir / "corners.csv", "name,lat_deg,lon_deg\nc0,0,0.9\n");
  const CliRun n = run({"geo", "nearest", "--corners", (dir / "corners.csv").string(), "--grid", (dir / "grid.csv").string()});
  ASSERT_EQ(n.code, 0) << n.err;
  EXPECT_NE(n.out.find("100"), std::string::npos);

  write_file(dir / "bad.csv", "src_x,src_y,dst_x,dst_y\n0,0,zero,0\n");
  EXPECT_EQ(run({"geo", "affine", "--pairs", (dir / "bad.csv").string()}).code, cli::kExitData);
  write_file(dir / "hdr.csv", "a,b,c,d\n0,0,0,0\n");
  EXPECT_EQ(run({"geo", "affine", "--pairs", (dir / "hdr.csv").string()}).code, cli::kExitData);
}

TEST(Cli, HelpExitsZeroEverywhere) {
  EXPECT_EQ(run({"--help"}).code, 0);
  for (const char* sub : {"register", "upscale", "bench", "metrics", "synth", "geo"}) EXPECT_EQ(run({sub, "--help"}).code, 0) << sub;
  for (const char* sub : {"haversine", "bbox", "affine", "nearest"}) EXPECT_EQ(run({"geo", sub, "--help"}).code, 0) << sub;
  EXPECT_EQ(run({}).code, cli::kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitUsage);
}
