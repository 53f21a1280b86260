#include "syncvision/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "syncvision/error.hpp"
#include "syncvision/geo.hpp"
#include "syncvision/image.hpp"
#include "syncvision/metrics.hpp"
#include "syncvision/pipeline.hpp"
#include "syncvision/serialize.hpp"
#include "syncvision/synthbench.hpp"

namespace fs = std::filesystem;

namespace syncvision::cli {

namespace {

struct CliError : std::runtime_error {
  int code;
  CliError(int c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

[[noreturn]] void usage(const std::string& msg) { throw CliError(kExitUsage, msg); }
[[noreturn]] void data_error(const std::string& msg) { throw CliError(kExitData, msg); }
[[noreturn]] void io_error(const std::string& msg) { throw CliError(kExitIo, msg); }

const std::map<std::string, std::string> kMethodNames{{"sift", "sift"}, {"orb", "orb"}, {"intfeat", "intfeat"}};
const std::map<std::string, std::string> kInterpNames{{"bilinear", "bilinear"}, {"bicubic", "bicubic"}};

// ------------------------------------------------------------------ helpers

Image read_image(const std::string& path) {
  try {
    return load_image(path);
  } catch (const std::exception& e) {
    io_error(e.what());
  }
}

void write_image(const Image& img, const fs::path& path) {
  try {
    save_image(img, path);
  } catch (const std::invalid_argument& e) {
    usage(e.what());
  } catch (const std::exception& e) {
    io_error(e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) io_error("cannot write " + path.string());
  out << text;
  if (!out) io_error("write failed: " + path.string());
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) io_error("cannot create directory " + dir.string());
}

struct CsvTable {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;  // first column when it is textual
};

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size() || !std::isfinite(v)) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    data_error(where + ": not a number: '" + s + "'");
  }
}

// Reads a CSV whose header must equal `columns`. When `labelled`, the first
// column is kept as text.
CsvTable read_csv(const std::string& path, const std::vector<std::string>& columns, bool labelled) {
  std::ifstream in(path);
  if (!in) io_error("cannot open " + path);
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  CsvTable t;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_commas(line);
    if (!have_header) {
      if (cells != columns) {
        std::string want;
        for (const auto& c : columns) want += (want.empty() ? "" : ",") + c;
        data_error(path + ": expected header '" + want + "'");
      }
      have_header = true;
      continue;
    }
    if (cells.size() != columns.size())
      data_error(path + ":" + std::to_string(line_no) + ": expected " + std::to_string(columns.size()) + " fields");
    std::vector<double> row;
    const std::string where = path + ":" + std::to_string(line_no);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (labelled && i == 0) {
        t.labels.push_back(cells[0]);
        continue;
      }
      row.push_back(parse_number(cells[i], where));
    }
    t.rows.push_back(std::move(row));
  }
  if (!have_header) data_error(path + ": empty file");
  return t;
}

geo::GeoPoint make_geo(double lat, double lon, const std::string& where, bool from_flag) {
  try {
    return geo::GeoPoint(lat, lon);
  } catch (const std::invalid_argument& e) {
    if (from_flag) usage(where + ": " + e.what());
    data_error(where + ": " + e.what());
  }
}

geo::GeoPoint parse_latlon_flag(const std::string& s, const std::string& flag) {
  const auto cells = split_commas(s);
  if (cells.size() != 2) usage(flag + " expects lat,lon");
  double v[2];
  for (int i = 0; i < 2; ++i) {
    try {
      std::size_t used = 0;
      v[i] = std::stod(cells[i], &used);
      if (used != cells[i].size()) throw std::invalid_argument(cells[i]);
    } catch (const std::exception&) {
      usage(flag + " expects lat,lon");
    }
  }
  return make_geo(v[0], v[1], flag, true);
}

PipelineConfig pipeline_config(std::uint64_t seed, const std::string& scale, const std::string& mode) {
  PipelineConfig cfg;
  cfg.ransac.seed = seed;
  cfg.ssim.scale = parse_metric_scale(scale);
  cfg.ssim.mode = parse_ssim_mode(mode);
  return cfg;
}

// --------------------------------------------------------------- register

struct RegisterArgs {
  std::string img1, img2, method = "intfeat", out, interp, scale = "eightbit", mode = "windowed";
  std::uint64_t seed = 42;
  bool timings = false;
};

int cmd_register(const RegisterArgs& a, bool verbose, std::ostream& out, std::ostream& err) {
  const Image img1 = read_image(a.img1);
  const Image img2 = read_image(a.img2);
  const PipelineConfig cfg = pipeline_config(a.seed, a.scale, a.mode);
  const Method method = parse_method(a.method);
  const fs::path dir(a.out);
  make_dir(dir);

  RegistrationResult r = a.interp.empty()
                             ? register_images(img1, img2, method, cfg)
                             : upscale_register_evaluate(img1, img2, method, parse_interp(a.interp), cfg);
  const fs::path image_path = dir / "registered.png";
  if (r.registered) {
    write_image(*r.registered, image_path);
  } else {
    std::error_code ec;
    fs::remove(image_path, ec);
  }
  write_text(dir / "report.json", dump(report_json(r.report, a.timings)));
  if (verbose)
    err << to_string(r.report.status) << ": " << r.report.matches << " matches, " << r.report.inliers
        << " inliers\n";
  out << (dir / "report.json").string() << '\n';
  return exit_code(r.report.status);
}

// ---------------------------------------------------------------- upscale

struct UpscaleArgs {
  std::string input, interp = "bilinear", out;
  double factor = 0.0;
};

int cmd_upscale(const UpscaleArgs& a, std::ostream& out) {
  const Image img = read_image(a.input);
  Image up;
  try {
    up = upscale(img, a.factor, parse_interp(a.interp));
  } catch (const std::invalid_argument& e) {
    usage(e.what());
  }
  fs::path dst(a.out);
  if (a.out.empty()) {
    const fs::path src(a.input);
    dst = src.parent_path() / (src.stem().string() + "_upscaled" + src.extension().string());
  }
  write_image(up, dst);
  out << dst.string() << ' ' << up.width() << 'x' << up.height() << '\n';
  return 0;
}

// ------------------------------------------------------------------ bench

struct BenchArgs {
  bool synth = false;
  std::string dir;
  int pairs = 20;
  std::uint64_t seed = 42;
  int size = 1024;
  int ratio = 8;
  double elevation_min = 60.0;
  double elevation_max = 80.0;
  int craters = SceneConfig{}.n_craters;
  bool no_perturb = false;
  std::vector<std::string> methods{"sift", "orb", "intfeat"};
  std::vector<std::string> interps{"bilinear", "bicubic"};
  std::string format = "csv";
  std::string out;
  std::string scale = "eightbit", mode = "windowed";
};

fs::path find_member(const fs::path& dir, const std::string& stem) {
  for (const char* ext : {".png", ".pgm"}) {
    const fs::path p = dir / (stem + ext);
    if (fs::is_regular_file(p)) return p;
  }
  return {};
}

std::vector<BenchPair> load_pair_dir(const std::string& root) {
  if (!fs::is_directory(root)) io_error("not a directory: " + root);
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_directory()) dirs.push_back(e.path());
  dirs.push_back(fs::path(root));
  std::sort(dirs.begin(), dirs.end() - 1);
  std::vector<BenchPair> pairs;
  for (const fs::path& d : dirs) {
    const fs::path low = find_member(d, "low");
    const fs::path high = find_member(d, "high");
    if (low.empty() || high.empty()) continue;
    BenchPair p;
    p.name = d == fs::path(root) ? "." : d.filename().string();
    p.low = read_image(low.string());
    p.high = read_image(high.string());
    const fs::path hpath = d / "homography.json";
    if (fs::is_regular_file(hpath)) {
      std::ifstream in(hpath);
      try {
        p.truth = homography_from_json(Json::parse(in));
      } catch (const std::exception& e) {
        data_error(hpath.string() + ": " + e.what());
      }
    }
    pairs.push_back(std::move(p));
  }
  return pairs;
}

int cmd_bench(const BenchArgs& a, bool verbose, std::ostream& out, std::ostream& err) {
  if (a.synth == !a.dir.empty()) usage("bench needs exactly one of --synth or --dir");
  std::vector<BenchPair> pairs;
  if (a.synth) {
    if (a.pairs < 1) io_error("empty input set");
    SuiteConfig sc;
    sc.pairs = a.pairs;
    sc.seed = a.seed;
    sc.size = a.size;
    sc.ratio = a.ratio;
    sc.elevation_min = a.elevation_min;
    sc.elevation_max = a.elevation_max;
    sc.perturb = !a.no_perturb;
    sc.scene.n_craters = a.craters;
    try {
      sc.scene.scaled_to(sc.size).validate();
      pairs = make_synthetic_suite(sc);
    } catch (const std::invalid_argument& e) {
      usage(e.what());
    }
  } else {
    pairs = load_pair_dir(a.dir);
    if (pairs.empty()) io_error("empty input set: no low/high pairs under " + a.dir);
  }
  std::vector<Method> methods;
  for (const auto& m : a.methods) methods.push_back(parse_method(m));
  std::vector<InterpMethod> interps;
  for (const auto& i : a.interps) interps.push_back(parse_interp(i));
  const PipelineConfig cfg = pipeline_config(a.seed, a.scale, a.mode);
  if (verbose) err << "bench: " << pairs.size() << " pairs\n";

  const BenchResult result = run_benchmark(pairs, methods, interps, cfg);
  const std::string csv = bench_csv(result.rows);
  const std::string summary = dump(bench_json(result, cfg));
  if (!a.out.empty()) {
    const fs::path dir(a.out);
    make_dir(dir);
    write_text(dir / "bench.csv", csv);
    write_text(dir / "bench.json", summary);
  }
  out << (a.format == "json" ? summary : csv);
  return 0;
}

// ---------------------------------------------------------------- metrics

struct MetricsArgs {
  std::string a, b, scale = "eightbit", mode = "windowed";
};

int cmd_metrics(const MetricsArgs& m, std::ostream& out) {
  const Image x = read_image(m.a);
  const Image y = read_image(m.b);
  if (x.width() != y.width() || x.height() != y.height())
    io_error("image sizes differ: " + std::to_string(x.width()) + "x" + std::to_string(x.height()) + " vs " +
             std::to_string(y.width()) + "x" + std::to_string(y.height()));
  SsimParams p;
  p.scale = parse_metric_scale(m.scale);
  p.mode = parse_ssim_mode(m.mode);
  if (p.mode == SsimMode::Windowed && (x.width() < p.window || x.height() < p.window))
    io_error("images are smaller than the SSIM window; use --mode global");
  const double e = mse(x, y, p.scale);
  Json j;
  j["ssim"] = metric_value(ssim(x, y, p));
  j["psnr_db"] = metric_value(psnr_from_mse(e, p.scale));
  j["mse"] = metric_value(e);
  out << dump(j);
  return 0;
}

// ------------------------------------------------------------------ synth

struct SynthArgs {
  std::string out;
  std::uint64_t seed = 42;
  SceneConfig scene;
  bool pair = false;
  int ratio = 8;
};

int cmd_synth(SynthArgs a, std::ostream& out) {
  a.scene.seed = a.seed;
  try {
    a.scene.validate();
  } catch (const std::invalid_argument& e) {
    usage(e.what());
  }
  const fs::path dir(a.out);
  make_dir(dir);
  SceneRender render = render_crater_scene(a.scene);
  write_image(render.image, dir / "scene.png");
  Json sj = scene_json(a.scene);
  sj["shadowed_pixels"] = render.shadowed_pixels;
  sj["intensity_std"] = intensity_stddev(render.image);
  write_text(dir / "scene.json", dump(sj));
  if (a.pair) {
    PerturbConfig pc;
    pc.seed = a.seed;
    BenchPair p;
    try {
      p = make_bench_pair("pair", render.image, a.ratio, pc);
    } catch (const std::invalid_argument& e) {
      usage(e.what());
    }
    write_image(p.low, dir / "low.png");
    write_image(p.high, dir / "high.png");
    Json hj;
    hj["homography"] = homography_json(*p.truth);
    hj["ratio"] = a.ratio;
    hj["perturbation"] = perturb_json(pc);
    write_text(dir / "homography.json", dump(hj));
  }
  out << dir.string() << '\n';
  return 0;
}

// -------------------------------------------------------------------- geo

struct GeoArgs {
  std::string from, to, csv, points, pairs, corners, grid;
  double radius = geo::kLunarRadiusKm;
  std::optional<int> width, height;
  double step = 100.0, origin_x = 0.0, origin_y = 0.0;
};

int cmd_haversine(const GeoArgs& g, std::ostream& out) {
  if (!(g.radius > 0)) usage("--radius must be positive");
  Json j;
  if (!g.csv.empty()) {
    if (!g.from.empty() || !g.to.empty()) usage("--csv excludes --from/--to");
    const CsvTable t = read_csv(g.csv, {"name", "lat_deg", "lon_deg"}, true);
    std::vector<geo::GeoPoint> pts;
    for (std::size_t i = 0; i < t.rows.size(); ++i)
      pts.push_back(make_geo(t.rows[i][0], t.rows[i][1], g.csv + ": " + t.labels[i], false));
    Json matrix = Json::array();
    for (const auto& p : pts) {
      Json row = Json::array();
      for (const auto& q : pts) row.push_back(geo::haversine_distance(p, q, g.radius));
      matrix.push_back(row);
    }
    j["names"] = t.labels;
    j["distances_km"] = matrix;
  } else {
    if (g.from.empty() || g.to.empty()) usage("haversine needs --from and --to, or --csv");
    const auto a = parse_latlon_flag(g.from, "--from");
    const auto b = parse_latlon_flag(g.to, "--to");
    j["distance_km"] = geo::haversine_distance(a, b, g.radius);
  }
  j["radius_km"] = g.radius;
  out << dump(j);
  return 0;
}

int cmd_bbox(const GeoArgs& g, std::ostream& out) {
  const CsvTable t = read_csv(g.points, {"x", "y"}, false);
  if (t.rows.size() != 4) data_error(g.points + ": expected exactly 4 corner rows");
  std::array<Point2, 4> c;
  for (std::size_t i = 0; i < 4; ++i) c[i] = {t.rows[i][0], t.rows[i][1]};
  std::optional<std::array<int, 2>> bounds;
  if (g.width.has_value() != g.height.has_value()) usage("--width and --height go together");
  if (g.width) {
    if (*g.width < 1 || *g.height < 1) usage("--width and --height must be positive");
    bounds = std::array<int, 2>{*g.width, *g.height};
  }
  out << dump(bbox_json(geo::footprint_bbox(std::span<const Point2, 4>(c), bounds)));
  return 0;
}

int cmd_affine(const GeoArgs& g, std::ostream& out) {
  const CsvTable t = read_csv(g.pairs, {"src_x", "src_y", "dst_x", "dst_y"}, false);
  std::vector<geo::PointPair> pp;
  for (const auto& r : t.rows) pp.push_back({{r[0], r[1]}, {r[2], r[3]}});
  geo::AffineTransform a;
  try {
    a = geo::estimate_affine(pp);
  } catch (const DegenerateGeometry& e) {
    data_error(g.pairs + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    data_error(g.pairs + ": " + e.what());
  }
  Json j;
  j["matrix"] = Json::array({Json::array({a.m[0], a.m[1], a.m[2]}), Json::array({a.m[3], a.m[4], a.m[5]})});
  out << dump(j);
  return 0;
}

int cmd_nearest(const GeoArgs& g, std::ostream& out) {
  if (!(g.radius > 0)) usage("--radius must be positive");
  if (!(g.step > 0)) usage("--step must be positive");
  const CsvTable corners = read_csv(g.corners, {"name", "lat_deg", "lon_deg"}, true);
  const CsvTable nodes = read_csv(g.grid, {"row", "col", "lat_deg", "lon_deg"}, false);
  geo::GeoGrid grid;
  grid.step = g.step;
  grid.origin_x = g.origin_x;
  grid.origin_y = g.origin_y;
  for (const auto& r : nodes.rows) {
    if (r[0] < 0 || r[1] < 0 || r[0] != std::floor(r[0]) || r[1] != std::floor(r[1]))
      data_error(g.grid + ": row/col must be nonnegative integers");
    grid.rows = std::max(grid.rows, static_cast<int>(r[0]) + 1);
    grid.cols = std::max(grid.cols, static_cast<int>(r[1]) + 1);
  }
  if (static_cast<std::size_t>(grid.rows) * grid.cols != nodes.rows.size())
    data_error(g.grid + ": grid must list every lattice node exactly once");
  grid.nodes.resize(nodes.rows.size());
  std::vector<char> seen(nodes.rows.size(), 0);
  for (const auto& r : nodes.rows) {
    const std::size_t k = static_cast<std::size_t>(r[0]) * grid.cols + static_cast<std::size_t>(r[1]);
    if (seen[k]) data_error(g.grid + ": duplicate node");
    seen[k] = 1;
    grid.nodes[k] = make_geo(r[2], r[3], g.grid, false);
  }
  try {
    grid.validate();
  } catch (const std::invalid_argument& e) {
    data_error(g.grid + ": " + e.what());
  }
  Json a = Json::array();
  for (std::size_t i = 0; i < corners.rows.size(); ++i) {
    const auto target = make_geo(corners.rows[i][0], corners.rows[i][1], g.corners, false);
    const geo::GridMatch m = geo::nearest_grid_pixel(grid, target, g.radius);
    a.push_back({{"name", corners.labels[i]},
                 {"row", m.row},
                 {"col", m.col},
                 {"x", m.pixel.x},
                 {"y", m.pixel.y},
                 {"distance_km", m.distance_km}});
  }
  out << dump(a);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lunar image registration toolkit: SIFT, ORB and fused-feature pipelines", "syncvision"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Progress on stderr");

  RegisterArgs ra;
  auto* reg = app.add_subcommand("register", "Register IMG1 onto reference IMG2; writes registered.png + report.json");
  reg->add_option("img1", ra.img1, "Moving image")->required();
  reg->add_option("img2", ra.img2, "Reference image (output frame)")->required();
  reg->add_option("--method", ra.method, "sift, orb or intfeat")
      ->transform(CLI::IsMember(kMethodNames, CLI::ignore_case))
      ->capture_default_str();
  reg->add_option("--out", ra.out, "Output directory")->required();
  reg->add_option("--seed", ra.seed, "RANSAC seed")->capture_default_str();
  reg->add_option("--interp", ra.interp, "Upscale IMG1 to IMG2's width first (bilinear or bicubic)")
      ->transform(CLI::IsMember(kInterpNames, CLI::ignore_case));
  reg->add_option("--scale", ra.scale, "Metric scale: unit or eightbit")
      ->check(CLI::IsMember({"unit", "eightbit"}, CLI::ignore_case))
      ->capture_default_str();
  reg->add_option("--ssim-mode", ra.mode, "SSIM: global or windowed")
      ->check(CLI::IsMember({"global", "windowed"}, CLI::ignore_case))
      ->capture_default_str();
  reg->add_flag("--timings", ra.timings, "Include per-stage runtime_ms in the report");

  UpscaleArgs ua;
  auto* ups = app.add_subcommand("upscale", "Upscale an image");
  ups->add_option("input", ua.input, "Input image")->required();
  ups->add_option("--factor", ua.factor, "Scale factor (> 0)")->required()->check(CLI::PositiveNumber);
  ups->add_option("--interp", ua.interp, "bilinear or bicubic")
      ->transform(CLI::IsMember(kInterpNames, CLI::ignore_case))
      ->capture_default_str();
  ups->add_option("--out", ua.out, "Output path (default <stem>_upscaled.<ext>)");

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Method x interpolation comparison over image pairs");
  auto* synth_flag = bench->add_flag("--synth", ba.synth, "Generate a seeded synthetic suite");
  auto* dir_opt = bench->add_option("--dir", ba.dir, "Directory of pair folders holding low/high images and an optional homography.json");
  synth_flag->excludes(dir_opt);
  bench->add_option("--pairs", ba.pairs, "Synthetic pair count")->capture_default_str();
  bench->add_option("--seed", ba.seed, "Suite and RANSAC seed")->capture_default_str();
  bench->add_option("--size", ba.size, "Synthetic high-resolution size (px)")->capture_default_str();
  bench->add_option("--ratio", ba.ratio, "High/low resolution ratio")->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("--elevation-min", ba.elevation_min, "Lowest sun elevation (deg)")->capture_default_str();
  bench->add_option("--elevation-max", ba.elevation_max, "Highest sun elevation (deg)")->capture_default_str();
  bench->add_option("--craters", ba.craters, "Crater count per scene")->capture_default_str();
  bench->add_flag("--no-perturb", ba.no_perturb, "Skip the geometric/photometric perturbation");
  bench->add_option("--methods", ba.methods, "Subset of sift,orb,intfeat")
      ->delimiter(',')
      ->transform(CLI::IsMember(kMethodNames, CLI::ignore_case));
  bench->add_option("--interps", ba.interps, "Subset of bilinear,bicubic")
      ->delimiter(',')
      ->transform(CLI::IsMember(kInterpNames, CLI::ignore_case));
  bench->add_option("--format", ba.format, "stdout format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  bench->add_option("--out", ba.out, "Also write bench.csv and bench.json here");
  bench->add_option("--scale", ba.scale, "Metric scale: unit or eightbit")
      ->check(CLI::IsMember({"unit", "eightbit"}, CLI::ignore_case))
      ->capture_default_str();
  bench->add_option("--ssim-mode", ba.mode, "SSIM: global or windowed")
      ->check(CLI::IsMember({"global", "windowed"}, CLI::ignore_case))
      ->capture_default_str();

  MetricsArgs ma;
  auto* met = app.add_subcommand("metrics", "Print {ssim, psnr_db, mse} for two same-size images");
  met->add_option("a", ma.a, "First image")->required();
  met->add_option("b", ma.b, "Second image")->required();
  met->add_option("--scale", ma.scale, "unit or eightbit")
      ->check(CLI::IsMember({"unit", "eightbit"}, CLI::ignore_case))
      ->capture_default_str();
  met->add_option("--mode", ma.mode, "SSIM: global or windowed")
      ->check(CLI::IsMember({"global", "windowed"}, CLI::ignore_case))
      ->capture_default_str();

  SynthArgs sa;
  auto* syn = app.add_subcommand("synth", "Render a synthetic crater scene (scene.png + scene.json)");
  syn->add_option("--out", sa.out, "Output directory")->required();
  syn->add_option("--seed", sa.seed, "Scene (and perturbation) seed")->capture_default_str();
  syn->add_option("--elevation", sa.scene.sun_elevation, "Sun elevation (deg, (0, 90])")->capture_default_str();
  syn->add_option("--azimuth", sa.scene.sun_azimuth, "Sun azimuth (deg, image axes)")->capture_default_str();
  syn->add_option("--size", sa.scene.size, "Scene size (px)")->capture_default_str();
  syn->add_option("--craters", sa.scene.n_craters, "Crater count")->capture_default_str();
  syn->add_option("--min-radius", sa.scene.min_radius, "Smallest crater radius (px)")->capture_default_str();
  syn->add_option("--max-radius", sa.scene.max_radius, "Largest crater radius (px)")->capture_default_str();
  syn->add_option("--noise", sa.scene.noise_sigma, "Additive noise sigma")->capture_default_str();
  syn->add_flag("--pair", sa.pair, "Also write low.png, high.png and homography.json");
  syn->add_option("--ratio", sa.ratio, "Downsampling ratio for --pair")->capture_default_str()->check(CLI::PositiveNumber);

  GeoArgs ga;
  auto* geo_cmd = app.add_subcommand("geo", "Haversine distance, bounding boxes, affine fits, grid matching");
  geo_cmd->require_subcommand(1);
  auto* hav = geo_cmd->add_subcommand("haversine", "Great-circle distance on the lunar sphere");
  hav->add_option("--from", ga.from, "lat,lon in degrees");
  hav->add_option("--to", ga.to, "lat,lon in degrees");
  hav->add_option("--csv", ga.csv, "CSV name,lat_deg,lon_deg: prints the pairwise distance matrix");
  hav->add_option("--radius", ga.radius, "Sphere radius (km)")->capture_default_str();
  auto* bbox = geo_cmd->add_subcommand("bbox", "Axis-aligned box of 4 corners");
  bbox->add_option("--points", ga.points, "CSV x,y with 4 rows")->required();
  bbox->add_option("--width", ga.width, "Clamp to image width");
  bbox->add_option("--height", ga.height, "Clamp to image height");
  auto* aff = geo_cmd->add_subcommand("affine", "Least-squares affine transform");
  aff->add_option("--pairs", ga.pairs, "CSV src_x,src_y,dst_x,dst_y")->required();
  auto* near = geo_cmd->add_subcommand("nearest", "Nearest grid pixel for each corner");
  near->add_option("--corners", ga.corners, "CSV name,lat_deg,lon_deg")->required();
  near->add_option("--grid", ga.grid, "CSV row,col,lat_deg,lon_deg")->required();
  near->add_option("--step", ga.step, "Grid pixel step")->capture_default_str();
  near->add_option("--origin-x", ga.origin_x, "Pixel x of node (0,0)")->capture_default_str();
  near->add_option("--origin-y", ga.origin_y, "Pixel y of node (0,0)")->capture_default_str();
  near->add_option("--radius", ga.radius, "Sphere radius (km)")->capture_default_str();

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*reg) return cmd_register(ra, verbose, out, err);
    if (*ups) return cmd_upscale(ua, out);
    if (*bench) return cmd_bench(ba, verbose, out, err);
    if (*met) return cmd_metrics(ma, out);
    if (*syn) return cmd_synth(sa, out);
    if (*hav) return cmd_haversine(ga, out);
    if (*bbox) return cmd_bbox(ga, out);
    if (*aff) return cmd_affine(ga, out);
    if (*near) return cmd_nearest(ga, out);
  } catch (const CliError& e) {
    err << "error: " << e.what() << '\n';
    return e.code;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace syncvision::cli
