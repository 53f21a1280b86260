#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "syncvision/image.hpp"
#include "syncvision/pipeline.hpp"
#include "syncvision/registration.hpp"

namespace syncvision {

/// Cratered terrain rendered under a point sun.
struct SceneConfig {
  int size = 512;
  int n_craters = 120;
  double min_radius = 3.0;   // px
  double max_radius = 40.0;  // px
  /// Crater depth as a fraction of its radius.
  double depth_ratio = 0.5;
  /// Amplitude (px of height) of the fractal micro-relief between craters.
  double roughness = 1.5;
  double sun_elevation = 45.0;  // degrees, (0, 90]
  double sun_azimuth = 135.0;   // degrees, image axes (x right, y down)
  double albedo = 0.9;
  double ambient = 0.05;
  double noise_sigma = 0.01;
  std::uint64_t seed = 1;

  void validate() const;
  /// The same field of view rendered at a different raster size: radii and
  /// relief amplitude scale with the size, the crater count is unchanged.
  SceneConfig scaled_to(int new_size) const;
};

struct SceneRender {
  Image image;
  std::vector<float> height;         // px units, row-major
  std::vector<std::uint8_t> shadow;  // 1 where the sun ray is occluded
  std::size_t shadowed_pixels = 0;
};

/// Hemispherical depressions on fractal relief, Lambertian shading with
/// scanline shadow casting toward the sun azimuth, additive Gaussian noise.
/// Deterministic per seed.
SceneRender render_crater_scene(const SceneConfig& cfg);
Image generate_crater_scene(const SceneConfig& cfg);

/// Population standard deviation of the intensities.
double intensity_stddev(const Image& img);

struct PerturbConfig {
  double max_rotation = 0.1;       // radians, about the image centre
  double max_translation = 16.0;   // px
  double max_projective = 5e-5;    // bound on h31, h32 (centred coordinates)
  double gain_min = 0.9;
  double gain_max = 1.1;
  double bias_min = -0.05;
  double bias_max = 0.05;
  double noise_sigma = 0.01;
  std::uint64_t seed = 7;

  void validate() const;
  static PerturbConfig none() {
    return {0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 7};
  }
};

struct PerturbedPair {
  Image warped;
  /// Maps original pixel coordinates to warped ones: warped(H p) = original(p).
  Homography truth;
  std::vector<std::uint8_t> mask;
};

PerturbedPair perturb_pair(const Image& img, const PerturbConfig& cfg);

/// One benchmark input: a low-resolution view and the high-resolution
/// reference. `truth` maps the upscaled low view into the reference frame.
struct BenchPair {
  std::string name;
  Image low;
  Image high;
  std::optional<Homography> truth;
};

/// Builds a pair from a rendered scene: `high` is the scene, `low` its
/// (optionally perturbed) view box-downsampled by `ratio`. Translation bounds
/// are read per 512 px and scaled with the scene size.
BenchPair make_bench_pair(std::string name, Image high, int ratio, const std::optional<PerturbConfig>& perturb);

struct SuiteConfig {
  int pairs = 20;
  int size = 1024;
  int ratio = 8;
  double elevation_min = 60.0;
  double elevation_max = 80.0;
  bool perturb = true;
  PerturbConfig perturbation;
  std::uint64_t seed = 2024;
  SceneConfig scene;  // size, seed, sun angles are overridden per pair
};

/// Seeded synthetic suite: each pair renders a scene at `size`, optionally
/// perturbs it, and box-downsamples the perturbed view by `ratio`.
std::vector<BenchPair> make_synthetic_suite(const SuiteConfig& cfg);

struct BenchRow {
  Method method = Method::Sift;
  InterpMethod interp = InterpMethod::Bilinear;
  double ssim = 0.0;        // mean over OK runs (NaN when none)
  double psnr_db = 0.0;     // mean over OK runs (NaN when none)
  double reproj_px = 0.0;   // mean corner error over OK runs with truth (NaN when none)
  std::string status;       // OK, PARTIAL, or the shared failure status
  std::size_t runs = 0;
  std::size_t ok_runs = 0;
};

struct BenchResult {
  std::vector<BenchRow> rows;  // ordered by method, then interp
  std::vector<std::string> pair_names;
  /// reports[row][pair]
  std::vector<std::vector<RegistrationReport>> reports;
};

/// Runs upscale_register_evaluate for every (method, interp) over every pair.
/// Failures are recorded per run and never abort the sweep.
BenchResult run_benchmark(std::span<const BenchPair> pairs, std::span<const Method> methods,
                          std::span<const InterpMethod> interps, const PipelineConfig& cfg);

inline constexpr const char* kBenchCsvHeader = "method,interp,ssim,psnr_db,reproj_px,status";

std::string bench_csv(std::span<const BenchRow> rows);

}  // namespace syncvision
