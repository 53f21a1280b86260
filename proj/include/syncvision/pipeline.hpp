#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "syncvision/descmatch.hpp"
#include "syncvision/features.hpp"
#include "syncvision/image.hpp"
#include "syncvision/metrics.hpp"
#include "syncvision/registration.hpp"

namespace syncvision {

enum class Method { Sift, Orb, IntFeat };

std::string_view to_string(Method m);
/// "sift" / "orb" / "intfeat", case-insensitive.
Method parse_method(std::string_view name);

enum class Status { Ok, TooFewFeatures, NoConsensus, Degenerate };

std::string_view to_string(Status s);

/// Matcher policy per descriptor modality.
struct MatchConfig {
  double ratio = 0.75;
  bool float_ratio_test = true;
  bool float_cross_check = false;
  bool binary_ratio_test = false;
  bool binary_cross_check = true;
};

struct PipelineConfig {
  SiftConfig sift;
  OrbConfig orb;
  MatchConfig match;
  RansacConfig ransac;
  SsimParams ssim;  // ssim.scale is also the MSE / PSNR scale
  int pca_dim = kPcaDim;

  std::uint64_t seed() const { return ransac.seed; }
};

struct StageTimings {
  double upscale_ms = 0.0;
  double detect_ms = 0.0;
  double match_ms = 0.0;
  double ransac_ms = 0.0;
  double warp_ms = 0.0;
  double evaluate_ms = 0.0;
};

struct RegistrationReport {
  Method method = Method::Sift;
  std::optional<InterpMethod> interp;
  std::size_t keypoints_1 = 0;
  std::size_t keypoints_2 = 0;
  std::size_t matches = 0;
  /// INTFEAT only: per-modality split of `matches`.
  std::size_t sift_matches = 0;
  std::size_t orb_matches = 0;
  std::size_t inliers = 0;
  std::optional<Homography> homography;  // maps image 1 into image 2
  std::optional<double> ssim;
  std::optional<double> psnr_db;
  std::optional<double> mse;
  bool pca_padded = false;
  StageTimings runtime_ms;
  Status status = Status::Ok;
  PipelineConfig config;
};

struct RegistrationResult {
  /// Present only when report.status == Ok.
  std::optional<Image> registered;
  std::vector<std::uint8_t> mask;
  RegistrationReport report;
};

/// Detector output reusable across calls on the same image and config.
struct DetectedFeatures {
  std::optional<SiftFeatures> sift;
  std::optional<OrbFeatures> orb;
};

/// Fills whichever detector outputs `method` needs and `cache` lacks.
void detect_features(const Image& img, Method method, const PipelineConfig& cfg, DetectedFeatures& cache);

/// Registers img1 onto img2 (the fixed reference; output has img2's size).
/// SIFT and ORB run single-detector pipelines; INTFEAT extracts both, fits a
/// PCA basis on the union of both images' SIFT descriptors, matches PCA-SIFT
/// and ORB within modality and concatenates the match lists before RANSAC.
/// Metrics are computed against img2 over the warp validity mask.
RegistrationResult register_images(const Image& img1, const Image& img2, Method method, const PipelineConfig& cfg,
                                   DetectedFeatures* cache1 = nullptr, DetectedFeatures* cache2 = nullptr);

struct EvaluationMetrics {
  double ssim = 0.0;
  double psnr_db = 0.0;
  double mse = 0.0;
};

/// Metrics restricted to mask pixels (windowed SSIM: windows fully inside the
/// mask, falling back to global statistics over the mask when no window
/// fits). Throws EvaluationSkipped for an empty mask.
EvaluationMetrics evaluate(const Image& registered, const Image& reference, PixelMask mask, const SsimParams& params);

/// Upscales `lowres` by highres.width / lowres.width with `interp`, then
/// registers the result onto `highres`.
RegistrationResult upscale_register_evaluate(const Image& lowres, const Image& highres, Method method,
                                             InterpMethod interp, const PipelineConfig& cfg,
                                             DetectedFeatures* highres_cache = nullptr);

/// Exit status for the CLI: OK 0, TOO_FEW_FEATURES 2, NO_CONSENSUS 3,
/// DEGENERATE 4.
int exit_code(Status s);

}  // namespace syncvision
