#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "syncvision/image.hpp"

namespace syncvision {

/// Pixel scale a metric is computed on: raw [0,1] intensities or their 8-bit
/// codes round(v * 255).
enum class MetricScale { Unit, EightBit };

std::string_view to_string(MetricScale s);
MetricScale parse_metric_scale(std::string_view name);

enum class SsimMode { Global, Windowed };

std::string_view to_string(SsimMode m);
SsimMode parse_ssim_mode(std::string_view name);

struct SsimParams {
  double k1 = 0.01;
  double k2 = 0.03;
  MetricScale scale = MetricScale::EightBit;
  SsimMode mode = SsimMode::Windowed;
  int window = 11;
  double window_sigma = 1.5;

  /// Dynamic range L: 1 on the unit scale, 255 on the 8-bit scale.
  double dynamic_range() const { return scale == MetricScale::Unit ? 1.0 : 255.0; }
  double c1() const { return (k1 * dynamic_range()) * (k1 * dynamic_range()); }
  double c2() const { return (k2 * dynamic_range()) * (k2 * dynamic_range()); }
};

/// Per-pixel selection; empty span means "all pixels".
using PixelMask = std::span<const std::uint8_t>;

/// (1/N) sum (I - K)^2 over the selected pixels. Throws std::invalid_argument
/// on dimension mismatch and EvaluationSkipped for an all-zero mask.
double mse(const Image& i, const Image& k, MetricScale scale, PixelMask mask = {});

/// 10 log10(MAX^2 / MSE), MAX = 255 or 1. Identical inputs give +infinity.
double psnr(const Image& i, const Image& k, MetricScale scale, PixelMask mask = {});
double psnr_from_mse(double mse, MetricScale scale);

/// SSIM. Global mode evaluates the index once on whole-selection statistics
/// (population variances). Windowed mode averages it over every full
/// window x window Gaussian window (stride 1) lying entirely inside the mask.
/// Throws std::invalid_argument on mismatch or when no window fits, and
/// EvaluationSkipped for an all-zero mask.
double ssim(const Image& x, const Image& y, const SsimParams& params = {}, PixelMask mask = {});

/// Number of full windows that fit inside the mask.
std::size_t ssim_window_count(int width, int height, const SsimParams& params, PixelMask mask = {});

/// Ranked retrieval result: relevance flag per rank.
struct RetrievalRanking {
  std::vector<std::uint8_t> relevant;
  std::size_t total_relevant = 0;
};

/// sum_k P(k) rel(k) / total_relevant. Throws std::invalid_argument when
/// total_relevant is zero or smaller than the number of relevant flags.
double average_precision(const RetrievalRanking& r);

/// Arithmetic mean; throws std::invalid_argument on an empty list.
double mean_average_precision(std::span<const double> aps);

}  // namespace syncvision
