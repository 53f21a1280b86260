#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include "syncvision/features.hpp"
#include "syncvision/random.hpp"

namespace syncvision {

void OrbConfig::validate() const {
  if (n_features < 1) throw std::invalid_argument("orb: n_features must be >= 1");
  if (pyramid_levels < 1) throw std::invalid_argument("orb: pyramid_levels must be >= 1");
  if (!(scale_factor > 1.0)) throw std::invalid_argument("orb: scale_factor must be > 1");
  if (!(fast_threshold > 0.0)) throw std::invalid_argument("orb: fast_threshold must be > 0");
  if (patch_size < 3 || patch_size % 2 == 0) throw std::invalid_argument("orb: patch_size must be odd and >= 3");
  if (brief_pairs != 256) throw std::invalid_argument("orb: descriptor is fixed at 256 tests");
  if (!(brief_smoothing_sigma > 0.0)) throw std::invalid_argument("orb: smoothing sigma must be > 0");
  if (harris_block < 3 || harris_block % 2 == 0) throw std::invalid_argument("orb: harris_block must be odd");
}

std::vector<BriefPair> make_brief_pattern(const OrbConfig& cfg) {
  Rng rng(cfg.pattern_seed);
  const double half = cfg.patch_size / 2;
  const double sd = cfg.patch_size / 5.0;
  auto draw = [&] { return std::clamp(rng.normal(0.0, sd), -half, half); };
  std::vector<BriefPair> pattern(static_cast<std::size_t>(cfg.brief_pairs));
  for (auto& p : pattern) {
    p.px = draw();
    p.py = draw();
    p.qx = draw();
    p.qy = draw();
  }
  return pattern;
}

OrbDescriptor compute_rbrief(const Image& smoothed, const Keypoint& kp, const std::vector<BriefPair>& pattern) {
  if (pattern.size() != 256) throw std::invalid_argument("rBRIEF pattern must have 256 pairs");
  const double c = std::cos(kp.orientation);
  const double s = std::sin(kp.orientation);
  OrbDescriptor d;
  for (int k = 0; k < 256; ++k) {
    const BriefPair& t = pattern[k];
    const double a = sample_bilinear(smoothed, kp.x + c * t.px - s * t.py, kp.y + s * t.px + c * t.py);
    const double b = sample_bilinear(smoothed, kp.x + c * t.qx - s * t.qy, kp.y + s * t.qx + c * t.qy);
    if (a < b) d.set_bit(k);
  }
  return d;
}

OrbDescriptor compute_rbrief(const Image& smoothed, const Keypoint& kp, const OrbConfig& cfg) {
  return compute_rbrief(smoothed, kp, make_brief_pattern(cfg));
}

namespace {

struct Candidate {
  Keypoint level_kp;  // coordinates in the pyramid level
  int level;
  double harris;
};

}  // namespace

OrbFeatures detect_orb(const Image& img, const OrbConfig& cfg) {
  cfg.validate();
  const std::vector<BriefPair> pattern = make_brief_pattern(cfg);
  const int margin = cfg.patch_size / 2 + 1;

  std::vector<Image> levels;
  levels.push_back(img);
  for (int l = 1; l < cfg.pyramid_levels; ++l) {
    const Image& prev = levels.back();
    if (std::round(prev.width() / cfg.scale_factor) < 2 * margin + 1 ||
        std::round(prev.height() / cfg.scale_factor) < 2 * margin + 1)
      break;
    levels.push_back(upscale(prev, 1.0 / cfg.scale_factor, InterpMethod::Bilinear));
  }

  std::vector<Candidate> candidates;
  for (int l = 0; l < static_cast<int>(levels.size()); ++l) {
    const Image& level = levels[l];
    for (const Keypoint& kp : detect_fast(level, cfg.fast_threshold)) {
      if (kp.x < margin || kp.y < margin || kp.x >= level.width() - margin || kp.y >= level.height() - margin)
        continue;
      const double r = harris_response(level, static_cast<int>(kp.x), static_cast<int>(kp.y), cfg.harris_k,
                                       cfg.harris_block);
      if (!(r > 0.0)) continue;
      candidates.push_back({kp, l, r});
    }
  }

  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.harris != b.harris) return a.harris > b.harris;
    return std::tie(a.level, a.level_kp.y, a.level_kp.x) < std::tie(b.level, b.level_kp.y, b.level_kp.x);
  });
  if (candidates.size() > static_cast<std::size_t>(cfg.n_features)) candidates.resize(cfg.n_features);

  std::vector<Image> smoothed(levels.size());
  OrbFeatures out;
  out.keypoints.reserve(candidates.size());
  out.descriptors.reserve(candidates.size());
  const int radius = cfg.patch_size / 2;
  for (Candidate& c : candidates) {
    if (smoothed[c.level].empty()) smoothed[c.level] = gaussian_blur(levels[c.level], cfg.brief_smoothing_sigma);
    Keypoint kp = c.level_kp;
    kp.orientation = orientation_intensity_centroid(levels[c.level], kp, radius);
    const OrbDescriptor desc = compute_rbrief(smoothed[c.level], kp, pattern);

    const double scale = std::pow(cfg.scale_factor, c.level);
    Keypoint base = kp;
    base.x = std::clamp((kp.x + 0.5) * scale - 0.5, 0.0, img.width() - 1.0);
    base.y = std::clamp((kp.y + 0.5) * scale - 0.5, 0.0, img.height() - 1.0);
    base.octave = c.level;
    base.sigma = cfg.brief_smoothing_sigma * scale;
    base.response = c.harris;
    base.source = FeatureSource::Orb;
    out.keypoints.push_back(base);
    out.descriptors.push_back(desc);
  }
  return out;
}

}  // namespace syncvision
