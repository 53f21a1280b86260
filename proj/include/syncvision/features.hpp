#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <string_view>
#include <vector>

#include "syncvision/image.hpp"

namespace syncvision {

enum class FeatureSource { Sift, Orb };

std::string_view to_string(FeatureSource s);

/// A detected interest point in base-image pixel coordinates.
struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  int octave = 0;
  double sigma = 1.0;        // characteristic scale, base pixels
  double orientation = 0.0;  // radians in [0, 2pi), image axes (y down)
  double response = 0.0;     // >= 0
  FeatureSource source = FeatureSource::Sift;
};

inline constexpr int kSiftDescriptorSize = 128;
inline constexpr int kOrbDescriptorBytes = 32;

struct SiftDescriptor {
  std::array<float, kSiftDescriptorSize> values{};
};

/// 256 binary tests packed little-endian within each byte.
struct OrbDescriptor {
  std::array<std::uint8_t, kOrbDescriptorBytes> bits{};

  bool bit(int k) const { return (bits[k >> 3] >> (k & 7)) & 1u; }
  void set_bit(int k) { bits[k >> 3] |= static_cast<std::uint8_t>(1u << (k & 7)); }
  int popcount() const {
    int n = 0;
    for (auto b : bits) n += std::popcount(b);
    return n;
  }
  bool operator==(const OrbDescriptor&) const = default;
};

int hamming_distance(const OrbDescriptor& a, const OrbDescriptor& b);

struct SiftConfig {
  int octaves = 4;
  int scales_per_octave = 3;
  double sigma0 = 1.6;
  double contrast_threshold = 0.03;
  double edge_ratio = 10.0;
  int orientation_bins = 36;
  double peak_ratio = 0.8;
  /// Blur already present in the input image.
  double input_sigma = 0.5;
  double descriptor_clamp = 0.2;
  /// Upsample the input 2x before building the pyramid (Lowe's -1 octave).
  bool double_base = false;

  void validate() const;
};

struct OrbConfig {
  int n_features = 500;
  int pyramid_levels = 8;
  double scale_factor = 1.2;
  double fast_threshold = 0.08;
  int patch_size = 31;
  int brief_pairs = 256;
  std::uint64_t pattern_seed = 0x5EED0B0Bull;
  double brief_smoothing_sigma = 2.0;
  double harris_k = 0.04;
  int harris_block = 7;

  void validate() const;
};

template <typename Descriptor>
struct Features {
  std::vector<Keypoint> keypoints;
  std::vector<Descriptor> descriptors;
};

using SiftFeatures = Features<SiftDescriptor>;
using OrbFeatures = Features<OrbDescriptor>;

// ---------------------------------------------------------------- FAST / ORB

/// Bresenham circle of radius 3 used by the segment test, clockwise from
/// 12 o'clock, as (dx, dy).
inline constexpr std::array<std::array<int, 2>, 16> kFastCircle{{
    {0, -3}, {1, -3}, {2, -2}, {3, -1}, {3, 0}, {3, 1}, {2, 2}, {1, 3},
    {0, 3}, {-1, 3}, {-2, 2}, {-3, 1}, {-3, 0}, {-3, -1}, {-2, -2}, {-1, -3}}};

/// Segment-test corner score at (x, y): the sum of |I_circle - I_p| over the
/// longest contiguous run of >= 9 circle pixels all brighter than p + t or all
/// darker than p - t. Zero when (x, y) is not a corner. Requires a 3 px
/// margin.
double fast_score(const Image& img, int x, int y, double threshold);

/// FAST-9 corners with 3x3 non-maximum suppression on `fast_score`.
/// A corner survives when its score beats every corner neighbour, ties going
/// to the earlier pixel in raster order. Returns an empty list for images
/// smaller than 7x7.
std::vector<Keypoint> detect_fast(const Image& img, double threshold);

/// Harris corner measure det(M) - k tr(M)^2 over a block x block window of
/// Sobel gradients centred at (x, y).
double harris_response(const Image& img, int x, int y, double k = 0.04, int block = 7);

/// Intensity-centroid orientation atan2(m01, m10) over the disc of `radius`
/// around the rounded keypoint position, mapped to [0, 2pi). A vanishing
/// moment vector yields 0.
double orientation_intensity_centroid(const Image& img, const Keypoint& kp, int radius);

/// One BRIEF test: compare smoothed intensity at p against q (offsets from
/// the keypoint, unrotated).
struct BriefPair {
  double px, py, qx, qy;
};

/// Seeded Gaussian test pattern: offsets ~ N(0, (patch_size/5)^2) clipped to
/// the patch half-width.
std::vector<BriefPair> make_brief_pattern(const OrbConfig& cfg);

/// Steered BRIEF descriptor at `kp` (coordinates in `smoothed`'s pixels).
/// Bit k is set iff I(R p_k + kp) < I(R q_k + kp), R the rotation by
/// kp.orientation.
OrbDescriptor compute_rbrief(const Image& smoothed, const Keypoint& kp, const OrbConfig& cfg);
OrbDescriptor compute_rbrief(const Image& smoothed, const Keypoint& kp,
                             const std::vector<BriefPair>& pattern);

OrbFeatures detect_orb(const Image& img, const OrbConfig& cfg = {});

// ---------------------------------------------------------------------- SIFT

SiftFeatures detect_sift(const Image& img, const SiftConfig& cfg = {});

/// Normalizes `v` to unit length and caps every component at `clamp`,
/// renormalizing until both hold. Returns false when no such vector exists
/// (fewer than 1/clamp^2 nonzero components, or all zero).
bool normalize_and_clamp(std::array<float, kSiftDescriptorSize>& v, double clamp);

}  // namespace syncvision
