#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "syncvision/image.hpp"

namespace syncvision {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// 3x3 projective transform, row-major.
struct Homography {
  std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};

  double operator()(int r, int c) const { return m[static_cast<std::size_t>(r * 3 + c)]; }
  static Homography identity() { return {}; }
  static Homography translation(double tx, double ty) { return {{1, 0, tx, 0, 1, ty, 0, 0, 1}}; }
};

/// Scales to unit Frobenius norm with m[2][2] >= 0 (first nonzero entry
/// positive when m[2][2] == 0). Throws DegenerateGeometry for a zero matrix.
Homography canonicalize(const Homography& h);

/// Frobenius distance between canonical forms.
double canonical_distance(const Homography& a, const Homography& b);

Homography compose(const Homography& a, const Homography& b);  // a * b
double determinant(const Homography& h);
/// Throws DegenerateGeometry when singular.
Homography invert(const Homography& h);

/// Throws PointAtInfinity when |w'| < 1e-12.
Point2 apply_homography(const Homography& h, Point2 p);

struct Correspondence {
  Point2 p1;  // image 1
  Point2 p2;  // image 2
};

/// Forward reprojection error ||H(p1) - p2||.
double reprojection_error(const Homography& h, const Correspondence& c);

/// Normalized DLT (Hartley conditioning, smallest eigenvector of A^T A via
/// Jacobi). Result is canonicalized. Throws std::invalid_argument for fewer
/// than 4 correspondences and DegenerateGeometry for collinear / rank
/// deficient configurations.
Homography estimate_dlt(std::span<const Correspondence> corrs);

struct RansacConfig {
  double inlier_threshold = 3.0;
  int max_iterations = 2000;
  double confidence = 0.995;
  std::uint64_t seed = 42;

  void validate() const;
};

struct RansacResult {
  Homography h;
  /// Consensus set of the best hypothesis; the returned H is the DLT refit
  /// over exactly these correspondences.
  std::vector<std::uint8_t> inliers;
  std::size_t inlier_count = 0;
  int iterations = 0;
  /// Inlier counts of every evaluated hypothesis, in sampling order.
  std::vector<std::size_t> hypothesis_inliers;
};

/// Seeded RANSAC over uniform 4-subsets with adaptive iteration cap.
/// Throws TooFewMatches (< 4 correspondences) or NoConsensus.
RansacResult ransac_homography(std::span<const Correspondence> corrs, const RansacConfig& cfg);

struct WarpResult {
  Image image;
  /// 1 where the inverse-mapped source coordinate lies inside the source
  /// image, row-major like `image`.
  std::vector<std::uint8_t> mask;
};

/// Inverse warping with bilinear sampling; invalid pixels are 0.
WarpResult warp_perspective(const Image& src, const Homography& h, int out_width, int out_height);

/// Mean distance between H_est(c) and H_true(c) over the four corners of a
/// width x height frame: (0,0), (w-1,0), (w-1,h-1), (0,h-1).
double mean_corner_error(const Homography& estimated, const Homography& truth, int width, int height);

}  // namespace syncvision
