#include "syncvision/registration.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "syncvision/error.hpp"
#include "syncvision/linalg.hpp"
#include "syncvision/random.hpp"

namespace syncvision {

Homography canonicalize(const Homography& h) {
  double norm = 0.0;
  for (double v : h.m) norm += v * v;
  norm = std::sqrt(norm);
  if (!(norm > 0.0) || !std::isfinite(norm)) throw DegenerateGeometry("homography is zero or not finite");
  double sign = 1.0;
  if (h.m[8] < 0.0) {
    sign = -1.0;
  } else if (h.m[8] == 0.0) {
    for (double v : h.m)
      if (v != 0.0) {
        sign = v > 0 ? 1.0 : -1.0;
        break;
      }
  }
  Homography out;
  for (std::size_t i = 0; i < 9; ++i) out.m[i] = sign * h.m[i] / norm;
  return out;
}

double canonical_distance(const Homography& a, const Homography& b) {
  const Homography ca = canonicalize(a);
  const Homography cb = canonicalize(b);
  double acc = 0.0;
  for (std::size_t i = 0; i < 9; ++i) acc += (ca.m[i] - cb.m[i]) * (ca.m[i] - cb.m[i]);
  return std::sqrt(acc);
}

Homography compose(const Homography& a, const Homography& b) {
  Homography out;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) acc += a(r, k) * b(k, c);
      out.m[static_cast<std::size_t>(r * 3 + c)] = acc;
    }
  return out;
}

double determinant(const Homography& h) {
  const auto& m = h.m;
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) + m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Homography invert(const Homography& h) {
  const auto& m = h.m;
  const double det = determinant(h);
  double scale = 0.0;
  for (double v : m) scale = std::max(scale, std::abs(v));
  if (scale == 0.0 || std::abs(det) <= 1e-14 * scale * scale * scale)
    throw DegenerateGeometry("homography is singular");
  Homography inv;
  inv.m = {(m[4] * m[8] - m[5] * m[7]) / det, (m[2] * m[7] - m[1] * m[8]) / det, (m[1] * m[5] - m[2] * m[4]) / det,
           (m[5] * m[6] - m[3] * m[8]) / det, (m[0] * m[8] - m[2] * m[6]) / det, (m[2] * m[3] - m[0] * m[5]) / det,
           (m[3] * m[7] - m[4] * m[6]) / det, (m[1] * m[6] - m[0] * m[7]) / det, (m[0] * m[4] - m[1] * m[3]) / det};
  return inv;
}

Point2 apply_homography(const Homography& h, Point2 p) {
  const auto& m = h.m;
  const double w = m[6] * p.x + m[7] * p.y + m[8];
  if (std::abs(w) < 1e-12) throw PointAtInfinity("point maps to infinity");
  return {(m[0] * p.x + m[1] * p.y + m[2]) / w, (m[3] * p.x + m[4] * p.y + m[5]) / w};
}

double reprojection_error(const Homography& h, const Correspondence& c) {
  const Point2 q = apply_homography(h, c.p1);
  return std::hypot(q.x - c.p2.x, q.y - c.p2.y);
}

namespace {

// Similarity taking the centroid to the origin and the mean distance to sqrt(2).
Homography conditioning(std::span<const Point2> pts) {
  double cx = 0, cy = 0;
  for (const auto& p : pts) {
    cx += p.x;
    cy += p.y;
  }
  cx /= static_cast<double>(pts.size());
  cy /= static_cast<double>(pts.size());
  double mean = 0;
  for (const auto& p : pts) mean += std::hypot(p.x - cx, p.y - cy);
  mean /= static_cast<double>(pts.size());
  if (!(mean > 0.0) || !std::isfinite(mean)) throw DegenerateGeometry("coincident points");
  const double s = std::numbers::sqrt2 / mean;
  return {{s, 0, -s * cx, 0, s, -s * cy, 0, 0, 1}};
}

Point2 apply_affine(const Homography& t, Point2 p) {
  return {t.m[0] * p.x + t.m[1] * p.y + t.m[2], t.m[3] * p.x + t.m[4] * p.y + t.m[5]};
}

bool collinear(Point2 a, Point2 b, Point2 c) {
  const double cross = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  return std::abs(cross) < 1e-8;
}

}  // namespace

Homography estimate_dlt(std::span<const Correspondence> corrs) {
  const std::size_t n = corrs.size();
  if (n < 4) throw std::invalid_argument("DLT needs at least 4 correspondences");
  std::vector<Point2> p1(n), p2(n);
  for (std::size_t i = 0; i < n; ++i) {
    p1[i] = corrs[i].p1;
    p2[i] = corrs[i].p2;
    if (!std::isfinite(p1[i].x) || !std::isfinite(p1[i].y) || !std::isfinite(p2[i].x) || !std::isfinite(p2[i].y))
      throw std::invalid_argument("non-finite correspondence");
  }
  const Homography t1 = conditioning(p1);
  const Homography t2 = conditioning(p2);
  for (std::size_t i = 0; i < n; ++i) {
    p1[i] = apply_affine(t1, p1[i]);
    p2[i] = apply_affine(t2, p2[i]);
  }
  if (n == 4) {
    for (int skip = 0; skip < 4; ++skip) {
      Point2 a[3], b[3];
      int k = 0;
      for (int i = 0; i < 4; ++i)
        if (i != skip) {
          a[k] = p1[i];
          b[k] = p2[i];
          ++k;
        }
      if (collinear(a[0], a[1], a[2]) || collinear(b[0], b[1], b[2]))
        throw DegenerateGeometry("three of four points are collinear");
    }
  }

  std::vector<double> ata(81, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = p1[i].x, y = p1[i].y, u = p2[i].x, v = p2[i].y;
    const double r1[9] = {-x, -y, -1, 0, 0, 0, u * x, u * y, u};
    const double r2[9] = {0, 0, 0, -x, -y, -1, v * x, v * y, v};
    for (int a = 0; a < 9; ++a)
      for (int b = a; b < 9; ++b) ata[a * 9 + b] += r1[a] * r1[b] + r2[a] * r2[b];
  }
  for (int a = 0; a < 9; ++a)
    for (int b = 0; b < a; ++b) ata[a * 9 + b] = ata[b * 9 + a];

  const linalg::SymmetricEigen eig = linalg::jacobi_eigen(std::move(ata), 9, 1e-15, 100);
  if (eig.values[7] <= 1e-12 * std::max(eig.values[0], 1e-300))
    throw DegenerateGeometry("correspondences do not determine a unique homography");
  Homography hn;
  std::copy_n(eig.vectors.begin() + 8 * 9, 9, hn.m.begin());

  const Homography h = compose(invert(t2), compose(hn, t1));
  const Homography c = canonicalize(h);
  if (std::abs(determinant(c)) <= 1e-12) throw DegenerateGeometry("estimated homography is rank deficient");
  return c;
}

void RansacConfig::validate() const {
  if (!(inlier_threshold > 0.0)) throw std::invalid_argument("ransac: threshold must be > 0");
  if (max_iterations < 1) throw std::invalid_argument("ransac: max_iterations must be >= 1");
  if (!(confidence > 0.0 && confidence < 1.0)) throw std::invalid_argument("ransac: confidence must be in (0,1)");
}

RansacResult ransac_homography(std::span<const Correspondence> corrs, const RansacConfig& cfg) {
  cfg.validate();
  const std::size_t n = corrs.size();
  if (n < 4) throw TooFewMatches("RANSAC needs at least 4 correspondences");

  Rng rng(cfg.seed);
  RansacResult best;
  std::vector<std::uint8_t> mask(n);
  std::size_t best_count = 0;
  Homography best_h;
  long limit = cfg.max_iterations;
  int it = 0;
  while (it < limit) {
    ++it;
    std::size_t idx[4];
    for (int k = 0; k < 4; ++k) {
      bool dup;
      do {
        idx[k] = static_cast<std::size_t>(rng.below(n));
        dup = false;
        for (int j = 0; j < k; ++j) dup = dup || idx[j] == idx[k];
      } while (dup);
    }
    const Correspondence sample[4] = {corrs[idx[0]], corrs[idx[1]], corrs[idx[2]], corrs[idx[3]]};
    Homography h;
    try {
      h = estimate_dlt(sample);
    } catch (const DegenerateGeometry&) {
      continue;
    }
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      bool in = false;
      try {
        in = reprojection_error(h, corrs[i]) < cfg.inlier_threshold;
      } catch (const PointAtInfinity&) {
      }
      mask[i] = in ? 1 : 0;
      count += in;
    }
    best.hypothesis_inliers.push_back(count);
    if (count > best_count) {
      best_count = count;
      best_h = h;
      best.inliers = mask;
      const double w = static_cast<double>(count) / static_cast<double>(n);
      if (w >= 1.0) {
        limit = it;
      } else {
        const double denom = std::log(1.0 - std::pow(w, 4));
        if (denom < 0.0) {
          const double need = std::ceil(std::log(1.0 - cfg.confidence) / denom);
          limit = std::min<long>(cfg.max_iterations, static_cast<long>(std::min(need, 1e9)));
        }
      }
    }
  }
  best.iterations = it;
  if (best_count < 4) throw NoConsensus("no hypothesis reached 4 inliers");

  std::vector<Correspondence> consensus;
  consensus.reserve(best_count);
  for (std::size_t i = 0; i < n; ++i)
    if (best.inliers[i]) consensus.push_back(corrs[i]);
  try {
    best.h = estimate_dlt(consensus);
  } catch (const DegenerateGeometry&) {
    best.h = best_h;
  }
  best.inlier_count = best_count;
  return best;
}

WarpResult warp_perspective(const Image& src, const Homography& h, int out_width, int out_height) {
  if (out_width < 1 || out_height < 1) throw std::invalid_argument("warp output size must be positive");
  const Homography inv = invert(h);
  const auto& m = inv.m;
  const double max_x = src.width() - 1.0;
  const double max_y = src.height() - 1.0;
  std::vector<float> data(static_cast<std::size_t>(out_width) * out_height, 0.0f);
  std::vector<std::uint8_t> mask(data.size(), 0);
  for (int y = 0; y < out_height; ++y) {
    for (int x = 0; x < out_width; ++x) {
      // Same arithmetic as apply_homography.
      const double w = m[6] * x + m[7] * y + m[8];
      if (std::abs(w) < 1e-12) continue;
      const double sx = (m[0] * x + m[1] * y + m[2]) / w;
      const double sy = (m[3] * x + m[4] * y + m[5]) / w;
      if (!(sx >= 0.0 && sx <= max_x && sy >= 0.0 && sy <= max_y)) continue;
      const std::size_t i = static_cast<std::size_t>(y) * out_width + x;
      data[i] = std::clamp(sample_bilinear(src, sx, sy), 0.0f, 1.0f);
      mask[i] = 1;
    }
  }
  return {Image(out_width, out_height, std::move(data)), std::move(mask)};
}

double mean_corner_error(const Homography& estimated, const Homography& truth, int width, int height) {
  const Point2 corners[4] = {{0, 0}, {width - 1.0, 0}, {width - 1.0, height - 1.0}, {0, height - 1.0}};
  double acc = 0.0;
  for (const Point2& c : corners) {
    const Point2 a = apply_homography(estimated, c);
    const Point2 b = apply_homography(truth, c);
    acc += std::hypot(a.x - b.x, a.y - b.y);
  }
  return acc / 4.0;
}

}  // namespace syncvision
