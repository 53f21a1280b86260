#include <algorithm>
#include <cmath>
#include <numbers>

#include "syncvision/features.hpp"

namespace syncvision {

std::string_view to_string(FeatureSource s) { return s == FeatureSource::Sift ? "SIFT" : "ORB"; }

int hamming_distance(const OrbDescriptor& a, const OrbDescriptor& b) {
  int d = 0;
  for (int i = 0; i < kOrbDescriptorBytes; ++i) d += std::popcount(static_cast<std::uint8_t>(a.bits[i] ^ b.bits[i]));
  return d;
}

double fast_score(const Image& img, int x, int y, double threshold) {
  const double p = img.at(x, y);
  // +1 brighter, -1 darker, 0 similar.
  int state[16];
  double diff[16];
  bool any_bright = false, any_dark = false;
  for (int i = 0; i < 16; ++i) {
    const double v = img.at(x + kFastCircle[i][0], y + kFastCircle[i][1]);
    diff[i] = std::abs(v - p);
    if (v > p + threshold) {
      state[i] = 1;
      any_bright = true;
    } else if (v < p - threshold) {
      state[i] = -1;
      any_dark = true;
    } else {
      state[i] = 0;
    }
  }
  if (!any_bright && !any_dark) return 0.0;

  // Longest circular run of equal nonzero state; a full circle has length 16.
  int best_len = 0;
  double best_score = 0.0;
  for (int sign : {1, -1}) {
    bool all = true;
    for (int i = 0; i < 16; ++i) all = all && state[i] == sign;
    if (all) {
      double s = 0.0;
      for (int i = 0; i < 16; ++i) s += diff[i];
      return s;
    }
    for (int start = 0; start < 16; ++start) {
      // Only start at the beginning of a run.
      if (state[start] != sign || state[(start + 15) % 16] == sign) continue;
      int len = 0;
      double s = 0.0;
      while (len < 16 && state[(start + len) % 16] == sign) {
        s += diff[(start + len) % 16];
        ++len;
      }
      if (len > best_len || (len == best_len && s > best_score)) {
        best_len = len;
        best_score = s;
      }
    }
  }
  return best_len >= 9 ? best_score : 0.0;
}

std::vector<Keypoint> detect_fast(const Image& img, double threshold) {
  std::vector<Keypoint> out;
  const int w = img.width();
  const int h = img.height();
  if (w < 7 || h < 7) return out;

  std::vector<double> score(img.size(), 0.0);
  for (int y = 3; y < h - 3; ++y)
    for (int x = 3; x < w - 3; ++x) score[img.index(x, y)] = fast_score(img, x, y, threshold);

  for (int y = 3; y < h - 3; ++y) {
    for (int x = 3; x < w - 3; ++x) {
      const double s = score[img.index(x, y)];
      if (s <= 0.0) continue;
      bool keep = true;
      for (int dy = -1; dy <= 1 && keep; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          const int nx = x + dx, ny = y + dy;
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const double ns = score[img.index(nx, ny)];
          const bool earlier = dy < 0 || (dy == 0 && dx < 0);
          if (ns > s || (ns == s && earlier)) {
            keep = false;
            break;
          }
        }
      }
      if (!keep) continue;
      Keypoint kp;
      kp.x = x;
      kp.y = y;
      kp.response = s;
      kp.source = FeatureSource::Orb;
      out.push_back(kp);
    }
  }
  return out;
}

double harris_response(const Image& img, int x, int y, double k, int block) {
  const int r = block / 2;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (int j = -r; j <= r; ++j) {
    for (int i = -r; i <= r; ++i) {
      const int cx = x + i, cy = y + j;
      auto I = [&](int dx, int dy) { return static_cast<double>(img.at_clamped(cx + dx, cy + dy)); };
      const double gx = (I(1, -1) + 2 * I(1, 0) + I(1, 1) - I(-1, -1) - 2 * I(-1, 0) - I(-1, 1)) / 8.0;
      const double gy = (I(-1, 1) + 2 * I(0, 1) + I(1, 1) - I(-1, -1) - 2 * I(0, -1) - I(1, -1)) / 8.0;
      sxx += gx * gx;
      syy += gy * gy;
      sxy += gx * gy;
    }
  }
  const double det = sxx * syy - sxy * sxy;
  const double tr = sxx + syy;
  return det - k * tr * tr;
}

double orientation_intensity_centroid(const Image& img, const Keypoint& kp, int radius) {
  const int cx = static_cast<int>(std::lround(kp.x));
  const int cy = static_cast<int>(std::lround(kp.y));
  double m00 = 0.0, m10 = 0.0, m01 = 0.0;
  const int r2 = radius * radius;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      if (dx * dx + dy * dy > r2) continue;
      const double v = img.at_clamped(cx + dx, cy + dy);
      m00 += v;
      m10 += dx * v;
      m01 += dy * v;
    }
  }
  // Rounding residue from cancelling sums is not an orientation.
  if (std::hypot(m10, m01) <= 1e-9 * std::max(m00, 1e-300)) return 0.0;
  double theta = std::atan2(m01, m10);
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  if (theta >= 2.0 * std::numbers::pi) theta = 0.0;
  return theta;
}

}  // namespace syncvision
