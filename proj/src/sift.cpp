#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <stdexcept>
#include <tuple>

#include "syncvision/features.hpp"
#include "syncvision/linalg.hpp"

namespace syncvision {

void SiftConfig::validate() const {
  if (octaves < 1) throw std::invalid_argument("sift: octaves must be >= 1");
  if (scales_per_octave < 1) throw std::invalid_argument("sift: scales_per_octave must be >= 1");
  if (!(sigma0 > 0.0)) throw std::invalid_argument("sift: sigma0 must be > 0");
  if (!(contrast_threshold > 0.0)) throw std::invalid_argument("sift: contrast_threshold must be > 0");
  if (!(edge_ratio > 1.0)) throw std::invalid_argument("sift: edge_ratio must be > 1");
  if (orientation_bins < 4) throw std::invalid_argument("sift: orientation_bins must be >= 4");
  if (!(peak_ratio > 0.0 && peak_ratio <= 1.0)) throw std::invalid_argument("sift: peak_ratio must be in (0,1]");
  if (!(input_sigma >= 0.0 && input_sigma < sigma0)) throw std::invalid_argument("sift: input_sigma must be in [0, sigma0)");
  if (!(descriptor_clamp > 0.0 && descriptor_clamp < 1.0)) throw std::invalid_argument("sift: descriptor_clamp must be in (0,1)");
}

bool normalize_and_clamp(std::array<float, kSiftDescriptorSize>& v, double clamp) {
  // The fixed point of "normalize, clamp, renormalize": scale c with
  // sum_i min(c v_i, clamp)^2 = 1, found by trying k = 0, 1, ... clipped
  // components in descending order.
  std::array<double, kSiftDescriptorSize> sorted;
  for (int i = 0; i < kSiftDescriptorSize; ++i) sorted[i] = std::max(0.0f, v[i]);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  std::array<double, kSiftDescriptorSize + 1> tail{};  // tail[k] = sum_{i>=k} sorted[i]^2
  for (int i = kSiftDescriptorSize - 1; i >= 0; --i) tail[i] = tail[i + 1] + sorted[i] * sorted[i];
  if (tail[0] <= 0.0) return false;

  const double c2 = clamp * clamp;
  double scale = -1.0;
  for (int k = 0; k < kSiftDescriptorSize; ++k) {
    const double budget = 1.0 - k * c2;
    if (budget <= 0.0 || tail[k] <= 0.0) break;
    const double c = std::sqrt(budget / tail[k]);
    const bool head_ok = k == 0 || c * sorted[k - 1] >= clamp;
    const bool rest_ok = c * sorted[k] <= clamp;
    if (head_ok && rest_ok) {
      scale = c;
      break;
    }
  }
  if (scale < 0.0) return false;
  for (auto& x : v) x = static_cast<float>(std::min(scale * std::max(0.0f, x), clamp));
  return true;
}

namespace {

constexpr int kImageBorder = 5;
constexpr int kMaxInterpSteps = 5;
constexpr int kDescWidth = 4;
constexpr int kDescBins = 8;
constexpr double kDescScaleFactor = 3.0;
constexpr double kOriSigmaFactor = 1.5;
constexpr double kOriRadiusFactor = 3.0 * kOriSigmaFactor;

// Signed raster used for difference-of-Gaussian layers.
struct Plane {
  int w = 0, h = 0;
  std::vector<float> v;
  float operator()(int x, int y) const { return v[static_cast<std::size_t>(y) * w + x]; }
};

struct Octave {
  std::vector<Image> gauss;  // scales_per_octave + 3
  std::vector<Plane> dog;    // scales_per_octave + 2
};

Image take_every_other(const Image& img) {
  const int w = img.width() / 2, h = img.height() / 2;
  std::vector<float> out(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out[static_cast<std::size_t>(y) * w + x] = img.at(2 * x, 2 * y);
  return Image(w, h, std::move(out));
}

std::vector<Octave> build_pyramid(const Image& base, int n_octaves, const SiftConfig& cfg) {
  const int s = cfg.scales_per_octave;
  const double k = std::pow(2.0, 1.0 / s);
  std::vector<double> increments(static_cast<std::size_t>(s + 3), 0.0);
  for (int i = 1; i < s + 3; ++i) {
    const double prev = cfg.sigma0 * std::pow(k, i - 1);
    const double total = prev * k;
    increments[i] = std::sqrt(total * total - prev * prev);
  }

  std::vector<Octave> pyr(static_cast<std::size_t>(n_octaves));
  for (int o = 0; o < n_octaves; ++o) {
    Octave& oct = pyr[o];
    if (o == 0)
      oct.gauss.push_back(base);
    else
      oct.gauss.push_back(take_every_other(pyr[o - 1].gauss[s]));
    for (int i = 1; i < s + 3; ++i) oct.gauss.push_back(gaussian_blur(oct.gauss.back(), increments[i]));
    for (int i = 0; i + 1 < s + 3; ++i) {
      const Image& a = oct.gauss[i];
      const Image& b = oct.gauss[i + 1];
      Plane d{a.width(), a.height(), std::vector<float>(a.size())};
      const auto pa = a.pixels();
      const auto pb = b.pixels();
      for (std::size_t j = 0; j < d.v.size(); ++j) d.v[j] = pb[j] - pa[j];
      oct.dog.push_back(std::move(d));
    }
  }
  return pyr;
}

bool is_extremum(const std::vector<Plane>& dog, int layer, int x, int y) {
  const float v = dog[layer](x, y);
  if (v > 0) {
    for (int l = layer - 1; l <= layer + 1; ++l)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (l == layer && dx == 0 && dy == 0) continue;
          if (dog[l](x + dx, y + dy) > v) return false;
        }
    return true;
  }
  if (v < 0) {
    for (int l = layer - 1; l <= layer + 1; ++l)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (l == layer && dx == 0 && dy == 0) continue;
          if (dog[l](x + dx, y + dy) < v) return false;
        }
    return true;
  }
  return false;
}

struct Refined {
  int layer, x, y;
  double ox, oy, ol;  // subpixel offsets
  double contrast;
};

// Quadratic fit of D(x, y, sigma) around a discrete extremum; moves to the
// neighbouring sample while any offset exceeds 0.5.
bool refine(const std::vector<Plane>& dog, int s, int layer, int x, int y, const SiftConfig& cfg, Refined& out) {
  const int w = dog[0].w, h = dog[0].h;
  double ox = 0, oy = 0, ol = 0;
  bool converged = false;
  for (int it = 0; it < kMaxInterpSteps; ++it) {
    const Plane& prev = dog[layer - 1];
    const Plane& cur = dog[layer];
    const Plane& next = dog[layer + 1];
    const double v2 = 2.0 * cur(x, y);
    const double dx = 0.5 * (cur(x + 1, y) - cur(x - 1, y));
    const double dy = 0.5 * (cur(x, y + 1) - cur(x, y - 1));
    const double ds = 0.5 * (next(x, y) - prev(x, y));
    const double dxx = cur(x + 1, y) + cur(x - 1, y) - v2;
    const double dyy = cur(x, y + 1) + cur(x, y - 1) - v2;
    const double dss = next(x, y) + prev(x, y) - v2;
    const double dxy = 0.25 * (cur(x + 1, y + 1) - cur(x - 1, y + 1) - cur(x + 1, y - 1) + cur(x - 1, y - 1));
    const double dxs = 0.25 * (next(x + 1, y) - next(x - 1, y) - prev(x + 1, y) + prev(x - 1, y));
    const double dys = 0.25 * (next(x, y + 1) - next(x, y - 1) - prev(x, y + 1) + prev(x, y - 1));
    std::vector<double> hess{dxx, dxy, dxs, dxy, dyy, dys, dxs, dys, dss};
    std::vector<double> sol;
    if (!linalg::solve_linear(hess, {-dx, -dy, -ds}, 3, sol, 1e-12)) return false;
    ox = sol[0];
    oy = sol[1];
    ol = sol[2];
    if (std::abs(ox) < 0.5 && std::abs(oy) < 0.5 && std::abs(ol) < 0.5) {
      converged = true;
      out.contrast = cur(x, y) + 0.5 * (dx * ox + dy * oy + ds * ol);
      break;
    }
    if (std::abs(ox) > 1e6 || std::abs(oy) > 1e6 || std::abs(ol) > 1e6) return false;
    x += static_cast<int>(std::lround(ox));
    y += static_cast<int>(std::lround(oy));
    layer += static_cast<int>(std::lround(ol));
    if (layer < 1 || layer > s || x < kImageBorder || x >= w - kImageBorder || y < kImageBorder ||
        y >= h - kImageBorder)
      return false;
  }
  if (!converged) return false;
  if (std::abs(out.contrast) < cfg.contrast_threshold) return false;

  const Plane& cur = dog[layer];
  const double v2 = 2.0 * cur(x, y);
  const double dxx = cur(x + 1, y) + cur(x - 1, y) - v2;
  const double dyy = cur(x, y + 1) + cur(x, y - 1) - v2;
  const double dxy = 0.25 * (cur(x + 1, y + 1) - cur(x - 1, y + 1) - cur(x + 1, y - 1) + cur(x - 1, y - 1));
  const double tr = dxx + dyy;
  const double det = dxx * dyy - dxy * dxy;
  const double r = cfg.edge_ratio;
  if (det <= 0.0 || tr * tr * r >= (r + 1) * (r + 1) * det) return false;

  out.layer = layer;
  out.x = x;
  out.y = y;
  out.ox = ox;
  out.oy = oy;
  out.ol = ol;
  return true;
}

// Returns the dominant orientations (radians, [0, 2pi)) at (x, y) in `img`.
std::vector<double> dominant_orientations(const Image& img, int x, int y, double scale, const SiftConfig& cfg) {
  const int n = cfg.orientation_bins;
  const int radius = static_cast<int>(std::lround(kOriRadiusFactor * scale));
  const double sigma = kOriSigmaFactor * scale;
  const double expf = -1.0 / (2.0 * sigma * sigma);
  std::vector<double> hist(static_cast<std::size_t>(n), 0.0);
  for (int j = -radius; j <= radius; ++j) {
    const int yy = y + j;
    if (yy <= 0 || yy >= img.height() - 1) continue;
    for (int i = -radius; i <= radius; ++i) {
      const int xx = x + i;
      if (xx <= 0 || xx >= img.width() - 1) continue;
      const double gx = img.at(xx + 1, yy) - img.at(xx - 1, yy);
      const double gy = img.at(xx, yy + 1) - img.at(xx, yy - 1);
      const double mag = std::hypot(gx, gy);
      if (mag == 0.0) continue;
      double angle = std::atan2(gy, gx);
      if (angle < 0) angle += 2.0 * std::numbers::pi;
      int bin = static_cast<int>(std::lround(n * angle / (2.0 * std::numbers::pi)));
      bin = ((bin % n) + n) % n;
      hist[bin] += std::exp((i * i + j * j) * expf) * mag;
    }
  }

  std::vector<double> smooth(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto at = [&](int k) { return hist[((i + k) % n + n) % n]; };
    smooth[i] = (at(-2) + at(2)) * (1.0 / 16) + (at(-1) + at(1)) * (4.0 / 16) + at(0) * (6.0 / 16);
  }
  const double max_v = *std::max_element(smooth.begin(), smooth.end());
  std::vector<double> out;
  if (max_v <= 0.0) return out;
  for (int i = 0; i < n; ++i) {
    const double l = smooth[(i - 1 + n) % n];
    const double r = smooth[(i + 1) % n];
    const double c = smooth[i];
    if (c > l && c > r && c >= cfg.peak_ratio * max_v) {
      double bin = i + 0.5 * (l - r) / (l - 2.0 * c + r);
      bin = bin < 0 ? bin + n : (bin >= n ? bin - n : bin);
      double angle = 2.0 * std::numbers::pi * bin / n;
      if (angle >= 2.0 * std::numbers::pi) angle -= 2.0 * std::numbers::pi;
      if (angle < 0.0) angle = 0.0;
      out.push_back(angle);
    }
  }
  return out;
}

bool compute_descriptor(const Image& img, double fx, double fy, double scale, double orientation,
                        double clamp, SiftDescriptor& out) {
  constexpr int d = kDescWidth;
  constexpr int n = kDescBins;
  const double hist_width = kDescScaleFactor * scale;
  int radius = static_cast<int>(std::lround(hist_width * std::numbers::sqrt2 * (d + 1) * 0.5));
  radius = std::min(radius, static_cast<int>(std::hypot(img.width(), img.height())));
  const double cos_t = std::cos(orientation) / hist_width;
  const double sin_t = std::sin(orientation) / hist_width;
  const double exp_scale = -1.0 / (d * d * 0.5);
  const double bins_per_rad = n / (2.0 * std::numbers::pi);
  const int x0 = static_cast<int>(std::lround(fx));
  const int y0 = static_cast<int>(std::lround(fy));

  // (d+2) x (d+2) x (n+2) with a guard ring so interpolation never branches.
  std::vector<double> hist(static_cast<std::size_t>((d + 2) * (d + 2) * (n + 2)), 0.0);
  auto H = [&](int r, int c, int o) -> double& { return hist[(static_cast<std::size_t>(r) * (d + 2) + c) * (n + 2) + o]; };

  for (int j = -radius; j <= radius; ++j) {
    for (int i = -radius; i <= radius; ++i) {
      // Offset expressed in the keypoint frame, in units of cells.
      const double c_rot = i * cos_t + j * sin_t;
      const double r_rot = -i * sin_t + j * cos_t;
      const double rbin = r_rot + d / 2 - 0.5;
      const double cbin = c_rot + d / 2 - 0.5;
      if (!(rbin > -1 && rbin < d && cbin > -1 && cbin < d)) continue;
      const int xx = x0 + i, yy = y0 + j;
      if (xx <= 0 || yy <= 0 || xx >= img.width() - 1 || yy >= img.height() - 1) continue;
      const double gx = img.at(xx + 1, yy) - img.at(xx - 1, yy);
      const double gy = img.at(xx, yy + 1) - img.at(xx, yy - 1);
      const double mag = std::hypot(gx, gy);
      if (mag == 0.0) continue;
      double angle = std::atan2(gy, gx) - orientation;
      angle = std::fmod(angle, 2.0 * std::numbers::pi);
      if (angle < 0) angle += 2.0 * std::numbers::pi;
      double obin = angle * bins_per_rad;
      const double weight = std::exp((c_rot * c_rot + r_rot * r_rot) * exp_scale) * mag;

      const int r0 = static_cast<int>(std::floor(rbin));
      const int c0 = static_cast<int>(std::floor(cbin));
      int o0 = static_cast<int>(std::floor(obin));
      const double dr = rbin - r0, dc = cbin - c0, dobin = obin - o0;
      o0 = ((o0 % n) + n) % n;

      for (int a = 0; a <= 1; ++a) {
        const double wr = a ? dr : 1 - dr;
        for (int b = 0; b <= 1; ++b) {
          const double wc = b ? dc : 1 - dc;
          for (int e = 0; e <= 1; ++e) {
            const double wo = e ? dobin : 1 - dobin;
            H(r0 + 1 + a, c0 + 1 + b, (o0 + e) % n) += weight * wr * wc * wo;
          }
        }
      }
    }
  }

  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c)
      for (int o = 0; o < n; ++o) out.values[(r * d + c) * n + o] = static_cast<float>(H(r + 1, c + 1, o));
  return normalize_and_clamp(out.values, clamp);
}

}  // namespace

SiftFeatures detect_sift(const Image& img, const SiftConfig& cfg) {
  cfg.validate();
  SiftFeatures out;

  Image base;
  double base_scale = 1.0;  // base-pyramid pixel -> input pixel
  double have_sigma = cfg.input_sigma;
  if (cfg.double_base) {
    base = upscale(img, 2.0, InterpMethod::Bilinear);
    base_scale = 0.5;
    have_sigma *= 2.0;
  } else {
    base = img;
  }
  if (cfg.sigma0 > have_sigma) {
    const double diff = std::sqrt(cfg.sigma0 * cfg.sigma0 - have_sigma * have_sigma);
    base = gaussian_blur(base, diff);
  }

  const int min_dim = std::min(base.width(), base.height());
  int n_octaves = 0;
  for (int dim = min_dim; n_octaves < cfg.octaves && dim >= 2 * kImageBorder + 8; dim /= 2) ++n_octaves;
  if (n_octaves == 0) return out;

  const int s = cfg.scales_per_octave;
  const std::vector<Octave> pyr = build_pyramid(base, n_octaves, cfg);
  const float prefilter = static_cast<float>(0.5 * cfg.contrast_threshold);

  for (int o = 0; o < n_octaves; ++o) {
    const Octave& oct = pyr[o];
    const int w = oct.dog[0].w, h = oct.dog[0].h;
    const double octave_scale = std::ldexp(1.0, o) * base_scale;
    std::set<std::tuple<int, int, int>> seen;
    for (int layer = 1; layer <= s; ++layer) {
      const Plane& cur = oct.dog[layer];
      for (int y = kImageBorder; y < h - kImageBorder; ++y) {
        for (int x = kImageBorder; x < w - kImageBorder; ++x) {
          if (std::abs(cur(x, y)) <= prefilter) continue;
          if (!is_extremum(oct.dog, layer, x, y)) continue;
          Refined ref{};
          if (!refine(oct.dog, s, layer, x, y, cfg, ref)) continue;
          if (!seen.insert({ref.layer, ref.y, ref.x}).second) continue;

          const double scale_oct = cfg.sigma0 * std::pow(2.0, (ref.layer + ref.ol) / s);
          const double px = (ref.x + ref.ox) * octave_scale;
          const double py = (ref.y + ref.oy) * octave_scale;
          if (px < 0 || py < 0 || px >= img.width() || py >= img.height()) continue;

          const Image& g = oct.gauss[ref.layer];
          for (double theta : dominant_orientations(g, ref.x, ref.y, scale_oct, cfg)) {
            SiftDescriptor desc;
            if (!compute_descriptor(g, ref.x + ref.ox, ref.y + ref.oy, scale_oct, theta, cfg.descriptor_clamp, desc))
              continue;
            Keypoint kp;
            kp.x = px;
            kp.y = py;
            kp.octave = o;
            kp.sigma = scale_oct * octave_scale;
            kp.orientation = theta;
            kp.response = std::abs(ref.contrast);
            kp.source = FeatureSource::Sift;
            out.keypoints.push_back(kp);
            out.descriptors.push_back(desc);
          }
        }
      }
    }
  }
  return out;
}

}  // namespace syncvision
