#include "syncvision/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "syncvision/error.hpp"

namespace syncvision {

namespace {

std::string lowercase(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

void check_pair(const Image& a, const Image& b, PixelMask mask) {
  if (a.width() != b.width() || a.height() != b.height())
    throw std::invalid_argument("images differ in size");
  if (!mask.empty() && mask.size() != a.size()) throw std::invalid_argument("mask size differs from image size");
}

std::vector<double> scaled(const Image& img, MetricScale scale) {
  const auto px = img.pixels();
  std::vector<double> out(px.size());
  for (std::size_t i = 0; i < px.size(); ++i)
    out[i] = scale == MetricScale::EightBit ? static_cast<double>(to_byte(px[i])) : static_cast<double>(px[i]);
  return out;
}

bool selected(PixelMask mask, std::size_t i) { return mask.empty() || mask[i] != 0; }

double ssim_index(double mx, double my, double vx, double vy, double cxy, double c1, double c2) {
  return ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
}

// Integral image of the mask (or of all-ones when empty), (w+1) x (h+1).
std::vector<std::size_t> mask_integral(int w, int h, PixelMask mask) {
  std::vector<std::size_t> s(static_cast<std::size_t>(w + 1) * (h + 1), 0);
  for (int y = 0; y < h; ++y) {
    std::size_t row = 0;
    for (int x = 0; x < w; ++x) {
      row += selected(mask, static_cast<std::size_t>(y) * w + x) ? 1 : 0;
      s[static_cast<std::size_t>(y + 1) * (w + 1) + x + 1] = s[static_cast<std::size_t>(y) * (w + 1) + x + 1] + row;
    }
  }
  return s;
}

template <typename F>
void for_each_window(int w, int h, int win, PixelMask mask, F&& f) {
  const int r = win / 2;
  const auto integral = mask_integral(w, h, mask);
  const std::size_t full = static_cast<std::size_t>(win) * win;
  auto box = [&](int x0, int y0) {
    const int x1 = x0 + win, y1 = y0 + win;
    return integral[static_cast<std::size_t>(y1) * (w + 1) + x1] - integral[static_cast<std::size_t>(y0) * (w + 1) + x1] -
           integral[static_cast<std::size_t>(y1) * (w + 1) + x0] + integral[static_cast<std::size_t>(y0) * (w + 1) + x0];
  };
  for (int cy = r; cy + r < h; ++cy)
    for (int cx = r; cx + r < w; ++cx)
      if (box(cx - r, cy - r) == full) f(cx, cy);
}

}  // namespace

std::string_view to_string(MetricScale s) { return s == MetricScale::Unit ? "unit" : "eightbit"; }

MetricScale parse_metric_scale(std::string_view name) {
  const std::string s = lowercase(name);
  if (s == "unit") return MetricScale::Unit;
  if (s == "eightbit" || s == "8bit") return MetricScale::EightBit;
  throw std::invalid_argument("unknown metric scale: " + std::string(name));
}

std::string_view to_string(SsimMode m) { return m == SsimMode::Global ? "global" : "windowed"; }

SsimMode parse_ssim_mode(std::string_view name) {
  const std::string s = lowercase(name);
  if (s == "global") return SsimMode::Global;
  if (s == "windowed") return SsimMode::Windowed;
  throw std::invalid_argument("unknown SSIM mode: " + std::string(name));
}

double mse(const Image& i, const Image& k, MetricScale scale, PixelMask mask) {
  check_pair(i, k, mask);
  const auto a = scaled(i, scale);
  const auto b = scaled(k, scale);
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (!selected(mask, j)) continue;
    const double d = a[j] - b[j];
    acc += d * d;
    ++n;
  }
  if (n == 0) throw EvaluationSkipped("mask selects no pixels");
  return acc / static_cast<double>(n);
}

double psnr_from_mse(double m, MetricScale scale) {
  if (m <= 0.0) return std::numeric_limits<double>::infinity();
  const double max = scale == MetricScale::EightBit ? 255.0 : 1.0;
  return 10.0 * std::log10(max * max / m);
}

double psnr(const Image& i, const Image& k, MetricScale scale, PixelMask mask) {
  return psnr_from_mse(mse(i, k, scale, mask), scale);
}

std::size_t ssim_window_count(int width, int height, const SsimParams& params, PixelMask mask) {
  std::size_t n = 0;
  for_each_window(width, height, params.window, mask, [&](int, int) { ++n; });
  return n;
}

double ssim(const Image& x, const Image& y, const SsimParams& params, PixelMask mask) {
  check_pair(x, y, mask);
  if (!(params.k1 > 0.0 && params.k2 > 0.0)) throw std::invalid_argument("ssim: k1, k2 must be positive");
  const auto a = scaled(x, params.scale);
  const auto b = scaled(y, params.scale);
  const double c1 = params.c1();
  const double c2 = params.c2();

  std::size_t selected_count = 0;
  for (std::size_t i = 0; i < a.size(); ++i) selected_count += selected(mask, i) ? 1 : 0;
  if (selected_count == 0) throw EvaluationSkipped("mask selects no pixels");

  if (params.mode == SsimMode::Global) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (selected(mask, i)) {
        mx += a[i];
        my += b[i];
      }
    mx /= static_cast<double>(selected_count);
    my /= static_cast<double>(selected_count);
    double vx = 0, vy = 0, cxy = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
      if (selected(mask, i)) {
        vx += (a[i] - mx) * (a[i] - mx);
        vy += (b[i] - my) * (b[i] - my);
        cxy += (a[i] - mx) * (b[i] - my);
      }
    const double n = static_cast<double>(selected_count);
    return ssim_index(mx, my, vx / n, vy / n, cxy / n, c1, c2);
  }

  const int win = params.window;
  if (win < 1 || win % 2 == 0) throw std::invalid_argument("ssim: window must be odd and positive");
  const int w = x.width(), h = x.height();
  if (w < win || h < win) throw std::invalid_argument("ssim: image smaller than the SSIM window");
  const int r = win / 2;

  std::vector<double> g(static_cast<std::size_t>(win));
  double gs = 0.0;
  for (int i = -r; i <= r; ++i) {
    g[i + r] = std::exp(-0.5 * i * i / (params.window_sigma * params.window_sigma));
    gs += g[i + r];
  }
  for (double& v : g) v /= gs;

  // Horizontal pass for the five moment images, valid columns only.
  const int vw = w - 2 * r;
  const std::size_t hn = static_cast<std::size_t>(vw) * h;
  std::vector<double> hx(hn), hy(hn), hxx(hn), hyy(hn), hxy(hn);
  for (int yy = 0; yy < h; ++yy)
    for (int cx = 0; cx < vw; ++cx) {
      double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
      for (int k = 0; k < win; ++k) {
        const std::size_t i = static_cast<std::size_t>(yy) * w + cx + k;
        const double wk = g[k];
        sx += wk * a[i];
        sy += wk * b[i];
        sxx += wk * a[i] * a[i];
        syy += wk * b[i] * b[i];
        sxy += wk * a[i] * b[i];
      }
      const std::size_t o = static_cast<std::size_t>(yy) * vw + cx;
      hx[o] = sx;
      hy[o] = sy;
      hxx[o] = sxx;
      hyy[o] = syy;
      hxy[o] = sxy;
    }

  double total = 0.0;
  std::size_t count = 0;
  for_each_window(w, h, win, mask, [&](int cx, int cy) {
    double mx = 0, my = 0, exx = 0, eyy = 0, exy = 0;
    for (int k = 0; k < win; ++k) {
      const std::size_t o = static_cast<std::size_t>(cy - r + k) * vw + (cx - r);
      const double wk = g[k];
      mx += wk * hx[o];
      my += wk * hy[o];
      exx += wk * hxx[o];
      eyy += wk * hyy[o];
      exy += wk * hxy[o];
    }
    total += ssim_index(mx, my, exx - mx * mx, eyy - my * my, exy - mx * my, c1, c2);
    ++count;
  });
  if (count == 0) throw std::invalid_argument("ssim: no full window fits inside the mask");
  return total / static_cast<double>(count);
}

double average_precision(const RetrievalRanking& r) {
  std::size_t hits = 0;
  double acc = 0.0;
  for (std::size_t k = 0; k < r.relevant.size(); ++k) {
    if (r.relevant[k] > 1) throw std::invalid_argument("relevance flags must be 0 or 1");
    if (!r.relevant[k]) continue;
    ++hits;
    acc += static_cast<double>(hits) / static_cast<double>(k + 1);
  }
  if (r.total_relevant == 0) throw std::invalid_argument("average precision undefined with no relevant items");
  if (r.total_relevant < hits) throw std::invalid_argument("total_relevant below retrieved relevant count");
  return acc / static_cast<double>(r.total_relevant);
}

double mean_average_precision(std::span<const double> aps) {
  if (aps.empty()) throw std::invalid_argument("mAP of an empty list");
  double acc = 0.0;
  for (double v : aps) acc += v;
  return acc / static_cast<double>(aps.size());
}

}  // namespace syncvision
