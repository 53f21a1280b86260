#include "syncvision/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

namespace syncvision {

namespace {

void check_dims(int width, int height) {
  if (width < 1 || height < 1)
    throw std::invalid_argument("image dimensions must be positive");
}

}  // namespace

Image::Image(int width, int height, float fill) {
  check_dims(width, height);
  if (!(fill >= 0.0f && fill <= 1.0f))
    throw std::invalid_argument("intensity outside [0,1]");
  width_ = width;
  height_ = height;
  data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

Image::Image(int width, int height, std::vector<float> data) {
  check_dims(width, height);
  if (data.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height))
    throw std::invalid_argument("image data length != width*height");
  for (float v : data)
    if (!(v >= 0.0f && v <= 1.0f)) throw std::invalid_argument("intensity outside [0,1]");
  width_ = width;
  height_ = height;
  data_ = std::move(data);
}

float Image::at_clamped(int x, int y) const {
  x = std::clamp(x, 0, width_ - 1);
  y = std::clamp(y, 0, height_ - 1);
  return data_[index(x, y)];
}

void Image::set(int x, int y, float v) {
  data_[index(x, y)] = std::isnan(v) ? 0.0f : std::clamp(v, 0.0f, 1.0f);
}

std::string_view to_string(InterpMethod m) {
  return m == InterpMethod::Bilinear ? "BILINEAR" : "BICUBIC";
}

InterpMethod parse_interp(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "bilinear") return InterpMethod::Bilinear;
  if (lower == "bicubic") return InterpMethod::Bicubic;
  throw std::invalid_argument("unknown interpolation: " + std::string(name));
}

std::uint8_t to_byte(float v) {
  const double scaled = std::floor(static_cast<double>(v) * 255.0 + 0.5);
  return static_cast<std::uint8_t>(std::clamp(scaled, 0.0, 255.0));
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("sigma must be positive");
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
    sum += k[i + radius];
  }
  for (double& w : k) w /= sum;
  return k;
}

Image gaussian_blur(const Image& img, double sigma) {
  const std::vector<double> k = gaussian_kernel(sigma);
  const int r = static_cast<int>(k.size() / 2);
  const int w = img.width();
  const int h = img.height();

  std::vector<float> tmp(img.size());
  std::vector<float> row(static_cast<std::size_t>(w + 2 * r));
  for (int y = 0; y < h; ++y) {
    for (int x = -r; x < w + r; ++x) row[x + r] = img.at_clamped(x, y);
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = 0; i <= 2 * r; ++i) acc += k[i] * row[x + i];
      tmp[img.index(x, y)] = static_cast<float>(acc);
    }
  }

  std::vector<float> out(img.size());
  std::vector<float> col(static_cast<std::size_t>(h + 2 * r));
  for (int x = 0; x < w; ++x) {
    for (int y = -r; y < h + r; ++y)
      col[y + r] = tmp[img.index(x, std::clamp(y, 0, h - 1))];
    for (int y = 0; y < h; ++y) {
      double acc = 0.0;
      for (int i = 0; i <= 2 * r; ++i) acc += k[i] * col[y + i];
      out[img.index(x, y)] = std::clamp(static_cast<float>(acc), 0.0f, 1.0f);
    }
  }
  return Image(w, h, std::move(out));
}

float sample_bilinear(const Image& img, double x, double y) {
  const double fx0 = std::floor(x);
  const double fy0 = std::floor(y);
  const double fx = x - fx0;
  const double fy = y - fy0;
  // Clamp the base index first so huge coordinates cannot overflow int.
  const double lim_x = img.width();
  const double lim_y = img.height();
  const int x0 = static_cast<int>(std::clamp(fx0, -1.0, lim_x));
  const int y0 = static_cast<int>(std::clamp(fy0, -1.0, lim_y));
  const double p00 = img.at_clamped(x0, y0);
  const double p10 = img.at_clamped(x0 + 1, y0);
  const double p01 = img.at_clamped(x0, y0 + 1);
  const double p11 = img.at_clamped(x0 + 1, y0 + 1);
  const double v = (1 - fx) * (1 - fy) * p00 + fx * (1 - fy) * p10 +
                   (1 - fx) * fy * p01 + fx * fy * p11;
  return static_cast<float>(v);
}

namespace {

// Keys cubic convolution kernel, a = -0.5.
inline double keys(double t) {
  constexpr double a = -0.5;
  t = std::abs(t);
  if (t <= 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
  if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
  return 0.0;
}

}  // namespace

float sample_bicubic(const Image& img, double x, double y) {
  const double fx0 = std::floor(x);
  const double fy0 = std::floor(y);
  const double fx = x - fx0;
  const double fy = y - fy0;
  const int x0 = static_cast<int>(std::clamp(fx0, -2.0, static_cast<double>(img.width()) + 1));
  const int y0 = static_cast<int>(std::clamp(fy0, -2.0, static_cast<double>(img.height()) + 1));
  double wx[4], wy[4];
  for (int i = 0; i < 4; ++i) {
    wx[i] = keys(fx - (i - 1));
    wy[i] = keys(fy - (i - 1));
  }
  double acc = 0.0;
  for (int j = 0; j < 4; ++j) {
    double racc = 0.0;
    for (int i = 0; i < 4; ++i) racc += wx[i] * img.at_clamped(x0 - 1 + i, y0 - 1 + j);
    acc += wy[j] * racc;
  }
  return static_cast<float>(std::clamp(acc, 0.0, 1.0));
}

float sample(const Image& img, double x, double y, InterpMethod method) {
  return method == InterpMethod::Bilinear ? sample_bilinear(img, x, y)
                                          : sample_bicubic(img, x, y);
}

Image upscale(const Image& img, double factor, InterpMethod method) {
  if (!(factor > 0.0) || !std::isfinite(factor))
    throw std::invalid_argument("upscale factor must be positive");
  const double ow = std::round(factor * img.width());
  const double oh = std::round(factor * img.height());
  if (ow < 1.0 || oh < 1.0 || ow > 1 << 20 || oh > 1 << 20)
    throw std::invalid_argument("degenerate upscale output size");
  const int out_w = static_cast<int>(ow);
  const int out_h = static_cast<int>(oh);

  std::vector<float> out(static_cast<std::size_t>(out_w) * out_h);
  for (int y = 0; y < out_h; ++y) {
    const double sy = (y + 0.5) / factor - 0.5;
    for (int x = 0; x < out_w; ++x) {
      const double sx = (x + 0.5) / factor - 0.5;
      out[static_cast<std::size_t>(y) * out_w + x] =
          std::clamp(sample(img, sx, sy, method), 0.0f, 1.0f);
    }
  }
  return Image(out_w, out_h, std::move(out));
}

Image box_downsample(const Image& img, int factor) {
  if (factor < 1) throw std::invalid_argument("downsample factor must be >= 1");
  const int out_w = img.width() / factor;
  const int out_h = img.height() / factor;
  if (out_w < 1 || out_h < 1) throw std::invalid_argument("image smaller than downsample block");
  std::vector<float> out(static_cast<std::size_t>(out_w) * out_h);
  const double norm = 1.0 / (static_cast<double>(factor) * factor);
  for (int y = 0; y < out_h; ++y)
    for (int x = 0; x < out_w; ++x) {
      double acc = 0.0;
      for (int j = 0; j < factor; ++j)
        for (int i = 0; i < factor; ++i) acc += img.at(x * factor + i, y * factor + j);
      out[static_cast<std::size_t>(y) * out_w + x] =
          std::clamp(static_cast<float>(acc * norm), 0.0f, 1.0f);
    }
  return Image(out_w, out_h, std::move(out));
}

}  // namespace syncvision
