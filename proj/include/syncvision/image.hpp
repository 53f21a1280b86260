#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace syncvision {

/// Grayscale raster with intensities in [0, 1], row-major.
///
/// The [0, 1] invariant is enforced at every entry point: the data
/// constructor rejects out-of-range values and `set` clamps.
class Image {
 public:
  Image() = default;
  /// Constant image; throws std::invalid_argument for a zero dimension.
  Image(int width, int height, float fill = 0.0f);
  /// Takes ownership of `data` (size must be width*height, values in [0,1]).
  Image(int width, int height, std::vector<float> data);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  float at(int x, int y) const { return data_[index(x, y)]; }
  /// Clamp-to-edge access for any integer coordinate.
  float at_clamped(int x, int y) const;
  void set(int x, int y, float v);

  std::span<const float> pixels() const { return data_; }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  bool operator==(const Image&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

enum class InterpMethod { Bilinear, Bicubic };

std::string_view to_string(InterpMethod m);
/// Accepts "bilinear" / "bicubic" (case-insensitive); throws otherwise.
InterpMethod parse_interp(std::string_view name);

/// Reads 8-bit binary PGM (P5) or 8-bit grayscale / RGB(A) PNG.
/// RGB is reduced with luma weights 0.299 / 0.587 / 0.114.
/// Throws FormatError for unreadable or unsupported files.
Image load_image(const std::filesystem::path& path);

/// Writes 8-bit PGM or PNG, chosen by extension. Each byte is
/// floor(v * 255 + 0.5) clamped to [0, 255].
void save_image(const Image& img, const std::filesystem::path& path);

/// Quantizes an intensity to its 8-bit code (round half up).
std::uint8_t to_byte(float v);

/// Separable Gaussian blur, radius ceil(3 sigma), clamp-to-edge borders.
Image gaussian_blur(const Image& img, double sigma);

/// Normalized 1-D Gaussian kernel of radius ceil(3 sigma); index `radius` is
/// the center tap.
std::vector<double> gaussian_kernel(double sigma);

/// Clamp-to-edge bilinear sample at continuous pixel coordinates.
float sample_bilinear(const Image& img, double x, double y);

/// Keys cubic convolution (a = -0.5) over the 4x4 neighbourhood, clamped to
/// [0, 1].
float sample_bicubic(const Image& img, double x, double y);

float sample(const Image& img, double x, double y, InterpMethod method);

/// Resamples to round(factor*w) x round(factor*h) with the half-pixel-center
/// mapping x_src = (x_dst + 0.5) / factor - 0.5.
Image upscale(const Image& img, double factor, InterpMethod method);

/// Mean over non-overlapping factor x factor blocks; trailing partial blocks
/// are dropped.
Image box_downsample(const Image& img, int factor);

}  // namespace syncvision
