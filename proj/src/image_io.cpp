#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

#include "syncvision/error.hpp"
#include "syncvision/image.hpp"

namespace syncvision {

namespace {

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

// PNM header token reader: skips whitespace and '#' comments.
bool read_pnm_token(std::istream& in, std::string& tok) {
  tok.clear();
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (!std::isspace(c)) break;
  }
  if (c == EOF) return false;
  tok.push_back(static_cast<char>(c));
  while ((c = in.peek()) != EOF && !std::isspace(c) && c != '#') tok.push_back(static_cast<char>(in.get()));
  return true;
}

int parse_header_int(std::istream& in, const char* what) {
  std::string tok;
  if (!read_pnm_token(in, tok)) throw FormatError(std::string("PGM: missing ") + what);
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size()) throw FormatError(std::string("PGM: bad ") + what);
    return v;
  } catch (const std::logic_error&) {
    throw FormatError(std::string("PGM: bad ") + what);
  }
}

Image load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::string magic;
  if (!read_pnm_token(in, magic) || magic != "P5")
    throw FormatError("not a binary PGM (P5): " + path.string());
  const int w = parse_header_int(in, "width");
  const int h = parse_header_int(in, "height");
  const int maxval = parse_header_int(in, "maxval");
  if (w < 1 || h < 1) throw FormatError("PGM: bad dimensions");
  if (maxval != 255) throw FormatError("PGM: unsupported bit depth (maxval " + std::to_string(maxval) + ")");
  in.get();  // single whitespace byte after maxval
  std::vector<unsigned char> raw(static_cast<std::size_t>(w) * h);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) throw FormatError("PGM: truncated pixel data");
  std::vector<float> data(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) data[i] = static_cast<float>(raw[i]) / 255.0f;
  return Image(w, h, std::move(data));
}

void save_pgm(const Image& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  std::vector<unsigned char> raw(img.size());
  const auto px = img.pixels();
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = to_byte(px[i]);
  out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_error_fn(png_structp png, png_const_charp msg) {
  auto* err = static_cast<std::string*>(png_get_error_ptr(png));
  if (err) *err = msg;
  png_longjmp(png, 1);
}

void png_warning_fn(png_structp, png_const_charp) {}

Image load_png(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw FormatError("cannot open " + path.string());
  unsigned char sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0)
    throw FormatError("not a PNG file: " + path.string());

  std::string err;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
  if (!png) throw FormatError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw FormatError("libpng init failed");
  }

  // Everything that can longjmp lives in this block; no C++ objects with
  // nontrivial destructors are created inside it.
  volatile int width_v = 0, height_v = 0, channels_v = 0;
  std::vector<unsigned char> raw;
  std::vector<png_bytep> rows;
  volatile bool bad_depth = false;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError("PNG decode error: " + err);
  }
  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  const int color = png_get_color_type(png, info);
  if (bit_depth != 8 || color == PNG_COLOR_TYPE_PALETTE) {
    bad_depth = true;
  } else {
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);
    width_v = static_cast<int>(png_get_image_width(png, info));
    height_v = static_cast<int>(png_get_image_height(png, info));
    channels_v = png_get_channels(png, info);
    const std::size_t stride = png_get_rowbytes(png, info);
    raw.resize(stride * static_cast<std::size_t>(height_v));
    rows.resize(static_cast<std::size_t>(height_v));
    for (int y = 0; y < height_v; ++y) rows[y] = raw.data() + stride * static_cast<std::size_t>(y);
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (bad_depth) throw FormatError("PNG: unsupported bit depth or palette image: " + path.string());
  const int width = width_v, height = height_v, channels = channels_v;

  std::vector<float> data(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    const unsigned char* r = rows[y];
    for (int x = 0; x < width; ++x) {
      float v;
      if (channels == 1) {
        v = static_cast<float>(r[x]) / 255.0f;
      } else {
        const unsigned char* p = r + static_cast<std::size_t>(x) * channels;
        const double luma = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
        v = static_cast<float>(luma / 255.0);
      }
      data[static_cast<std::size_t>(y) * width + x] = std::clamp(v, 0.0f, 1.0f);
    }
  }
  return Image(width, height, std::move(data));
}

void save_png(const Image& img, const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw std::runtime_error("cannot write " + path.string());

  std::vector<unsigned char> raw(img.size());
  const auto px = img.pixels();
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = to_byte(px[i]);
  std::vector<png_bytep> rows(static_cast<std::size_t>(img.height()));
  for (int y = 0; y < img.height(); ++y) rows[y] = raw.data() + static_cast<std::size_t>(y) * img.width();

  std::string err;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &err, png_error_fn, png_warning_fn);
  if (!png) throw std::runtime_error("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw std::runtime_error("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("PNG encode error: " + err);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width()), static_cast<png_uint_32>(img.height()), 8,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace

Image load_image(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw FormatError("no such file: " + path.string());
  const std::string ext = lower_extension(path);
  if (ext == ".png") return load_png(path);
  if (ext == ".pgm") return load_pgm(path);
  // Unknown extension: sniff the magic bytes.
  std::ifstream in(path, std::ios::binary);
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (magic[0] == 'P' && magic[1] == '5') return load_pgm(path);
  return load_png(path);
}

void save_image(const Image& img, const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".png") {
    save_png(img, path);
  } else if (ext == ".pgm") {
    save_pgm(img, path);
  } else {
    throw std::invalid_argument("unsupported output extension: " + path.string());
  }
}

}  // namespace syncvision
