#include "s2k/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>

#include "s2k/errors.hpp"
#include "s2k/tensor_file.hpp"

namespace s2k {

namespace {

constexpr int kMinImageSize = 16;

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

void check_min_size(const GrayImage& img, const std::string& path) {
  if (img.height < kMinImageSize || img.width < kMinImageSize)
    throw InvalidArgument(path + ": image must be at least 16x16, got " +
                          std::to_string(img.height) + "x" +
                          std::to_string(img.width));
}

bool file_has_png_signature(const std::string& path) {
  File f(std::fopen(path.c_str(), "rb"));
  if (!f) throw DecodeError("cannot open " + path);
  unsigned char sig[8] = {0};
  std::size_t n = std::fread(sig, 1, 8, f.get());
  return n == 8 && png_sig_cmp(sig, 0, 8) == 0;
}

GrayImage load_png(const std::string& path) {
  File f(std::fopen(path.c_str(), "rb"));
  if (!f) throw DecodeError("cannot open " + path);

  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw DecodeError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw DecodeError("libpng init failed");
  }

  std::vector<png_bytep> row_ptrs;
  std::vector<unsigned char> raster;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DecodeError("failed to decode " + path);
  }

  png_init_io(png, f.get());
  png_read_info(png, info);

  png_uint_32 w = png_get_image_width(png, info);
  png_uint_32 h = png_get_image_height(png, info);
  int bit_depth = png_get_bit_depth(png, info);
  int color_type = png_get_color_type(png, info);

  if (bit_depth != 8 ||
      (color_type != PNG_COLOR_TYPE_GRAY && color_type != PNG_COLOR_TYPE_RGB)) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw DecodeError(path + ": only 8-bit grayscale or RGB PNGs are supported");
  }

  int channels = color_type == PNG_COLOR_TYPE_RGB ? 3 : 1;
  raster.resize(std::size_t(h) * w * channels);
  row_ptrs.resize(h);
  for (png_uint_32 y = 0; y < h; ++y)
    row_ptrs[y] = raster.data() + std::size_t(y) * w * channels;
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  GrayImage img{int(h), int(w)};
  if (channels == 1) {
    for (std::size_t i = 0; i < img.size(); ++i) img.data[i] = raster[i] / 255.0;
  } else {
    for (std::size_t i = 0; i < img.size(); ++i) {
      const unsigned char* px = raster.data() + 3 * i;
      img.data[i] = (0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2]) / 255.0;
    }
  }
  return img;
}

GrayImage load_tensor_image(const std::string& path) {
  auto tensors = read_tensor_file(path);
  for (const auto& t : tensors) {
    if (t.dims.size() != 2) continue;
    GrayImage img(int(t.dims[0]), int(t.dims[1]));
    for (std::size_t i = 0; i < img.size(); ++i)
      img.data[i] = clamp01(double(t.values[i]));
    return img;
  }
  throw DecodeError(path + ": container holds no rank-2 tensor");
}

// Catmull-Rom weights for the four taps around a sample at offset t in
// [0, 1) from tap 1. a = -0.5.
void catmull_rom(double t, double w[4]) {
  constexpr double a = -0.5;
  double t2 = t * t, t3 = t2 * t;
  w[0] = a * (t3 - 2.0 * t2 + t);
  w[1] = (a + 2.0) * t3 - (a + 3.0) * t2 + 1.0;
  w[2] = -(a + 2.0) * t3 + (2.0 * a + 3.0) * t2 - a * t;
  w[3] = a * (t2 - t3);
}

}  // namespace

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

GrayImage load_image(const std::string& path) {
  GrayImage img =
      file_has_png_signature(path) ? load_png(path) : load_tensor_image(path);
  check_min_size(img, path);
  return img;
}

void save_image(const GrayImage& img, const std::string& path) {
  if (img.height <= 0 || img.width <= 0)
    throw InvalidArgument("save_image: empty image");

  File f(std::fopen(path.c_str(), "wb"));
  if (!f) throw DecodeError("cannot open " + path + " for writing");

  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw DecodeError("libpng init failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw DecodeError("libpng init failed");
  }

  std::vector<unsigned char> raster(img.size());
  std::vector<png_bytep> row_ptrs(img.height);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw DecodeError("failed to encode " + path);
  }

  for (std::size_t i = 0; i < img.size(); ++i)
    raster[i] = (unsigned char)std::lround(clamp01(img.data[i]) * 255.0);
  for (int y = 0; y < img.height; ++y)
    row_ptrs[y] = raster.data() + std::size_t(y) * img.width;

  png_init_io(png, f.get());
  png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, row_ptrs.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

GrayImage resize_bilinear(const GrayImage& img, int out_h, int out_w) {
  if (img.height < 1 || img.width < 1 || out_h < 1 || out_w < 1)
    throw InvalidArgument("resize_bilinear: degenerate size");

  GrayImage out(out_h, out_w);
  double sy = double(img.height) / out_h;
  double sx = double(img.width) / out_w;
  for (int oy = 0; oy < out_h; ++oy) {
    double fy = (oy + 0.5) * sy - 0.5;
    int y0 = int(std::floor(fy));
    double ty = fy - y0;
    int ya = std::clamp(y0, 0, img.height - 1);
    int yb = std::clamp(y0 + 1, 0, img.height - 1);
    for (int ox = 0; ox < out_w; ++ox) {
      double fx = (ox + 0.5) * sx - 0.5;
      int x0 = int(std::floor(fx));
      double tx = fx - x0;
      int xa = std::clamp(x0, 0, img.width - 1);
      int xb = std::clamp(x0 + 1, 0, img.width - 1);
      double top = (1.0 - tx) * img.at(ya, xa) + tx * img.at(ya, xb);
      double bot = (1.0 - tx) * img.at(yb, xa) + tx * img.at(yb, xb);
      out.at(oy, ox) = (1.0 - ty) * top + ty * bot;
    }
  }
  return out;
}

GrayImage resize_bicubic(const GrayImage& img, int out_h, int out_w,
                         double lo, double hi) {
  if (img.height < 1 || img.width < 1 || out_h < 1 || out_w < 1)
    throw InvalidArgument("resize_bicubic: degenerate size");

  auto src_coord = [](int i, int out_n, int in_n) {
    if (out_n == 1) return (in_n - 1) / 2.0;
    return double(i) * double(in_n - 1) / double(out_n - 1);
  };

  GrayImage out(out_h, out_w);
  std::vector<double> row(img.width);
  for (int oy = 0; oy < out_h; ++oy) {
    double fy = src_coord(oy, out_h, img.height);
    int y1 = int(std::floor(fy));
    double wy[4];
    catmull_rom(fy - y1, wy);

    // Vertical pass for this output row, clamped taps.
    for (int x = 0; x < img.width; ++x) {
      double acc = 0.0;
      for (int k = 0; k < 4; ++k) {
        int y = std::clamp(y1 - 1 + k, 0, img.height - 1);
        acc += wy[k] * img.at(y, x);
      }
      row[x] = acc;
    }

    for (int ox = 0; ox < out_w; ++ox) {
      double fx = src_coord(ox, out_w, img.width);
      int x1 = int(std::floor(fx));
      double wx[4];
      catmull_rom(fx - x1, wx);
      double acc = 0.0;
      for (int k = 0; k < 4; ++k) {
        int x = std::clamp(x1 - 1 + k, 0, img.width - 1);
        acc += wx[k] * row[x];
      }
      out.at(oy, ox) = lo <= hi ? std::clamp(acc, lo, hi) : acc;
    }
  }
  return out;
}

GrayImage downsample_bicubic(const GrayImage& img, int s) {
  if (s < 1) throw InvalidArgument("downsample_bicubic: scale must be >= 1");
  GrayImage src = img;
  int h = img.height - img.height % s;
  int w = img.width - img.width % s;
  if (h != img.height || w != img.width) src = center_crop(img, h, w);
  if (s == 1) return src;
  return resize_bicubic(src, src.height / s, src.width / s);
}

GrayImage center_crop(const GrayImage& img, int h, int w) {
  if (h > img.height || w > img.width || h < 1 || w < 1)
    throw InvalidArgument("center_crop: requested size exceeds image");
  return crop(img, (img.height - h) / 2, (img.width - w) / 2, h, w);
}

GrayImage crop(const GrayImage& img, int y0, int x0, int h, int w) {
  if (y0 < 0 || x0 < 0 || y0 + h > img.height || x0 + w > img.width || h < 1 ||
      w < 1)
    throw InvalidArgument("crop: window outside image");
  GrayImage out(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) out.at(y, x) = img.at(y0 + y, x0 + x);
  return out;
}

}  // namespace s2k
