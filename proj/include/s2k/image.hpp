#pragma once

#include <string>
#include <vector>

namespace s2k {

// Grayscale raster, row-major doubles. Pixel values are luminance in
// [0, 1] for anything that came through load_image / save_image; the
// container itself does not enforce the range so it can double as a
// plain 2-D matrix for intermediate math.
struct GrayImage {
  int height = 0;
  int width = 0;
  std::vector<double> data;

  GrayImage() = default;
  GrayImage(int h, int w, double fill = 0.0)
      : height(h), width(w), data(std::size_t(h) * std::size_t(w), fill) {}

  double& at(int y, int x) { return data[std::size_t(y) * width + x]; }
  double at(int y, int x) const { return data[std::size_t(y) * width + x]; }
  std::size_t size() const { return data.size(); }
};

// Reads an 8-bit grayscale or RGB PNG (RGB collapses to BT.601 luma:
// 0.299 R + 0.587 G + 0.114 B), or a tensor container file holding at
// least one rank-2 tensor (the first one is taken). Values land in
// [0, 1]. Throws DecodeError for unsupported encodings and
// InvalidArgument when the decoded image is smaller than 16x16.
GrayImage load_image(const std::string& path);

// Writes an 8-bit grayscale PNG; values are clamped to [0, 1] first.
void save_image(const GrayImage& img, const std::string& path);

// Bilinear resample with half-pixel-center alignment and clamp-to-edge
// sampling. Output values stay inside the input min/max envelope.
GrayImage resize_bilinear(const GrayImage& img, int out_h, int out_w);

// Catmull-Rom (a = -0.5) bicubic resample on the align-corners grid:
// out pixel i samples source coordinate i*(n-1)/(m-1), so corner pixels
// are copied exactly and linear ramps stay linear. Output is clamped to
// [lo, hi] to remove cubic overshoot (pass lo > hi to skip clamping).
GrayImage resize_bicubic(const GrayImage& img, int out_h, int out_w,
                         double lo = 0.0, double hi = 1.0);

// Bicubic decimation by an integer factor s >= 1. When the dimensions
// are not divisible by s, the image is first center-cropped to the
// nearest multiple. s = 1 is the identity.
GrayImage downsample_bicubic(const GrayImage& img, int s);

// Center crop; offsets round down when the margin is odd. Throws
// InvalidArgument when the requested size exceeds the image.
GrayImage center_crop(const GrayImage& img, int h, int w);

// Crop with an explicit top-left corner.
GrayImage crop(const GrayImage& img, int y0, int x0, int h, int w);

double clamp01(double v);

}  // namespace s2k
