#include "s2k/degrade.hpp"

#include <algorithm>
#include <cmath>

#include "s2k/errors.hpp"

namespace s2k {

GrayImage convolve2d(const GrayImage& img, const Kernel& k, Boundary boundary) {
  if (k.height != k.width || k.height % 2 == 0)
    throw InvalidArgument("convolve2d: kernel must be square with odd size");
  if (k.height > img.height || k.width > img.width)
    throw InvalidArgument("convolve2d: kernel larger than image");

  int c = k.height / 2;
  int h = img.height, w = img.width;
  GrayImage out(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int ky = 0; ky < k.height; ++ky) {
        // True convolution: output(y) gathers input(y - (ky - c)) with
        // weight k(ky).
        int sy = y - (ky - c);
        if (boundary == Boundary::circular)
          sy = (sy % h + h) % h;
        else
          sy = std::clamp(sy, 0, h - 1);
        for (int kx = 0; kx < k.width; ++kx) {
          int sx = x - (kx - c);
          if (boundary == Boundary::circular)
            sx = (sx % w + w) % w;
          else
            sx = std::clamp(sx, 0, w - 1);
          acc += k.at(ky, kx) * img.at(sy, sx);
        }
      }
      out.at(y, x) = acc;
    }
  }
  return out;
}

GrayImage degrade(const GrayImage& hr, const Kernel& k,
                  const DegradationConfig& cfg, Rng* rng) {
  if (cfg.scale < 1) throw InvalidArgument("degrade: scale must be >= 1");
  if (cfg.noise_sigma < 0.0)
    throw InvalidArgument("degrade: noise sigma must be >= 0");

  GrayImage out;
  if (cfg.order == DegradeOrder::downsample_then_convolve) {
    out = downsample_bicubic(hr, cfg.scale);
    out = convolve2d(out, k, cfg.boundary);
  } else {
    out = convolve2d(hr, k, cfg.boundary);
    out = downsample_bicubic(out, cfg.scale);
  }

  if (cfg.noise_sigma > 0.0) {
    if (!rng) throw InvalidArgument("degrade: noise requested without an rng");
    for (double& v : out.data)
      v = clamp01(v + cfg.noise_sigma * rng->normal());
  }
  return out;
}

}  // namespace s2k
