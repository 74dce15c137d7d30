#include "s2k/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "s2k/errors.hpp"
#include "s2k/fft.hpp"

namespace s2k {

namespace {

// Real random field whose amplitude spectrum falls off as 1/(r+1)^alpha:
// white Gaussian noise shaped in the frequency domain. Shaping a real
// field by a radially symmetric gain keeps the result real.
GrayImage noise_1f(int n, double alpha, Rng& rng) {
  GrayImage white(n, n);
  for (double& v : white.data) v = rng.normal();

  auto freq = fft2(white.data.data(), n, n);
  for (int y = 0; y < n; ++y) {
    int fy = y <= n / 2 ? y : y - n;  // wrapped frequency index
    for (int x = 0; x < n; ++x) {
      int fx = x <= n / 2 ? x : x - n;
      double r = std::hypot(double(fy), double(fx));
      freq[std::size_t(y) * n + x] *= std::pow(r + 1.0, -alpha);
    }
  }
  auto back = ifft2(freq.data(), n, n);

  GrayImage out(n, n);
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = back[i].real();
  return out;
}

void normalize_01(GrayImage& img) {
  auto [mn, mx] = std::minmax_element(img.data.begin(), img.data.end());
  double lo = *mn, hi = *mx;
  if (hi - lo < 1e-12) {
    std::fill(img.data.begin(), img.data.end(), 0.5);
    return;
  }
  for (double& v : img.data) v = (v - lo) / (hi - lo);
}

double smoothstep(double e0, double e1, double x) {
  double t = std::clamp((x - e0) / (e1 - e0), 0.0, 1.0);
  return t * t * (3.0 - 2.0 * t);
}

}  // namespace

GrayImage make_texture(const TextureConfig& cfg, Rng& rng) {
  if (cfg.size < 16) throw InvalidArgument("make_texture: size must be >= 16");
  if (cfg.min_lum < 0.0 || cfg.min_lum >= 1.0)
    throw InvalidArgument("make_texture: min_lum must be in [0, 1)");

  GrayImage img = noise_1f(cfg.size, cfg.spectral_alpha, rng);
  normalize_01(img);

  // A few soft-edged rectangles and ellipses on top of the field.
  int nshapes = 4 + rng.uniform_int(5);
  for (int s = 0; s < nshapes; ++s) {
    bool ellipse = rng.uniform() < 0.5;
    double cy = rng.uniform(0.0, cfg.size);
    double cx = rng.uniform(0.0, cfg.size);
    double hy = rng.uniform(cfg.size / 16.0, cfg.size / 4.0);
    double hx = rng.uniform(cfg.size / 16.0, cfg.size / 4.0);
    double edge = rng.uniform(1.5, 4.0);
    double weight = rng.uniform(-0.35, 0.35);

    for (int y = 0; y < cfg.size; ++y) {
      for (int x = 0; x < cfg.size; ++x) {
        double cov;
        if (ellipse) {
          double d = std::hypot((y - cy) / hy, (x - cx) / hx);
          cov = 1.0 - smoothstep(1.0 - edge / hy, 1.0 + edge / hy, d);
        } else {
          double dy = std::abs(y - cy), dx = std::abs(x - cx);
          cov = (1.0 - smoothstep(hy - edge, hy + edge, dy)) *
                (1.0 - smoothstep(hx - edge, hx + edge, dx));
        }
        img.at(y, x) += weight * cov;
      }
    }
  }

  normalize_01(img);
  for (double& v : img.data) v = cfg.min_lum + (1.0 - cfg.min_lum) * v;
  return img;
}

}  // namespace s2k
