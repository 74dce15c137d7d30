#include "s2k/baseline.hpp"

#include <algorithm>
#include <cmath>

#include "s2k/errors.hpp"

namespace s2k {

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

Spectrum whiten_spectrum(const Spectrum& spec, BaselineConfig::Prior prior) {
  Spectrum out = spec;
  if (prior == BaselineConfig::Prior::flat) return out;

  int cy = spec.height / 2, cx = spec.width / 2;
  for (int y = 0; y < spec.height; ++y)
    for (int x = 0; x < spec.width; ++x) {
      double r = std::hypot(double(y - cy), double(x - cx));
      out.at(y, x) = spec.at(y, x) * (r + 1.0);
    }
  return out;
}

BaselineEstimate estimate_gaussian_spectral(const GrayImage& lr,
                                            const BaselineConfig& cfg) {
  if (lr.height < 16 || lr.width < 16)
    throw InvalidArgument("estimate_gaussian_spectral: image too small");

  int side = std::min(lr.height, lr.width);
  Spectrum spec = amplitude_spectrum(center_crop(lr, side, side));
  // The blur kernel shapes the spectrum multiplicatively; dividing out a
  // scene prior leaves (approximately) the kernel's own spectrum.
  Spectrum whitened = whiten_spectrum(spec, cfg.prior);
  // The DC bin carries the scene mean, not kernel shape; removing it
  // keeps the moment fit from being dominated by a single huge sample.
  whitened.at(side / 2, side / 2) = 0.0;

  SpectrumFit fit = fit_spectrum_gaussian(whitened);
  DualityConstants c = duality_constants(side);

  // Duality inverts magnitudes within each principal pair; the spatial
  // orientation is the spectral frame turned by 90 degrees.
  GaussianParams p;
  p.sigma_x = c.c1 / fit.sigma_u;
  p.sigma_y = c.c2 / fit.sigma_v;
  p.theta = fit.theta + kPi / 2.0;
  if (p.theta < 0.0) p.theta += 2.0 * kPi;
  p.size = cfg.kernel_size;

  if (p.sigma_x < cfg.sigma_min || p.sigma_x > cfg.sigma_max ||
      p.sigma_y < cfg.sigma_min || p.sigma_y > cfg.sigma_max)
    throw EstimationError(
        "estimate_gaussian_spectral: fitted sigma (" +
        std::to_string(p.sigma_x) + ", " + std::to_string(p.sigma_y) +
        ") is outside the supported range; the blur is out of model");

  BaselineEstimate est;
  est.params = p;
  est.kernel = gaussian_kernel(p);
  est.fit = fit;
  return est;
}

}  // namespace s2k
