#pragma once

#include "s2k/image.hpp"
#include "s2k/kernels.hpp"
#include "s2k/spectral.hpp"

namespace s2k {

// Learning-free spectral estimator for Gaussian-family kernels.
struct BaselineConfig {
  enum class Prior { flat, one_over_r };
  Prior prior = Prior::one_over_r;  // natural-image amplitude falloff model
  int kernel_size = 15;
  double sigma_min = 0.5;  // estimates outside [sigma_min, sigma_max]
  double sigma_max = 5.0;  // are treated as out-of-model
};

// Whitens the LR amplitude spectrum by the configured prior, fits a
// Gaussian by moments, inverts through Fourier duality and synthesizes
// the matching spatial kernel. Throws EstimationError when either
// fitted sigma leaves [sigma_min, sigma_max].
struct BaselineEstimate {
  GaussianParams params;
  Kernel kernel;
  SpectrumFit fit;  // the spectral-domain fit the params came from
};
BaselineEstimate estimate_gaussian_spectral(const GrayImage& lr,
                                            const BaselineConfig& cfg);

// The whitened spectrum itself, exposed for inspection and tests.
Spectrum whiten_spectrum(const Spectrum& spec, BaselineConfig::Prior prior);

}  // namespace s2k
