#pragma once

#include "s2k/image.hpp"
#include "s2k/kernels.hpp"
#include "s2k/rng.hpp"

namespace s2k {

enum class Boundary { circular, replicate };

// Order of the two degradation stages. The default pipeline decimates
// first and blurs at low resolution, so the kernel the estimator sees
// lives on the LR grid.
enum class DegradeOrder { downsample_then_convolve, convolve_then_downsample };

struct DegradationConfig {
  int scale = 2;
  Boundary boundary = Boundary::circular;
  DegradeOrder order = DegradeOrder::downsample_then_convolve;
  double noise_sigma = 0.0;  // additive Gaussian, in [0,1] intensity units
};

// Direct 2-D convolution with an odd-sized kernel (true convolution:
// the kernel is flipped). Output has the input size. Throws
// InvalidArgument when the kernel is larger than the image or has even
// size.
GrayImage convolve2d(const GrayImage& img, const Kernel& k, Boundary boundary);

// Full degradation: bicubic decimation and kernel blur in the
// configured order, plus optional additive Gaussian noise clamped back
// to [0, 1]. `rng` may be null when noise_sigma == 0.
GrayImage degrade(const GrayImage& hr, const Kernel& k,
                  const DegradationConfig& cfg, Rng* rng = nullptr);

}  // namespace s2k
