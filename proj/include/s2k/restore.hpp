#pragma once

#include "s2k/image.hpp"
#include "s2k/kernels.hpp"

namespace s2k {

// Wiener deconvolution under circular boundary conditions. The filter
// conj(F) / (|F|^2 + nsr) acts on the DFT of the mean-subtracted image
// and the mean is restored afterwards, so the output mean equals the
// input mean for every nsr and nsr -> infinity fades the result to a
// flat image instead of black. Output is clamped to [0, 1].
GrayImage wiener_deconvolve(const GrayImage& img, const Kernel& k, double nsr);

// Non-blind restoration: deconvolve on the LR grid, then bicubic
// upsample by `scale`. scale = 1 skips the resampling.
GrayImage blind_sr(const GrayImage& lr, const Kernel& k, int scale,
                   double nsr);

}  // namespace s2k
