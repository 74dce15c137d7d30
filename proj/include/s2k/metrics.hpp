#pragma once

#include "s2k/image.hpp"
#include "s2k/kernels.hpp"

namespace s2k {

// Kernel estimation error, mean absolute difference over cells. Both
// arguments must share one shape. Symmetric, zero iff equal, satisfies
// the triangle inequality.
double dv(const Kernel& a, const Kernel& b);

// KL-style divergence sum_i x_i * log((x_i + eps) / (y_i + eps)) with
// eps = 1e-12 smoothing both operands; cells where x == 0 contribute 0.
// Call as ds(ground_truth, estimate). Non-negative up to a -1e-9
// numerical floor for kernels that each sum to 1.
double ds(const Kernel& ground_truth, const Kernel& estimate);

// 10 * log10(1 / MSE) for images in [0, 1]; capped at 100 dB so
// identical images stay finite in reports.
double psnr(const GrayImage& a, const GrayImage& b);

// Single-scale SSIM: 11x11 Gaussian window (std 1.5), K1 = 0.01,
// K2 = 0.03, dynamic range L = 1, averaged over valid window positions.
// Images must be at least 11x11.
double ssim(const GrayImage& a, const GrayImage& b);

}  // namespace s2k
