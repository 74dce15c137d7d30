#pragma once

#include "s2k/image.hpp"
#include "s2k/kernels.hpp"

namespace s2k {

// A DC-centered amplitude spectrum; reuses the raster container. The
// DC bin sits at (height/2, width/2).
using Spectrum = GrayImage;

// |DFT| of the image, fftshifted so DC is central. Forward transform is
// unnormalized, so the DC amplitude equals the pixel sum. With
// subtract_mean the image mean is removed first (zeroing the DC bin up
// to rounding).
Spectrum amplitude_spectrum(const GrayImage& img, bool subtract_mean = false);

// Embeds an odd-sized kernel into an h x w frame with its center at the
// origin (0, 0), quadrants wrapped around the edges. This is the
// padding under which pointwise DFT multiplication reproduces circular
// spatial convolution.
GrayImage pad_kernel_wrap(const Kernel& k, int h, int w);

// Embeds the kernel with its center at (h/2, w/2) instead; used for
// spatial-domain shape comparisons where the mass should sit mid-frame.
GrayImage pad_kernel_center(const Kernel& k, int h, int w);

// Circular convolution through the frequency domain:
// ifft(fft(img) * fft(pad_kernel_wrap(k))). Equals
// convolve2d(img, k, Boundary::circular) to floating-point accuracy.
GrayImage spectral_convolve(const GrayImage& img, const Kernel& k);

// Network input: center-crop to square, amplitude spectrum, optional
// log(1 + A) compression, resample to out_size, peak-normalize so the
// maximum is exactly 1 (all-zero input stays all-zero).
Spectrum prepare_net_input(const GrayImage& lr, int out_size,
                           bool log_scale = true);

// Gaussian fit of a spectrum by second moments of the squared amplitude
// about the DC bin. The spectrum is modeled as an axis-aligned Gaussian
// with std sigma_u along rows and sigma_v along columns, with the whole
// frame rotated by theta (radians, normalized to (-pi/2, pi/2]).
struct SpectrumFit {
  double sigma_u = 0.0;
  double sigma_v = 0.0;
  double theta = 0.0;
};
SpectrumFit fit_spectrum_gaussian(const Spectrum& spec);

// Gaussian Fourier duality on an n-point grid: a spatial Gaussian of
// std sigma has an amplitude spectrum of std c / sigma with
// c = n / (2 pi). c1 applies to the row pair, c2 to the column pair;
// they are equal analytically and kept separate so a numeric
// calibration can refine them independently.
struct DualityConstants {
  double c1 = 0.0;
  double c2 = 0.0;
};
DualityConstants duality_constants(int n);

// Empirical check of the same constants: sweeps isotropic Gaussians on
// the full n x n grid and averages sigma_fit * sigma over the sweep.
DualityConstants calibrate_duality(int n);

}  // namespace s2k
