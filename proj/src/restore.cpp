#include "s2k/restore.hpp"

#include <complex>

#include "s2k/errors.hpp"
#include "s2k/fft.hpp"
#include "s2k/spectral.hpp"

namespace s2k {

GrayImage wiener_deconvolve(const GrayImage& img, const Kernel& k,
                            double nsr) {
  if (nsr < 0.0) throw InvalidArgument("wiener_deconvolve: nsr must be >= 0");
  if (k.height > img.height || k.width > img.width)
    throw InvalidArgument("wiener_deconvolve: kernel larger than image");

  int h = img.height, w = img.width;
  double mean = 0.0;
  for (double v : img.data) mean += v;
  mean /= double(img.size());

  GrayImage centered = img;
  for (double& v : centered.data) v -= mean;

  auto fi = fft2(centered.data.data(), h, w);
  GrayImage kp = pad_kernel_wrap(k, h, w);
  auto fk = fft2(kp.data.data(), h, w);

  for (std::size_t i = 0; i < fi.size(); ++i) {
    double mag2 = std::norm(fk[i]);
    fi[i] *= std::conj(fk[i]) / (mag2 + nsr);
  }
  auto back = ifft2(fi.data(), h, w);

  GrayImage out(h, w);
  for (std::size_t i = 0; i < out.size(); ++i)
    out.data[i] = clamp01(back[i].real() + mean);
  return out;
}

GrayImage blind_sr(const GrayImage& lr, const Kernel& k, int scale,
                   double nsr) {
  if (scale < 1) throw InvalidArgument("blind_sr: scale must be >= 1");
  GrayImage restored = wiener_deconvolve(lr, k, nsr);
  if (scale == 1) return restored;
  return resize_bicubic(restored, lr.height * scale, lr.width * scale);
}

}  // namespace s2k
