#include "s2k/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "s2k/errors.hpp"
#include "s2k/fft.hpp"

namespace s2k {

namespace {

constexpr double kPi = 3.14159265358979323846;

}  // namespace

Spectrum amplitude_spectrum(const GrayImage& img, bool subtract_mean) {
  if (img.height < 1 || img.width < 1)
    throw InvalidArgument("amplitude_spectrum: empty image");

  GrayImage src = img;
  if (subtract_mean) {
    double mean = 0.0;
    for (double v : src.data) mean += v;
    mean /= double(src.size());
    for (double& v : src.data) v -= mean;
  }

  auto freq = fft2(src.data.data(), src.height, src.width);
  int h = src.height, w = src.width;
  Spectrum out(h, w);
  int cy = h / 2, cx = w / 2;
  for (int y = 0; y < h; ++y) {
    int sy = (y - cy + h) % h;
    for (int x = 0; x < w; ++x) {
      int sx = (x - cx + w) % w;
      out.at(y, x) = std::abs(freq[std::size_t(sy) * w + sx]);
    }
  }
  return out;
}

GrayImage pad_kernel_wrap(const Kernel& k, int h, int w) {
  if (k.height % 2 == 0 || k.width % 2 == 0)
    throw InvalidArgument("pad_kernel_wrap: kernel size must be odd");
  GrayImage out(h, w);
  int c = k.height / 2;
  for (int ky = 0; ky < k.height; ++ky) {
    int y = ((ky - c) % h + h) % h;
    for (int kx = 0; kx < k.width; ++kx) {
      int x = ((kx - c) % w + w) % w;
      out.at(y, x) += k.at(ky, kx);
    }
  }
  return out;
}

GrayImage pad_kernel_center(const Kernel& k, int h, int w) {
  if (k.height > h || k.width > w)
    throw InvalidArgument("pad_kernel_center: kernel larger than frame");
  GrayImage out(h, w);
  int y0 = (h - k.height) / 2, x0 = (w - k.width) / 2;
  for (int ky = 0; ky < k.height; ++ky)
    for (int kx = 0; kx < k.width; ++kx)
      out.at(y0 + ky, x0 + kx) = k.at(ky, kx);
  return out;
}

GrayImage spectral_convolve(const GrayImage& img, const Kernel& k) {
  int h = img.height, w = img.width;
  GrayImage kp = pad_kernel_wrap(k, h, w);
  auto fi = fft2(img.data.data(), h, w);
  auto fk = fft2(kp.data.data(), h, w);
  for (std::size_t i = 0; i < fi.size(); ++i) fi[i] *= fk[i];
  auto back = ifft2(fi.data(), h, w);

  GrayImage out(h, w);
  for (std::size_t i = 0; i < out.size(); ++i) out.data[i] = back[i].real();
  return out;
}

Spectrum prepare_net_input(const GrayImage& lr, int out_size, bool log_scale) {
  if (out_size < 2) throw InvalidArgument("prepare_net_input: bad out_size");
  if (lr.height < 16 || lr.width < 16)
    throw InvalidArgument("prepare_net_input: image smaller than 16x16");

  int side = std::min(lr.height, lr.width);
  Spectrum spec = amplitude_spectrum(center_crop(lr, side, side));

  if (log_scale)
    for (double& v : spec.data) v = std::log1p(v);

  auto renorm = [](Spectrum& s) {
    double mx = *std::max_element(s.data.begin(), s.data.end());
    if (mx > 0.0)
      for (double& v : s.data) v /= mx;
  };
  renorm(spec);
  if (side != out_size) {
    spec = resize_bilinear(spec, out_size, out_size);
    renorm(spec);  // keep the peak pinned at exactly 1 after resampling
  }
  return spec;
}

SpectrumFit fit_spectrum_gaussian(const Spectrum& spec) {
  int h = spec.height, w = spec.width;
  int cy = h / 2, cx = w / 2;

  double wsum = 0.0, m_uu = 0.0, m_vv = 0.0, m_uv = 0.0;
  for (int y = 0; y < h; ++y) {
    double du = y - cy;
    for (int x = 0; x < w; ++x) {
      double dv = x - cx;
      double a = spec.at(y, x);
      double wgt = a * a;
      wsum += wgt;
      m_uu += wgt * du * du;
      m_vv += wgt * dv * dv;
      m_uv += wgt * du * dv;
    }
  }
  if (wsum <= 0.0)
    throw InvalidArgument("fit_spectrum_gaussian: spectrum has no energy");
  m_uu /= wsum;
  m_vv /= wsum;
  m_uv /= wsum;
  if (m_uu <= 0.0 || m_vv <= 0.0)
    throw InvalidArgument("fit_spectrum_gaussian: degenerate spectrum");

  // Eigen-decompose the 2x2 moment matrix [[m_uu, m_uv], [m_uv, m_vv]].
  // Weights are squared amplitudes, so a Gaussian amplitude of std s
  // yields eigenvalue s^2 / 2; hence sigma = sqrt(2 lambda).
  double half_diff = 0.5 * (m_uu - m_vv);
  double disc = std::sqrt(half_diff * half_diff + m_uv * m_uv);
  double lam1 = 0.5 * (m_uu + m_vv) + disc;
  double lam2 = 0.5 * (m_uu + m_vv) - disc;
  lam2 = std::max(lam2, 0.0);

  SpectrumFit fit;
  if (disc < 1e-9 * (m_uu + m_vv)) {
    // Isotropic within tolerance: axes are arbitrary, report them
    // axis-aligned.
    fit.sigma_u = std::sqrt(2.0 * m_uu);
    fit.sigma_v = std::sqrt(2.0 * m_vv);
    fit.theta = 0.0;
    return fit;
  }

  // Eigenvector of lam1 in (u, v) = (row, col) components.
  double e1u = m_uv, e1v = lam1 - m_uu;
  if (std::abs(e1u) < 1e-300 && std::abs(e1v) < 1e-300) {
    e1u = 1.0;
    e1v = 0.0;
  }
  // The perpendicular partner carries lam2.
  double e2u = -e1v, e2v = e1u;

  // Label the eigenvector closer to the row axis as the u axis.
  double su, sv, cu, cv;  // (cu, cv): components of the column-ish axis
  if (std::abs(e1u) >= std::abs(e1v)) {
    su = std::sqrt(2.0 * lam1);
    sv = std::sqrt(2.0 * lam2);
    cu = e2u;
    cv = e2v;
  } else {
    su = std::sqrt(2.0 * lam2);
    sv = std::sqrt(2.0 * lam1);
    cu = e1u;
    cv = e1v;
  }

  // theta: rotation of the fitted frame, i.e. the angle of the
  // column-ish axis measured from +x in image coordinates (x = columns,
  // y = rows).
  double theta = std::atan2(cu, cv);
  if (theta <= -kPi / 2.0) theta += kPi;
  if (theta > kPi / 2.0) theta -= kPi;

  fit.sigma_u = su;
  fit.sigma_v = sv;
  fit.theta = theta;
  return fit;
}

DualityConstants duality_constants(int n) {
  if (n < 2) throw InvalidArgument("duality_constants: n must be >= 2");
  double c = double(n) / (2.0 * kPi);
  return {c, c};
}

DualityConstants calibrate_duality(int n) {
  if (n < 32) throw InvalidArgument("calibrate_duality: n must be >= 32");
  const double sigmas[] = {1.0, 1.5, 2.0, 2.5, 3.0};

  double acc1 = 0.0, acc2 = 0.0;
  for (double sigma : sigmas) {
    // Full-grid Gaussian so truncation does not bias the sweep. The
    // amplitude spectrum ignores the placement phase, so building it
    // centered is equivalent to origin placement.
    GrayImage g(n, n);
    int c = n / 2;
    for (int y = 0; y < n; ++y)
      for (int x = 0; x < n; ++x) {
        double dy = y - c, dx = x - c;
        g.at(y, x) = std::exp(-0.5 * (dy * dy + dx * dx) / (sigma * sigma));
      }
    SpectrumFit fit = fit_spectrum_gaussian(amplitude_spectrum(g));
    acc1 += fit.sigma_u * sigma;
    acc2 += fit.sigma_v * sigma;
  }
  int count = int(sizeof(sigmas) / sizeof(sigmas[0]));
  return {acc1 / count, acc2 / count};
}

}  // namespace s2k
