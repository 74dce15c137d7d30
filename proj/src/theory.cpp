#include "s2k/theory.hpp"

#include <algorithm>
#include <cmath>

#include "s2k/errors.hpp"
#include "s2k/spectral.hpp"

namespace s2k {

namespace {

std::vector<double> normalized(std::span<const double> x,
                               ShapeConfig::Norm norm) {
  std::vector<double> out(x.begin(), x.end());
  double scale = 0.0;
  if (norm == ShapeConfig::Norm::peak1) {
    for (double v : out) scale = std::max(scale, std::abs(v));
  } else {
    for (double v : out) scale += v * v;
    scale = std::sqrt(scale);
  }
  if (scale > 0.0)
    for (double& v : out) v /= scale;
  return out;
}

std::size_t l0(std::span<const double> x, double tau) {
  std::size_t n = 0;
  for (double v : x)
    if (std::abs(v) >= tau) ++n;
  return n;
}

std::vector<double> column_profile(const GrayImage& m) {
  std::vector<double> p(m.width, 0.0);
  for (int y = 0; y < m.height; ++y)
    for (int x = 0; x < m.width; ++x) p[x] += m.at(y, x);
  double peak = 0.0;
  for (double v : p) peak = std::max(peak, std::abs(v));
  if (peak > 0.0)
    for (double& v : p) v /= peak;
  return p;
}

double mean_abs_diff(const std::vector<double>& a,
                     const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return acc / double(a.size());
}

}  // namespace

std::vector<double> truncate(std::span<const double> x, double tau) {
  std::vector<double> out(x.begin(), x.end());
  for (double& v : out) {
    double a = std::abs(v);
    v = a < tau ? 0.0 : a;
  }
  return out;
}

std::size_t phi(std::span<const double> x, std::span<const double> y,
                const ShapeConfig& cfg) {
  if (x.size() != y.size()) throw InvalidArgument("phi: length mismatch");
  if (cfg.tau < 0.0) throw InvalidArgument("phi: tau must be >= 0");

  std::vector<double> xn = normalized(x, cfg.norm);
  std::vector<double> yn = normalized(y, cfg.norm);
  std::size_t n = 0;
  for (std::size_t i = 0; i < xn.size(); ++i)
    if (std::abs(xn[i] - yn[i]) >= cfg.tau) ++n;
  return n;
}

AdvantageReport frequency_advantage(const GrayImage& hr, const Kernel& k,
                                    const DegradationConfig& cfg_degrade,
                                    const ShapeConfig& cfg_shape) {
  DegradationConfig cfg = cfg_degrade;
  cfg.noise_sigma = 0.0;  // the comparison is about shape, not noise
  GrayImage lr = degrade(hr, k, cfg);
  if (k.height > lr.height || k.width > lr.width)
    throw InvalidArgument("frequency_advantage: kernel exceeds the LR grid");

  // Frequency domain: spectrum of the degraded image vs spectrum of the
  // kernel on the same grid.
  Spectrum g_spec = amplitude_spectrum(lr);
  Spectrum f_spec = amplitude_spectrum(pad_kernel_wrap(k, lr.height, lr.width));

  // Spatial domain: the zero-padded kernel vs the degraded image.
  GrayImage k_pad = pad_kernel_center(k, lr.height, lr.width);

  AdvantageReport rep;
  rep.phi_freq = phi(g_spec.data, f_spec.data, cfg_shape);
  rep.phi_spatial = phi(k_pad.data, lr.data, cfg_shape);

  auto fn = normalized(f_spec.data, cfg_shape.norm);
  auto in = normalized(lr.data, cfg_shape.norm);
  auto kn = normalized(k_pad.data, cfg_shape.norm);
  rep.bound_freq = l0(fn, cfg_shape.tau);
  std::size_t img_l0 = l0(in, 2.0 * cfg_shape.tau);
  std::size_t ker_l0 = l0(kn, cfg_shape.tau);
  rep.bound_spatial = img_l0 > ker_l0 ? img_l0 - ker_l0 : 0;

  rep.ratio = rep.phi_spatial == 0
                  ? 0.0
                  : double(rep.phi_freq) / double(rep.phi_spatial);
  return rep;
}

AdvantageReport frequency_advantage(const GrayImage& hr, const KernelParams& p,
                                    const DegradationConfig& cfg_degrade,
                                    const ShapeConfig& cfg_shape) {
  return frequency_advantage(hr, synthesize(p), cfg_degrade, cfg_shape);
}

ProfileDistance profile_distance(const GrayImage& lr, const Kernel& k) {
  if (k.height > lr.height || k.width > lr.width)
    throw InvalidArgument("profile_distance: kernel larger than image");

  GrayImage k_pad = pad_kernel_center(k, lr.height, lr.width);
  Spectrum g_spec = amplitude_spectrum(lr);
  Spectrum f_spec = amplitude_spectrum(pad_kernel_wrap(k, lr.height, lr.width));

  ProfileDistance out;
  out.spatial = mean_abs_diff(column_profile(k_pad), column_profile(lr));
  out.frequency = mean_abs_diff(column_profile(g_spec), column_profile(f_spec));
  return out;
}

}  // namespace s2k
