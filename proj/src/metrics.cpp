#include "s2k/metrics.hpp"

#include <cmath>
#include <vector>

#include "s2k/errors.hpp"

namespace s2k {

namespace {

void check_same_shape(const GrayImage& a, const GrayImage& b,
                      const char* what) {
  if (a.height != b.height || a.width != b.width)
    throw InvalidArgument(std::string(what) + ": shape mismatch");
}

}  // namespace

double dv(const Kernel& a, const Kernel& b) {
  check_same_shape(a, b, "dv");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    acc += std::abs(a.data[i] - b.data[i]);
  return acc / double(a.size());
}

double ds(const Kernel& ground_truth, const Kernel& estimate) {
  check_same_shape(ground_truth, estimate, "ds");
  constexpr double eps = 1e-12;
  double acc = 0.0;
  for (std::size_t i = 0; i < ground_truth.size(); ++i) {
    double x = ground_truth.data[i];
    if (x == 0.0) continue;
    acc += x * std::log((x + eps) / (estimate.data[i] + eps));
  }
  return acc;
}

double psnr(const GrayImage& a, const GrayImage& b) {
  check_same_shape(a, b, "psnr");
  double mse = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double d = a.data[i] - b.data[i];
    mse += d * d;
  }
  mse /= double(a.size());
  if (mse <= 0.0) return 100.0;
  return std::min(100.0, 10.0 * std::log10(1.0 / mse));
}

double ssim(const GrayImage& a, const GrayImage& b) {
  check_same_shape(a, b, "ssim");
  constexpr int kWin = 11;
  constexpr double kSigma = 1.5;
  constexpr double kC1 = 0.01 * 0.01;  // (K1 * L)^2, L = 1
  constexpr double kC2 = 0.03 * 0.03;
  if (a.height < kWin || a.width < kWin)
    throw InvalidArgument("ssim: images must be at least 11x11");

  double win[kWin][kWin];
  double wsum = 0.0;
  for (int y = 0; y < kWin; ++y)
    for (int x = 0; x < kWin; ++x) {
      double dy = y - kWin / 2, dx = x - kWin / 2;
      win[y][x] = std::exp(-(dy * dy + dx * dx) / (2.0 * kSigma * kSigma));
      wsum += win[y][x];
    }
  for (int y = 0; y < kWin; ++y)
    for (int x = 0; x < kWin; ++x) win[y][x] /= wsum;

  double acc = 0.0;
  int count = 0;
  for (int y0 = 0; y0 + kWin <= a.height; ++y0) {
    for (int x0 = 0; x0 + kWin <= a.width; ++x0) {
      double mu_a = 0.0, mu_b = 0.0;
      for (int y = 0; y < kWin; ++y)
        for (int x = 0; x < kWin; ++x) {
          mu_a += win[y][x] * a.at(y0 + y, x0 + x);
          mu_b += win[y][x] * b.at(y0 + y, x0 + x);
        }
      double var_a = 0.0, var_b = 0.0, cov = 0.0;
      for (int y = 0; y < kWin; ++y)
        for (int x = 0; x < kWin; ++x) {
          double da = a.at(y0 + y, x0 + x) - mu_a;
          double db = b.at(y0 + y, x0 + x) - mu_b;
          var_a += win[y][x] * da * da;
          var_b += win[y][x] * db * db;
          cov += win[y][x] * da * db;
        }
      double num = (2.0 * mu_a * mu_b + kC1) * (2.0 * cov + kC2);
      double den =
          (mu_a * mu_a + mu_b * mu_b + kC1) * (var_a + var_b + kC2);
      acc += num / den;
      ++count;
    }
  }
  return acc / double(count);
}

}  // namespace s2k
