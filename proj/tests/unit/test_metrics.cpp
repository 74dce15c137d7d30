#include <doctest.h>

#include <cmath>
#include <vector>

#include "s2k/kernels.hpp"
#include "s2k/metrics.hpp"
#include "s2k/rng.hpp"

using namespace s2k;

namespace {

Kernel random_kernel(int size, Rng& rng, bool normalize = true) {
  Kernel k(size, size);
  double s = 0.0;
  for (double& v : k.data) {
    v = rng.uniform();
    s += v;
  }
  if (normalize)
    for (double& v : k.data) v /= s;
  return k;
}

double dv_oracle(const Kernel& a, const Kernel& b) {
  double acc = 0.0;
  for (int y = 0; y < a.height; ++y)
    for (int x = 0; x < a.width; ++x) acc += std::abs(a.at(y, x) - b.at(y, x));
  return acc / (double(a.height) * a.width);
}

double ds_oracle(const Kernel& gt, const Kernel& est) {
  double acc = 0.0;
  for (std::size_t i = 0; i < gt.data.size(); ++i) {
    double x = gt.data[i];
    if (x == 0.0) continue;
    acc += x * std::log((x + 1e-12) / (est.data[i] + 1e-12));
  }
  return acc;
}

double psnr_oracle(const GrayImage& a, const GrayImage& b) {
  double mse = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    double d = a.data[i] - b.data[i];
    mse += d * d;
  }
  mse /= double(a.data.size());
  if (mse <= 0.0) return 100.0;
  return std::min(100.0, 10.0 * std::log10(1.0 / mse));
}

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("dv of identical kernels is zero") {
    Rng rng(1);
    Kernel k = random_kernel(15, rng);
    CHECK(dv(k, k) == 0.0);
  }

  TEST_CASE("dv of a uniform kernel against zeros is 1/225") {
    Kernel u(15, 15, 1.0 / 225.0);
    Kernel z(15, 15, 0.0);
    CHECK(dv(u, z) == doctest::Approx(1.0 / 225.0).epsilon(1e-12));
  }

  TEST_CASE("dv matches the brute-force oracle bitwise") {
    Rng rng(2);
    for (int trial = 0; trial < 100; ++trial) {
      Kernel a = random_kernel(15, rng), b = random_kernel(15, rng);
      CHECK(dv(a, b) == dv_oracle(a, b));
    }
  }

  TEST_CASE("dv satisfies the triangle inequality") {
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
      Kernel a = random_kernel(7, rng), b = random_kernel(7, rng),
             c = random_kernel(7, rng);
      CHECK(dv(a, c) <= dv(a, b) + dv(b, c) + 1e-12);
    }
  }

  TEST_CASE("ds of identical kernels is zero") {
    Rng rng(4);
    Kernel k = random_kernel(15, rng);
    CHECK(std::abs(ds(k, k)) < 1e-9);
  }

  TEST_CASE("ds is nonnegative on normalized kernels") {
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
      Kernel a = random_kernel(9, rng), b = random_kernel(9, rng);
      CHECK(ds(a, b) > -1e-9);
    }
  }

  TEST_CASE("ds of two gaussians matches direct summation") {
    GaussianParams p1, p2;
    p1.sigma_x = p1.sigma_y = 1.0;
    p2.sigma_x = p2.sigma_y = 2.0;
    Kernel a = gaussian_kernel(p1), b = gaussian_kernel(p2);
    CHECK(ds(a, b) == doctest::Approx(ds_oracle(a, b)).epsilon(1e-9));
    CHECK(ds(a, b) > 0.0);
  }

  TEST_CASE("ds skips zero ground-truth entries") {
    Kernel gt(3, 3, 0.0);
    gt.at(1, 1) = 1.0;
    Kernel est(3, 3, 1.0 / 9.0);
    // Only the center term contributes: 1 * log((1+eps)/(1/9+eps)).
    double expected = std::log((1.0 + 1e-12) / (1.0 / 9.0 + 1e-12));
    CHECK(ds(gt, est) == doctest::Approx(expected).epsilon(1e-12));
  }

  TEST_CASE("psnr of a constant offset of 0.1 is 20 dB") {
    GrayImage a(16, 16, 0.4), b(16, 16, 0.5);
    CHECK(psnr(a, b) == doctest::Approx(20.0).epsilon(1e-9));
  }

  TEST_CASE("psnr of identical images caps at 100 dB") {
    GrayImage a(16, 16, 0.3);
    CHECK(psnr(a, a) == 100.0);
  }

  TEST_CASE("psnr matches the brute-force oracle") {
    Rng rng(6);
    for (int trial = 0; trial < 100; ++trial) {
      GrayImage a(8, 8), b(8, 8);
      for (double& v : a.data) v = rng.uniform();
      for (double& v : b.data) v = rng.uniform();
      CHECK(psnr(a, b) == doctest::Approx(psnr_oracle(a, b)).epsilon(1e-9));
    }
  }

  TEST_CASE("ssim of an image with itself is one") {
    Rng rng(7);
    GrayImage a(32, 32);
    for (double& v : a.data) v = rng.uniform();
    CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("ssim is symmetric") {
    Rng rng(8);
    GrayImage a(24, 24), b(24, 24);
    for (double& v : a.data) v = rng.uniform();
    for (double& v : b.data) v = rng.uniform();
    CHECK(ssim(a, b) == doctest::Approx(ssim(b, a)).epsilon(1e-12));
  }

  TEST_CASE("ssim of two constants reduces to the luminance term") {
    GrayImage a(16, 16, 0.5), b(16, 16, 0.6);
    double c1 = 1e-4;  // (K1 * L)^2 with K1 = 0.01, L = 1
    double expected = (2.0 * 0.5 * 0.6 + c1) / (0.25 + 0.36 + c1);
    CHECK(ssim(a, b) == doctest::Approx(expected).epsilon(1e-9));
  }

  TEST_CASE("ssim decreases when noise is added") {
    Rng rng(9);
    GrayImage clean(32, 32, 0.5);
    for (double& v : clean.data) v = 0.25 + 0.5 * rng.uniform();
    GrayImage noisy = clean;
    for (double& v : noisy.data) v += 0.05 * rng.normal();
    CHECK(ssim(clean, noisy) < 1.0);
    CHECK(ssim(clean, noisy) > 0.0);
  }

  TEST_CASE("ssim needs at least an 11x11 image") {
    GrayImage tiny(8, 8, 0.5);
    CHECK_THROWS(ssim(tiny, tiny));
  }
}
