#include <doctest.h>

#include <cmath>

#include "s2k/degrade.hpp"
#include "s2k/kernels.hpp"
#include "s2k/metrics.hpp"
#include "s2k/restore.hpp"
#include "s2k/rng.hpp"
#include "s2k/synthetic.hpp"

using namespace s2k;

namespace {

GrayImage test_scene(int size, std::uint64_t seed) {
  TextureConfig tc;
  tc.size = size;
  Rng rng(seed);
  return make_texture(tc, rng);
}

}  // namespace

TEST_SUITE("restoration") {
  TEST_CASE("wiener with a delta kernel and zero nsr is the identity") {
    GrayImage img = test_scene(64, 1);
    GrayImage out = wiener_deconvolve(img, delta_kernel(5), 0.0);
    for (std::size_t i = 0; i < img.size(); ++i)
      CHECK(out.data[i] == doctest::Approx(img.data[i]).epsilon(1e-9));
  }

  TEST_CASE("wiener inverts a circular blur exactly at zero nsr") {
    GrayImage img = test_scene(64, 2);
    GaussianParams p;
    p.sigma_x = p.sigma_y = 1.0;
    Kernel k = gaussian_kernel(p);
    GrayImage blurred = convolve2d(img, k, Boundary::circular);
    GrayImage restored = wiener_deconvolve(blurred, k, 0.0);
    for (std::size_t i = 0; i < img.size(); ++i)
      CHECK(restored.data[i] == doctest::Approx(img.data[i]).epsilon(1e-6));
  }

  TEST_CASE("wiener improves psnr on a blurred scene") {
    GrayImage img = test_scene(64, 3);
    GaussianParams p;
    p.sigma_x = p.sigma_y = 2.0;
    Kernel k = gaussian_kernel(p);
    GrayImage blurred = convolve2d(img, k, Boundary::circular);
    GrayImage restored = wiener_deconvolve(blurred, k, 1e-3);
    CHECK(psnr(restored, img) > psnr(blurred, img));
  }

  TEST_CASE("large nsr collapses to the image mean") {
    GrayImage img = test_scene(32, 4);
    double mean = 0.0;
    for (double v : img.data) mean += v;
    mean /= double(img.size());
    GrayImage out = wiener_deconvolve(img, delta_kernel(5), 1e12);
    for (double v : out.data) CHECK(v == doctest::Approx(mean).epsilon(1e-6));
  }

  TEST_CASE("wiener output is clamped to [0, 1]") {
    GrayImage img = test_scene(64, 5);
    GaussianParams p;
    p.sigma_x = p.sigma_y = 2.5;
    Kernel k = gaussian_kernel(p);
    GrayImage restored = wiener_deconvolve(convolve2d(img, k,
                                                      Boundary::circular),
                                           k, 1e-4);
    for (double v : restored.data) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }

  TEST_CASE("blind_sr at scale 1 with a delta kernel is the identity") {
    GrayImage img = test_scene(32, 6);
    GrayImage out = blind_sr(img, delta_kernel(5), 1, 0.0);
    for (std::size_t i = 0; i < img.size(); ++i)
      CHECK(out.data[i] == doctest::Approx(img.data[i]).epsilon(1e-9));
  }

  TEST_CASE("blind_sr upsamples by the requested factor") {
    GrayImage img = test_scene(32, 7);
    GrayImage out = blind_sr(img, delta_kernel(5), 2, 1e-3);
    CHECK(out.height == 64);
    CHECK(out.width == 64);
  }

  TEST_CASE("blind_sr is deterministic") {
    GrayImage img = test_scene(32, 8);
    GaussianParams p;
    p.sigma_x = p.sigma_y = 1.5;
    Kernel k = gaussian_kernel(p);
    GrayImage a = blind_sr(img, k, 2, 1e-3);
    GrayImage b = blind_sr(img, k, 2, 1e-3);
    CHECK(a.data == b.data);
  }

  TEST_CASE("the true kernel beats a mismatched one for most scenes") {
    DegradationConfig cfg;
    cfg.scale = 2;
    int wins = 0;
    const int trials = 20;
    for (int i = 0; i < trials; ++i) {
      GrayImage hr = test_scene(128, 100 + std::uint64_t(i));
      GaussianParams p;
      p.sigma_x = p.sigma_y = 2.0;
      Kernel k_gt = gaussian_kernel(p);
      GaussianParams wrong = p;
      wrong.sigma_x = wrong.sigma_y = (i % 2) ? 3.0 : 1.0;
      Kernel k_wrong = gaussian_kernel(wrong);

      GrayImage lr = degrade(hr, k_gt, cfg);
      double p_gt = psnr(blind_sr(lr, k_gt, 2, 1e-3), hr);
      double p_wrong = psnr(blind_sr(lr, k_wrong, 2, 1e-3), hr);
      if (p_gt > p_wrong) ++wins;
    }
    CHECK(wins > trials / 2);
  }
}
