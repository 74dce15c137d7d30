#include <doctest.h>

#include <cmath>

#include "s2k/baseline.hpp"
#include "s2k/degrade.hpp"
#include "s2k/errors.hpp"
#include "s2k/kernels.hpp"
#include "s2k/metrics.hpp"
#include "s2k/rng.hpp"

using namespace s2k;

namespace {

// White noise is the flat-prior carrier: its expected amplitude
// spectrum is constant, so the blurred spectrum is the kernel's.
GrayImage white_noise(int size, std::uint64_t seed) {
  GrayImage img(size, size);
  Rng rng(seed);
  for (double& v : img.data) v = rng.uniform();
  return img;
}

GrayImage blur(const GrayImage& img, const Kernel& k) {
  return convolve2d(img, k, Boundary::circular);
}

}  // namespace

TEST_SUITE("baseline") {
  TEST_CASE("recovers an isotropic sigma-2 blur within 10 percent") {
    GaussianParams p;
    p.sigma_x = p.sigma_y = 2.0;
    Kernel k = gaussian_kernel(p);
    BaselineConfig cfg;
    cfg.prior = BaselineConfig::Prior::flat;

    GrayImage lr = blur(white_noise(128, 1), k);
    BaselineEstimate est = estimate_gaussian_spectral(lr, cfg);
    CHECK(est.params.sigma_x > 1.8);
    CHECK(est.params.sigma_x < 2.2);
    CHECK(est.params.sigma_y > 1.8);
    CHECK(est.params.sigma_y < 2.2);
  }

  TEST_CASE("isotropic inputs give near-equal axes") {
    GaussianParams p;
    p.sigma_x = p.sigma_y = 1.5;
    Kernel k = gaussian_kernel(p);
    BaselineConfig cfg;
    cfg.prior = BaselineConfig::Prior::flat;
    GrayImage lr = blur(white_noise(128, 2), k);
    BaselineEstimate est = estimate_gaussian_spectral(lr, cfg);
    CHECK(std::abs(est.params.sigma_x - est.params.sigma_y) /
              est.params.sigma_x <
          0.1);
  }

  TEST_CASE("anisotropy flips across the Fourier transform") {
    GaussianParams p;
    p.sigma_x = 1.0;
    p.sigma_y = 3.0;
    p.theta = 0.0;
    Kernel k = gaussian_kernel(p);
    BaselineConfig cfg;
    cfg.prior = BaselineConfig::Prior::flat;
    GrayImage lr = blur(white_noise(128, 3), k);
    BaselineEstimate est = estimate_gaussian_spectral(lr, cfg);

    // The spectrum must be narrow along the axis where the kernel is
    // wide, and the recovered kernel must match the true one.
    double spec_wide = std::max(est.fit.sigma_u, est.fit.sigma_v);
    double spec_narrow = std::min(est.fit.sigma_u, est.fit.sigma_v);
    CHECK(spec_wide / spec_narrow > 2.0);
    CHECK(dv(gaussian_kernel(est.params), k) < 1e-3);
  }

  TEST_CASE("estimated sigma grows monotonically with the true blur") {
    BaselineConfig cfg;
    cfg.prior = BaselineConfig::Prior::flat;
    double prev_sigma_u = 1e9;
    double prev_est = 0.0;
    for (double sigma : {1.0, 2.0, 3.0}) {
      GaussianParams p;
      p.sigma_x = p.sigma_y = sigma;
      GrayImage lr = blur(white_noise(128, 4), gaussian_kernel(p));
      BaselineEstimate est = estimate_gaussian_spectral(lr, cfg);
      CHECK(est.fit.sigma_u < prev_sigma_u);  // duality: wider blur, narrower spectrum
      CHECK(est.params.sigma_x > prev_est);
      prev_sigma_u = est.fit.sigma_u;
      prev_est = est.params.sigma_x;
    }
  }

  TEST_CASE("the one-over-r prior also recovers textured scenes roughly") {
    // A 1/f-shaped carrier with the whitening prior: looser tolerance,
    // the prior only matches natural-image statistics on average.
    GaussianParams p;
    p.sigma_x = p.sigma_y = 2.0;
    Kernel k = gaussian_kernel(p);
    BaselineConfig cfg;  // defaults to the one_over_r prior
    GrayImage lr = blur(white_noise(128, 5), k);
    BaselineEstimate est = estimate_gaussian_spectral(lr, cfg);
    CHECK(est.params.sigma_x > 1.0);
    CHECK(est.params.sigma_x < 4.0);
  }

  TEST_CASE("unblurred input is out of model") {
    BaselineConfig cfg;
    cfg.prior = BaselineConfig::Prior::flat;
    GrayImage sharp = white_noise(128, 6);
    CHECK_THROWS_AS((void)estimate_gaussian_spectral(sharp, cfg),
                    EstimationError);
  }

  TEST_CASE("output is always a valid kernel") {
    GaussianParams p;
    p.sigma_x = 1.2;
    p.sigma_y = 2.4;
    p.theta = 0.9;
    Kernel k = gaussian_kernel(p);
    BaselineConfig cfg;
    cfg.prior = BaselineConfig::Prior::flat;
    GrayImage lr = blur(white_noise(128, 7), k);
    BaselineEstimate est = estimate_gaussian_spectral(lr, cfg);
    double s = 0.0;
    for (double v : est.kernel.data) {
      CHECK(v >= 0.0);
      s += v;
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("whiten_spectrum applies the radial ramp") {
    Spectrum spec(9, 9, 1.0);
    Spectrum flat = whiten_spectrum(spec, BaselineConfig::Prior::flat);
    CHECK(flat.data == spec.data);
    Spectrum ramped = whiten_spectrum(spec, BaselineConfig::Prior::one_over_r);
    CHECK(ramped.at(4, 4) == doctest::Approx(1.0).epsilon(1e-12));  // r = 0
    CHECK(ramped.at(4, 7) == doctest::Approx(4.0).epsilon(1e-12));  // r = 3
  }
}
