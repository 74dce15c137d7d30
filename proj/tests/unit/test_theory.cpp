#include <doctest.h>

#include <cmath>
#include <vector>

#include "s2k/kernels.hpp"
#include "s2k/rng.hpp"
#include "s2k/spectral.hpp"
#include "s2k/synthetic.hpp"
#include "s2k/theory.hpp"

using namespace s2k;

TEST_SUITE("theory") {
  TEST_CASE("truncate follows the threshold definition") {
    std::vector<double> x = {0.4, 0.6, -0.7, 0.0, 0.5};
    auto out = truncate(x, 0.5);
    CHECK(out[0] == 0.0);
    CHECK(out[1] == 0.6);
    CHECK(out[2] == 0.7);  // survivors keep their magnitude, not their sign
    CHECK(out[3] == 0.0);
    CHECK(out[4] == 0.5);  // ties at the threshold survive
  }

  TEST_CASE("truncate of all-zeros is all-zeros") {
    std::vector<double> x(16, 0.0);
    for (double v : truncate(x, 1e-3)) CHECK(v == 0.0);
  }

  TEST_CASE("truncate with tau above the max zeroes everything") {
    std::vector<double> x = {0.1, -0.2, 0.05};
    for (double v : truncate(x, 0.5)) CHECK(v == 0.0);
  }

  TEST_CASE("phi is zero on identical operands and symmetric") {
    Rng rng(1);
    std::vector<double> x(64), y(64);
    for (auto& v : x) v = rng.uniform();
    for (auto& v : y) v = rng.uniform();
    ShapeConfig cfg;
    CHECK(phi(x, x, cfg) == 0);
    CHECK(phi(x, y, cfg) == phi(y, x, cfg));
  }

  TEST_CASE("phi counts every surviving difference") {
    std::vector<double> ones(16, 1.0), zeros(16, 0.0);
    ShapeConfig cfg;
    cfg.tau = 0.5;
    CHECK(phi(ones, zeros, cfg) == 16);
  }

  TEST_CASE("advantage report respects both bounds") {
    Rng rng(7);
    TextureConfig tc;
    tc.size = 128;
    GrayImage hr = make_texture(tc, rng);

    DegradationConfig dc;
    ShapeConfig sc;
    for (KernelFamily fam :
         {KernelFamily::gaussian, KernelFamily::motion, KernelFamily::disk}) {
      KernelParams p = sample_params(fam, rng);
      AdvantageReport rep = frequency_advantage(hr, p, dc, sc);
      CHECK(rep.phi_freq <= rep.bound_freq);
      CHECK(rep.phi_spatial >= rep.bound_spatial);
      CHECK(rep.ratio ==
            doctest::Approx(double(rep.phi_freq) /
                            double(rep.phi_spatial)).epsilon(1e-12));
    }
  }

  TEST_CASE("frequency shape distance undercuts the spatial one") {
    Rng rng(9);
    TextureConfig tc;
    tc.size = 128;
    DegradationConfig dc;
    ShapeConfig sc;
    int wins = 0;
    const int trials = 10;
    for (int i = 0; i < trials; ++i) {
      GrayImage hr = make_texture(tc, rng);
      KernelParams p = sample_params(KernelFamily::gaussian, rng);
      AdvantageReport rep = frequency_advantage(hr, p, dc, sc);
      if (rep.phi_freq < rep.phi_spatial) ++wins;
    }
    CHECK(wins > trials / 2);
  }

  TEST_CASE("profile distance vanishes on identical operands") {
    Kernel k = delta_kernel(5);
    GrayImage lr = pad_kernel_center(k, 32, 32);
    ProfileDistance d = profile_distance(lr, k);
    CHECK(d.spatial == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(d.frequency == doctest::Approx(0.0).epsilon(1e-12));
  }

  TEST_CASE("profile distances are nonnegative") {
    Rng rng(11);
    TextureConfig tc;
    tc.size = 64;
    GrayImage lr = make_texture(tc, rng);
    GaussianParams p;
    p.sigma_x = p.sigma_y = 2.0;
    ProfileDistance d = profile_distance(lr, gaussian_kernel(p));
    CHECK(d.spatial >= 0.0);
    CHECK(d.frequency >= 0.0);
  }

  TEST_CASE("energy normalization also satisfies the bounds") {
    Rng rng(13);
    TextureConfig tc;
    tc.size = 128;
    GrayImage hr = make_texture(tc, rng);
    DegradationConfig dc;
    ShapeConfig sc;
    sc.norm = ShapeConfig::Norm::energy1;
    KernelParams p = sample_params(KernelFamily::gaussian, rng);
    AdvantageReport rep = frequency_advantage(hr, p, dc, sc);
    CHECK(rep.phi_freq <= rep.bound_freq);
    CHECK(rep.phi_spatial >= rep.bound_spatial);
  }
}
