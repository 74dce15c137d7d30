#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "s2k/degrade.hpp"
#include "s2k/image.hpp"
#include "s2k/kernels.hpp"

namespace s2k {

// Configuration of the sparsity shape measure.
struct ShapeConfig {
  enum class Norm { peak1, energy1 };
  double tau = 1e-3;        // truncation threshold
  Norm norm = Norm::peak1;  // pre-normalization applied to each operand
};

// Elementwise truncation: |x| < tau maps to 0, everything else keeps
// its magnitude.
std::vector<double> truncate(std::span<const double> x, double tau);

// Shape distance phi(X, Y) = ||truncate(X' - Y', tau)||_0 where X', Y'
// are the operands after the configured normalization (peak1 divides by
// max |x|, energy1 by the L2 norm; all-zero operands pass through).
// Operands must have equal length.
std::size_t phi(std::span<const double> x, std::span<const double> y,
                const ShapeConfig& cfg);

// One frequency-vs-spatial comparison for a given HR image and kernel.
// The degraded image is produced with cfg_degrade (noise is forced off),
// the kernel spectrum F and image spectrum G live on the LR grid, and
// the spatial comparison pits the center-padded kernel against the LR
// image itself.
struct AdvantageReport {
  std::size_t phi_freq = 0;       // phi(G, F)
  std::size_t phi_spatial = 0;    // phi(k_padded, I_LR)
  std::size_t bound_freq = 0;     // ||truncate(F', tau)||_0
  std::size_t bound_spatial = 0;  // ||trunc(I', 2 tau)||_0 - ||trunc(k', tau)||_0
  double ratio = 0.0;             // phi_freq / phi_spatial
};
AdvantageReport frequency_advantage(const GrayImage& hr, const Kernel& k,
                                    const DegradationConfig& cfg_degrade,
                                    const ShapeConfig& cfg_shape);
AdvantageReport frequency_advantage(const GrayImage& hr, const KernelParams& p,
                                    const DegradationConfig& cfg_degrade,
                                    const ShapeConfig& cfg_shape);

// 1-D profile comparison: operands are summed along rows (one value per
// column), peak-normalized, and compared by mean absolute difference.
// Returns {spatial, frequency} distances: spatial compares the
// center-padded kernel against the LR image, frequency compares their
// amplitude spectra.
struct ProfileDistance {
  double spatial = 0.0;
  double frequency = 0.0;
};
ProfileDistance profile_distance(const GrayImage& lr, const Kernel& k);

}  // namespace s2k
