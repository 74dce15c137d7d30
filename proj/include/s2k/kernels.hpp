#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "s2k/image.hpp"
#include "s2k/rng.hpp"

namespace s2k {

// A blur kernel is a square, odd-sized, non-negative raster that sums
// to 1. Reuses the GrayImage container.
using Kernel = GrayImage;

enum class KernelFamily { gaussian, motion, disk };

std::string to_string(KernelFamily f);
KernelFamily kernel_family_from_string(const std::string& s);

// Anisotropic Gaussian: sigma_x along the x (column) axis before the
// whole frame is rotated by theta (radians, counter-clockwise).
struct GaussianParams {
  double sigma_x = 1.0;
  double sigma_y = 1.0;
  double theta = 0.0;
  int size = 15;
};

// Random camera-shake trajectory in the complex plane, splatted onto
// the grid with bilinear weights and centered on its centroid. Fully
// determined by the seed and the numeric parameters. The velocity
// update per step is v <- v*(1-d) + gaussian shake + impulsive jump,
// where the jump fires with probability `anxiety` and its magnitude is
// scaled by `anxiety` as well.
struct MotionParams {
  std::uint64_t seed = 0;
  double exposure = 0.2;   // fraction of the trajectory that is exposed
  double anxiety = 0.005;  // impulse probability per step and scale
  int steps = 2000;
  double shake = 0.02;     // per-step Gaussian velocity perturbation std
  int size = 23;
};

// Ideal defocus disk; boundary cells take fractional coverage computed
// by supersampling.
struct DiskParams {
  double radius = 2.0;
  int size = 15;
};

using KernelParams = std::variant<GaussianParams, MotionParams, DiskParams>;

KernelFamily family_of(const KernelParams& p);
int size_of(const KernelParams& p);

// Synthesis. All three normalize to sum 1 and throw InvalidArgument on
// a bad size (even or < 3) or out-of-range shape parameters.
Kernel gaussian_kernel(const GaussianParams& p);
Kernel motion_kernel(const MotionParams& p);
Kernel disk_kernel(const DiskParams& p);
Kernel synthesize(const KernelParams& p);

// Centered Dirac delta; the scale-1 / no-blur kernel.
Kernel delta_kernel(int size);

// Draws parameters uniformly from each family's training range:
//   gaussian: sigma in [1, 3] per axis, theta in [0, 2pi), size 15
//   motion:   exposure in [0.15, 0.30], anxiety 0.005, size 23
//   disk:     radius in [1, 3], size 15
KernelParams sample_params(KernelFamily family, Rng& rng);

// Mass center of a kernel in pixel coordinates (y, x).
void centroid(const Kernel& k, double* cy, double* cx);

}  // namespace s2k
