#include "s2k/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "s2k/errors.hpp"

namespace s2k {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Motion-trajectory tuning. Velocity decays by kDamping per step, starts
// at kInitSpeed in a random direction, takes Gaussian kicks of std
// `shake`, and with probability `anxiety` an impulsive jump of std
// anxiety * kImpulseGain per component. With the documented anxiety of
// 0.005 and default shake this keeps the exposed sub-trajectory a few
// pixels wide, well inside the 23x23 grid; rare escapes are retried with
// a forked seed.
constexpr double kDamping = 0.1;
constexpr double kInitSpeed = 0.25;
constexpr double kImpulseGain = 50.0;
constexpr int kMaxMotionAttempts = 10;

void check_size(int size) {
  if (size < 3 || size % 2 == 0)
    throw InvalidArgument("kernel size must be odd and >= 3, got " +
                          std::to_string(size));
}

void normalize_sum(Kernel& k) {
  double s = 0.0;
  for (double v : k.data) s += v;
  if (s <= 0.0) throw InvalidArgument("kernel has no mass");
  for (double& v : k.data) v /= s;
}

}  // namespace

std::string to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::motion: return "motion";
    case KernelFamily::disk: return "disk";
  }
  return "unknown";
}

KernelFamily kernel_family_from_string(const std::string& s) {
  if (s == "gaussian") return KernelFamily::gaussian;
  if (s == "motion") return KernelFamily::motion;
  if (s == "disk") return KernelFamily::disk;
  throw InvalidArgument("unknown kernel family: " + s);
}

KernelFamily family_of(const KernelParams& p) {
  if (std::holds_alternative<GaussianParams>(p)) return KernelFamily::gaussian;
  if (std::holds_alternative<MotionParams>(p)) return KernelFamily::motion;
  return KernelFamily::disk;
}

int size_of(const KernelParams& p) {
  if (auto* g = std::get_if<GaussianParams>(&p)) return g->size;
  if (auto* m = std::get_if<MotionParams>(&p)) return m->size;
  return std::get<DiskParams>(p).size;
}

Kernel gaussian_kernel(const GaussianParams& p) {
  check_size(p.size);
  if (p.sigma_x <= 0.0 || p.sigma_y <= 0.0)
    throw InvalidArgument("gaussian sigma must be positive");

  int c = p.size / 2;
  double ct = std::cos(p.theta), st = std::sin(p.theta);
  Kernel k(p.size, p.size);
  for (int y = 0; y < p.size; ++y) {
    for (int x = 0; x < p.size; ++x) {
      double dx = x - c, dy = y - c;
      // Rotate the offset into the kernel frame; sigma_x acts along the
      // frame's x axis.
      double u = ct * dx + st * dy;
      double v = -st * dx + ct * dy;
      k.at(y, x) = std::exp(-0.5 * (u * u / (p.sigma_x * p.sigma_x) +
                                    v * v / (p.sigma_y * p.sigma_y)));
    }
  }
  normalize_sum(k);
  return k;
}

Kernel motion_kernel(const MotionParams& p) {
  check_size(p.size);
  if (p.exposure <= 0.0 || p.exposure > 1.0)
    throw InvalidArgument("motion exposure must be in (0, 1]");
  if (p.steps < 100) throw InvalidArgument("motion steps must be >= 100");
  if (p.anxiety < 0.0 || p.anxiety > 1.0)
    throw InvalidArgument("motion anxiety must be in [0, 1]");
  if (p.shake < 0.0) throw InvalidArgument("motion shake must be >= 0");

  int c = p.size / 2;
  int exposed = std::max(2, int(std::lround(p.exposure * p.steps)));
  exposed = std::min(exposed, p.steps);
  Rng base(p.seed);

  for (int attempt = 0; attempt < kMaxMotionAttempts; ++attempt) {
    Rng rng = base.fork(std::uint64_t(attempt));

    // Damped velocity with Gaussian shake and sparse impulsive jumps;
    // integrate for the positions.
    double phi = 2.0 * kPi * rng.uniform();
    std::complex<double> v = kInitSpeed *
                             std::complex<double>(std::cos(phi), std::sin(phi));
    std::complex<double> x(0.0, 0.0);
    std::vector<std::complex<double>> pos(p.steps);
    for (int t = 0; t < p.steps; ++t) {
      v *= 1.0 - kDamping;
      if (p.shake > 0.0)
        v += p.shake * std::complex<double>(rng.normal(), rng.normal());
      if (p.anxiety > 0.0 && rng.uniform() < p.anxiety)
        v += p.anxiety * kImpulseGain *
             std::complex<double>(rng.normal(), rng.normal());
      x += v;
      pos[t] = x;
    }

    // The exposed sub-trajectory, re-centered on its own centroid.
    std::complex<double> mean(0.0, 0.0);
    for (int t = 0; t < exposed; ++t) mean += pos[t];
    mean /= double(exposed);

    Kernel k(p.size, p.size);
    bool escaped = false;
    for (int t = 0; t < exposed && !escaped; ++t) {
      double px = c + (pos[t].real() - mean.real());
      double py = c + (pos[t].imag() - mean.imag());
      int ix = int(std::floor(px)), iy = int(std::floor(py));
      if (ix < 0 || iy < 0 || ix + 1 >= p.size || iy + 1 >= p.size) {
        escaped = true;
        break;
      }
      double fx = px - ix, fy = py - iy;
      k.at(iy, ix) += (1.0 - fx) * (1.0 - fy);
      k.at(iy, ix + 1) += fx * (1.0 - fy);
      k.at(iy + 1, ix) += (1.0 - fx) * fy;
      k.at(iy + 1, ix + 1) += fx * fy;
    }
    if (escaped) continue;

    normalize_sum(k);
    return k;
  }
  throw InvalidArgument("motion trajectory escaped the grid for every retry; "
                        "parameters are out of the supported range");
}

Kernel disk_kernel(const DiskParams& p) {
  check_size(p.size);
  if (p.radius <= 0.0) throw InvalidArgument("disk radius must be positive");
  int c = p.size / 2;
  if (p.radius > c + 0.5)
    throw InvalidArgument("disk radius exceeds the kernel grid");

  constexpr int kSub = 16;  // boundary cells: 16x16 coverage supersampling
  Kernel k(p.size, p.size);
  double r2 = p.radius * p.radius;
  for (int y = 0; y < p.size; ++y) {
    for (int x = 0; x < p.size; ++x) {
      double dx = x - c, dy = y - c;
      // Nearest / farthest distance from the disk center to this cell.
      double ax = std::max(std::abs(dx) - 0.5, 0.0);
      double ay = std::max(std::abs(dy) - 0.5, 0.0);
      double near2 = ax * ax + ay * ay;
      double bx = std::abs(dx) + 0.5, by = std::abs(dy) + 0.5;
      double far2 = bx * bx + by * by;

      if (far2 <= r2) {
        k.at(y, x) = 1.0;
      } else if (near2 >= r2) {
        k.at(y, x) = 0.0;
      } else {
        int inside = 0;
        for (int sy = 0; sy < kSub; ++sy) {
          double py = dy - 0.5 + (sy + 0.5) / kSub;
          for (int sx = 0; sx < kSub; ++sx) {
            double px = dx - 0.5 + (sx + 0.5) / kSub;
            if (px * px + py * py <= r2) ++inside;
          }
        }
        k.at(y, x) = double(inside) / (kSub * kSub);
      }
    }
  }
  normalize_sum(k);
  return k;
}

Kernel synthesize(const KernelParams& p) {
  if (auto* g = std::get_if<GaussianParams>(&p)) return gaussian_kernel(*g);
  if (auto* m = std::get_if<MotionParams>(&p)) return motion_kernel(*m);
  return disk_kernel(std::get<DiskParams>(p));
}

Kernel delta_kernel(int size) {
  check_size(size);
  Kernel k(size, size);
  k.at(size / 2, size / 2) = 1.0;
  return k;
}

KernelParams sample_params(KernelFamily family, Rng& rng) {
  switch (family) {
    case KernelFamily::gaussian: {
      GaussianParams g;
      g.sigma_x = rng.uniform(1.0, 3.0);
      g.sigma_y = rng.uniform(1.0, 3.0);
      g.theta = rng.uniform(0.0, 2.0 * kPi);
      g.size = 15;
      return g;
    }
    case KernelFamily::motion: {
      MotionParams m;
      m.seed = rng.next_u64();
      m.exposure = rng.uniform(0.15, 0.30);
      m.anxiety = 0.005;
      m.steps = 2000;
      m.size = 23;
      return m;
    }
    case KernelFamily::disk: {
      DiskParams d;
      d.radius = rng.uniform(1.0, 3.0);
      d.size = 15;
      return d;
    }
  }
  throw InvalidArgument("bad kernel family");
}

void centroid(const Kernel& k, double* cy, double* cx) {
  double sy = 0.0, sx = 0.0, s = 0.0;
  for (int y = 0; y < k.height; ++y)
    for (int x = 0; x < k.width; ++x) {
      double v = k.at(y, x);
      s += v;
      sy += v * y;
      sx += v * x;
    }
  if (s <= 0.0) throw InvalidArgument("centroid of an empty kernel");
  *cy = sy / s;
  *cx = sx / s;
}

}  // namespace s2k
