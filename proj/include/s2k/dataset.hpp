#pragma once

#include <array>
#include <string>
#include <vector>

#include "s2k/degrade.hpp"
#include "s2k/image.hpp"
#include "s2k/kernels.hpp"

namespace s2k {

// One synthesized training/evaluation sample. Stored on disk as a
// tensor container per sample plus one manifest.csv per dataset.
struct Sample {
  GrayImage hr;          // the HR crop the sample was degraded from
  GrayImage lr;          // degraded observation
  Kernel kernel;         // ground-truth blur kernel
  GrayImage spectrum;    // prepared network input (spec_size^2)
  GrayImage target_map;  // supervision target (spec_size^2)
  KernelFamily family = KernelFamily::gaussian;
  int scale = 2;
  std::string file;                    // path relative to the manifest
  std::array<double, 4> params{};      // family parameters (see manifest)
};

struct Dataset {
  std::vector<Sample> samples;
  int spec_size = 64;
  int scale = 2;
  std::string dir;
};

// Dataset synthesis: draws kernels, degrades random HR crops and writes
// sample files + manifest. HR images come from the PNG files in hr_dir
// (sorted by name); each must be at least scale * spec_size on both
// sides. family "mixed" draws the family per sample.
struct SynthConfig {
  std::string hr_dir;
  std::string out_dir;
  int count = 100;
  std::string family = "gaussian";  // gaussian | motion | disk | mixed
  int spec_size = 64;
  DegradationConfig degrade;
  std::uint64_t seed = 1;
  int jobs = 1;  // sample-level parallelism; results are order-stable
};
void synth_dataset(const SynthConfig& cfg);

Dataset load_dataset(const std::string& dir);

}  // namespace s2k
