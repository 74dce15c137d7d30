#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "s2k/image.hpp"
#include "s2k/kernels.hpp"
#include "s2k/nn/adam.hpp"
#include "s2k/nn/autodiff.hpp"
#include "s2k/nn/ops.hpp"
#include "s2k/rng.hpp"

namespace s2k {

// Architecture of the spectrum-to-kernel-map generator. depth counts the
// stride-2 encoder stages; channels double per stage, capped at
// 8 * base_channels. input_size must be divisible by 2^depth and by 16
// (the discriminator reduces by 16).
struct GeneratorConfig {
  int depth = 5;
  int base_channels = 32;
  int input_size = 64;
};

struct LossWeights {
  double lambda_l1 = 100.0;
  double lambda_adv = 1.0;
  double lambda_tv = 1.0;
};

namespace detail {

template <class T>
struct ConvBlock {
  nn::Var<T> w, b;          // conv / transposed-conv parameters
  nn::Var<T> gamma, beta;   // instance norm affine (null when norm is off)
  bool norm = false;
};

}  // namespace detail

// pix2pix-style U-net over 1-channel spectra: stride-2 4x4 convs down,
// mirrored transposed convs up with skip concatenations, instance norm
// everywhere except the first encoder stage, 1x1-spatial stages and the
// sigmoid output layer.
template <class T>
class UnetGenerator {
 public:
  UnetGenerator(const GeneratorConfig& cfg, Rng& rng);

  // spec [N, 1, S, S] -> kernel map [N, 1, S, S] in (0, 1).
  nn::Var<T> forward(const nn::Var<T>& spec) const;

  std::vector<nn::Var<T>> parameters() const;
  void set_trainable(bool on);
  const GeneratorConfig& config() const { return cfg_; }

 private:
  GeneratorConfig cfg_;
  std::vector<detail::ConvBlock<T>> enc_, dec_;
};

// 4-stage stride-2 patch discriminator over (spectrum, map) pairs with a
// 3x3 scoring head; output grid is input_size / 16 per side.
template <class T>
class PatchDiscriminator {
 public:
  PatchDiscriminator(int base_channels, int input_size, Rng& rng);

  // spec, map [N, 1, S, S] -> scores [N, 1, S/16, S/16].
  nn::Var<T> forward(const nn::Var<T>& spec, const nn::Var<T>& map) const;

  std::vector<nn::Var<T>> parameters() const;
  void set_trainable(bool on);
  int base_channels() const { return base_; }
  int input_size() const { return input_size_; }

 private:
  int base_ = 32;
  int input_size_ = 64;
  std::vector<detail::ConvBlock<T>> blocks_;
  detail::ConvBlock<T> head_;
};

// Generator objective: lambda_l1 * sum|fake - real|
//                    + lambda_adv * mean((D(spec, fake) - 1)^2)
//                    + lambda_tv * TV(fake).
// The caller freezes the discriminator first so backward() populates
// generator gradients only.
template <class T>
struct GeneratorLoss {
  nn::Var<T> total;
  double l1 = 0.0, adv = 0.0, tv = 0.0;  // unweighted term values
};
template <class T>
GeneratorLoss<T> generator_loss(const PatchDiscriminator<T>& d,
                                const nn::Var<T>& spec, const nn::Var<T>& fake,
                                const nn::Var<T>& real_map,
                                const LossWeights& w);

// Discriminator objective:
// mean(D(spec, fake)^2) + mean((D(spec, real) - 1)^2); pass the fake map
// through nn::detach so no generator gradient exists by construction.
template <class T>
nn::Var<T> discriminator_loss(const PatchDiscriminator<T>& d,
                              const nn::Var<T>& spec,
                              const nn::Var<T>& fake_detached,
                              const nn::Var<T>& real_map);

// Supervision target: the kernel upsampled to the map grid and rescaled
// so its peak is exactly 1.
GrayImage target_kernel_map(const Kernel& k, int map_size);

// Back-mapping: bilinear resample of the map to the native kernel grid,
// negative values clamped, renormalized to sum 1. Throws EstimationError
// when the map carries no mass.
Kernel extract_kernel(const GrayImage& map, int native_size);

// Full estimation path for a degraded image: spectrum, generator, kernel
// extraction.
Kernel estimate_kernel(const UnetGenerator<float>& gen, const GrayImage& lr,
                       int native_size);

// Checkpointing (generator always, discriminator when present).
struct CheckpointMeta {
  GeneratorConfig gen;
  int native_size = 15;
  int disc_base = 0;  // 0 = checkpoint carries no discriminator
};

void save_checkpoint(const std::string& path, const UnetGenerator<float>& gen,
                     const PatchDiscriminator<float>* disc,
                     const CheckpointMeta& meta);

struct LoadedModel {
  CheckpointMeta meta;
  std::shared_ptr<UnetGenerator<float>> gen;
  std::shared_ptr<PatchDiscriminator<float>> disc;  // null if absent
};
LoadedModel load_checkpoint(const std::string& path);

}  // namespace s2k
