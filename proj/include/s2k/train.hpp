#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "s2k/dataset.hpp"
#include "s2k/model.hpp"
#include "s2k/nn/adam.hpp"

namespace s2k {

struct TrainConfig {
  GeneratorConfig gen;  // gen.input_size must equal the dataset spec_size
  int disc_base = 32;
  LossWeights weights;
  nn::AdamConfig<float> adam_g;  // lr 0.001, betas (0.5, 0.999)
  nn::AdamConfig<float> adam_d;
  int epochs = 20;
  int batch_size = 8;
  std::uint64_t seed = 1;
  int native_size = 15;        // kernel grid stamped into checkpoints
  int checkpoint_every = 0;    // epochs between snapshots; 0 = final only
  std::string out_dir;         // checkpoints + loss_log.csv; "" = no files
};

// Per-epoch aggregates. Loss terms are means over the epoch's batches,
// unweighted; val_dv is the median validation D_v (NaN without a
// validation set).
struct EpochStats {
  int epoch = 0;
  long step = 0;  // cumulative optimizer steps
  double l1 = 0.0, adv = 0.0, tv = 0.0, d_loss = 0.0;
  double val_dv = 0.0;
};

struct TrainResult {
  std::shared_ptr<UnetGenerator<float>> gen;
  std::shared_ptr<PatchDiscriminator<float>> disc;
  std::vector<EpochStats> stats;
};

// Adversarial training of the spectrum-to-map generator. Deterministic
// under (seed, config, dataset): initialization, shuffling and every
// reduction run in a fixed order. Throws on non-finite losses rather
// than continuing a diverged run. The optional callback fires after
// every epoch.
TrainResult train(const Dataset& train_set, const Dataset* val_set,
                  const TrainConfig& cfg,
                  const std::function<void(const EpochStats&)>& on_epoch = {});

// Median validation D_v of a generator over a dataset (the metric the
// loss log tracks). Every estimate is extracted at its own sample's
// ground-truth kernel size, so mixed-family datasets are fine.
double median_val_dv(const UnetGenerator<float>& gen, const Dataset& ds);

}  // namespace s2k
