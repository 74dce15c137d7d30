#include "s2k/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "s2k/errors.hpp"
#include "s2k/metrics.hpp"

extern "C" void openblas_set_num_threads(int);

namespace fs = std::filesystem;

namespace s2k {

namespace {

// Packs dataset rasters into a [B, 1, S, S] batch tensor.
nn::Var<float> make_batch(const Dataset& ds, const std::vector<int>& order,
                          std::size_t begin, std::size_t end, bool spectrum) {
  int s = ds.spec_size;
  int b = int(end - begin);
  auto t = nn::make_var<float>({b, 1, s, s});
  for (int i = 0; i < b; ++i) {
    const Sample& smp = ds.samples[order[begin + i]];
    const GrayImage& src = spectrum ? smp.spectrum : smp.target_map;
    for (std::size_t k = 0; k < src.size(); ++k)
      t->val[std::size_t(i) * s * s + k] = float(src.data[k]);
  }
  return t;
}

GrayImage slice_to_image(const nn::Var<float>& t, int index, int s) {
  GrayImage img(s, s);
  const float* src = t->val.data() + std::size_t(index) * s * s;
  for (std::size_t k = 0; k < img.size(); ++k) img.data[k] = double(src[k]);
  return img;
}

}  // namespace

double median_val_dv(const UnetGenerator<float>& gen, const Dataset& ds) {
  std::vector<double> dvs;
  dvs.reserve(ds.samples.size());
  std::vector<int> order(ds.samples.size());
  std::iota(order.begin(), order.end(), 0);

  int s = ds.spec_size;
  const std::size_t chunk = 16;
  for (std::size_t begin = 0; begin < order.size(); begin += chunk) {
    std::size_t end = std::min(begin + chunk, order.size());
    auto spec = make_batch(ds, order, begin, end, true);
    auto maps = gen.forward(spec);
    for (std::size_t i = begin; i < end; ++i) {
      const Sample& smp = ds.samples[order[i]];
      Kernel est = extract_kernel(slice_to_image(maps, int(i - begin), s),
                                  smp.kernel.height);
      dvs.push_back(dv(smp.kernel, est));
    }
  }
  std::sort(dvs.begin(), dvs.end());
  std::size_t n = dvs.size();
  return n % 2 ? dvs[n / 2] : 0.5 * (dvs[n / 2 - 1] + dvs[n / 2]);
}

TrainResult train(const Dataset& train_set, const Dataset* val_set,
                  const TrainConfig& cfg,
                  const std::function<void(const EpochStats&)>& on_epoch) {
  if (train_set.samples.empty()) throw DataError("train: empty dataset");
  if (cfg.gen.input_size != train_set.spec_size)
    throw InvalidArgument("train: generator input_size differs from dataset");
  if (cfg.batch_size < 1 || cfg.epochs < 1)
    throw InvalidArgument("train: bad batch size or epoch count");
  if (val_set && val_set->spec_size != train_set.spec_size)
    throw InvalidArgument("train: validation spec_size differs");

  // Single-threaded BLAS keeps reductions bit-reproducible.
  openblas_set_num_threads(1);

  Rng seed_root(cfg.seed);
  Rng g_init = seed_root.fork(1);
  Rng d_init = seed_root.fork(2);
  Rng shuffle_rng = seed_root.fork(3);

  TrainResult result;
  result.gen = std::make_shared<UnetGenerator<float>>(cfg.gen, g_init);
  result.disc = std::make_shared<PatchDiscriminator<float>>(
      cfg.disc_base, cfg.gen.input_size, d_init);
  UnetGenerator<float>& gen = *result.gen;
  PatchDiscriminator<float>& disc = *result.disc;

  nn::Adam<float> adam_g(gen.parameters(), cfg.adam_g);
  nn::Adam<float> adam_d(disc.parameters(), cfg.adam_d);

  std::ofstream log;
  if (!cfg.out_dir.empty()) {
    fs::create_directories(cfg.out_dir);
    log.open(fs::path(cfg.out_dir) / "loss_log.csv");
    if (!log) throw DataError("train: cannot write loss log");
    log << "epoch,step,l1,adv,tv,d_loss,val_dv\n";
  }

  std::vector<int> order(train_set.samples.size());
  std::iota(order.begin(), order.end(), 0);
  long step = 0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    // Fisher-Yates with the epoch's forked stream.
    Rng er = shuffle_rng.fork(std::uint64_t(epoch));
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[er.uniform_int(int(i))]);

    double sum_l1 = 0.0, sum_adv = 0.0, sum_tv = 0.0, sum_d = 0.0;
    int batches = 0;

    for (std::size_t begin = 0; begin < order.size();
         begin += std::size_t(cfg.batch_size)) {
      std::size_t end =
          std::min(begin + std::size_t(cfg.batch_size), order.size());
      auto spec = make_batch(train_set, order, begin, end, true);
      auto real_map = make_batch(train_set, order, begin, end, false);

      auto fake = gen.forward(spec);

      // Discriminator step on the detached fake.
      auto d_obj = discriminator_loss(disc, spec, nn::detach(fake), real_map);
      nn::backward(d_obj);
      adam_d.step();

      // Generator step; freeze the discriminator so its gradients stay
      // exactly zero while the adversarial term backpropagates through it.
      disc.set_trainable(false);
      auto g_obj = generator_loss(disc, spec, fake, real_map, cfg.weights);
      nn::backward(g_obj.total);
      disc.set_trainable(true);
      adam_g.step();

      double d_val = double(d_obj->val[0]);
      double g_val = double(g_obj.total->val[0]);
      if (!std::isfinite(d_val) || !std::isfinite(g_val))
        throw Error("train: non-finite loss at epoch " +
                    std::to_string(epoch) + ", step " + std::to_string(step));

      sum_l1 += g_obj.l1;
      sum_adv += g_obj.adv;
      sum_tv += g_obj.tv;
      sum_d += d_val;
      ++batches;
      ++step;
    }

    EpochStats st;
    st.epoch = epoch;
    st.step = step;
    st.l1 = sum_l1 / batches;
    st.adv = sum_adv / batches;
    st.tv = sum_tv / batches;
    st.d_loss = sum_d / batches;
    st.val_dv = val_set ? median_val_dv(gen, *val_set)
                        : std::nan("");
    result.stats.push_back(st);

    if (log) {
      char row[256];
      std::snprintf(row, sizeof(row), "%d,%ld,%.8g,%.8g,%.8g,%.8g,%.8g\n",
                    st.epoch, st.step, st.l1, st.adv, st.tv, st.d_loss,
                    st.val_dv);
      log << row;
      log.flush();
    }
    if (!cfg.out_dir.empty() && cfg.checkpoint_every > 0 &&
        epoch % cfg.checkpoint_every == 0 && epoch != cfg.epochs) {
      CheckpointMeta meta{cfg.gen, cfg.native_size, cfg.disc_base};
      save_checkpoint((fs::path(cfg.out_dir) /
                       ("model_epoch_" + std::to_string(epoch) + ".s2k1"))
                          .string(),
                      gen, &disc, meta);
    }
    if (on_epoch) on_epoch(st);
  }

  if (!cfg.out_dir.empty()) {
    CheckpointMeta meta{cfg.gen, cfg.native_size, cfg.disc_base};
    save_checkpoint((fs::path(cfg.out_dir) / "model.s2k1").string(), gen,
                    &disc, meta);
  }
  return result;
}

}  // namespace s2k
