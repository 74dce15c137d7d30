#include "s2k/model.hpp"

#include <algorithm>
#include <cmath>

#include "s2k/errors.hpp"
#include "s2k/spectral.hpp"
#include "s2k/tensor_file.hpp"

namespace s2k {

namespace {

int stage_channels(int base, int i) { return base * std::min(1 << i, 8); }

template <class T>
nn::Var<T> make_param(std::vector<int> shape, const std::string& name,
                      Rng* rng, double init_std) {
  auto v = nn::make_var<T>(std::move(shape), true, name);
  if (rng && init_std > 0.0)
    for (auto& x : v->val) x = T(rng->normal(0.0, init_std));
  return v;
}

template <class T>
detail::ConvBlock<T> make_block(int in_ch, int out_ch, bool norm,
                                const std::string& name, Rng& rng,
                                bool transposed, int ksize = 4) {
  detail::ConvBlock<T> b;
  std::vector<int> wshape = transposed
                                ? std::vector<int>{in_ch, out_ch, ksize, ksize}
                                : std::vector<int>{out_ch, in_ch, ksize, ksize};
  b.w = make_param<T>(std::move(wshape), name + ".w", &rng, 0.02);
  b.b = make_param<T>({out_ch}, name + ".b", nullptr, 0.0);
  b.norm = norm;
  if (norm) {
    b.gamma = make_param<T>({out_ch}, name + ".gamma", nullptr, 0.0);
    for (auto& x : b.gamma->val) x = T(1);
    b.beta = make_param<T>({out_ch}, name + ".beta", nullptr, 0.0);
  }
  return b;
}

template <class T>
void collect(const detail::ConvBlock<T>& b, std::vector<nn::Var<T>>& out) {
  out.push_back(b.w);
  out.push_back(b.b);
  if (b.norm) {
    out.push_back(b.gamma);
    out.push_back(b.beta);
  }
}

template <class T>
void set_block_trainable(detail::ConvBlock<T>& b, bool on) {
  b.w->set_requires_grad(on);
  b.b->set_requires_grad(on);
  if (b.norm) {
    b.gamma->set_requires_grad(on);
    b.beta->set_requires_grad(on);
  }
}

void validate_config(const GeneratorConfig& cfg) {
  if (cfg.depth < 2) throw InvalidArgument("generator depth must be >= 2");
  if (cfg.base_channels < 1)
    throw InvalidArgument("generator base_channels must be >= 1");
  if (cfg.input_size < 16 || cfg.input_size % 16 != 0)
    throw InvalidArgument("generator input_size must be a multiple of 16");
  if (cfg.input_size % (1 << cfg.depth) != 0)
    throw InvalidArgument("generator input_size must divide by 2^depth");
}

}  // namespace

// ---------------------------------------------------------------------------
// Generator

template <class T>
UnetGenerator<T>::UnetGenerator(const GeneratorConfig& cfg, Rng& rng)
    : cfg_(cfg) {
  validate_config(cfg);

  int in_ch = 1;
  for (int i = 0; i < cfg.depth; ++i) {
    int out_ch = stage_channels(cfg.base_channels, i);
    int spatial_out = cfg.input_size >> (i + 1);
    // No norm on the raw-input stage; none either when the stage output
    // is a single pixel (its variance is identically zero).
    bool norm = i > 0 && spatial_out > 1;
    enc_.push_back(make_block<T>(in_ch, out_ch, norm,
                                 "g.enc" + std::to_string(i), rng, false));
    in_ch = out_ch;
  }

  for (int j = 0; j < cfg.depth; ++j) {
    int in_c = j == 0 ? stage_channels(cfg.base_channels, cfg.depth - 1)
                      : 2 * stage_channels(cfg.base_channels, cfg.depth - 1 - j);
    bool last = j == cfg.depth - 1;
    int out_c = last ? 1 : stage_channels(cfg.base_channels, cfg.depth - 2 - j);
    dec_.push_back(make_block<T>(in_c, out_c, !last,
                                 "g.dec" + std::to_string(j), rng, true));
  }
}

template <class T>
nn::Var<T> UnetGenerator<T>::forward(const nn::Var<T>& spec) const {
  nn::expect_rank(spec, 4, "UnetGenerator::forward");
  if (spec->shape[1] != 1 || spec->shape[2] != cfg_.input_size ||
      spec->shape[3] != cfg_.input_size)
    throw InvalidArgument("UnetGenerator::forward: expected [N, 1, S, S] with S = " +
                          std::to_string(cfg_.input_size));

  std::vector<nn::Var<T>> acts;
  nn::Var<T> h = spec;
  for (int i = 0; i < cfg_.depth; ++i) {
    const auto& blk = enc_[i];
    h = nn::conv2d(h, blk.w, blk.b, 2, 1);
    if (blk.norm) h = nn::instance_norm(h, blk.gamma, blk.beta);
    h = nn::leaky_relu(h, T(0.2));
    acts.push_back(h);
  }

  for (int j = 0; j < cfg_.depth; ++j) {
    const auto& blk = dec_[j];
    h = nn::conv2d_transpose(h, blk.w, blk.b, 2, 1);
    if (j == cfg_.depth - 1) {
      h = nn::sigmoid(h);
    } else {
      if (blk.norm) h = nn::instance_norm(h, blk.gamma, blk.beta);
      h = nn::relu(h);
      h = nn::concat_channels(h, acts[cfg_.depth - 2 - j]);
    }
  }
  return h;
}

template <class T>
std::vector<nn::Var<T>> UnetGenerator<T>::parameters() const {
  std::vector<nn::Var<T>> out;
  for (const auto& b : enc_) collect(b, out);
  for (const auto& b : dec_) collect(b, out);
  return out;
}

template <class T>
void UnetGenerator<T>::set_trainable(bool on) {
  for (auto& b : enc_) set_block_trainable(b, on);
  for (auto& b : dec_) set_block_trainable(b, on);
}

// ---------------------------------------------------------------------------
// Discriminator

template <class T>
PatchDiscriminator<T>::PatchDiscriminator(int base_channels, int input_size,
                                          Rng& rng)
    : base_(base_channels), input_size_(input_size) {
  if (base_channels < 1)
    throw InvalidArgument("discriminator base_channels must be >= 1");
  if (input_size < 16 || input_size % 16 != 0)
    throw InvalidArgument("discriminator input_size must be a multiple of 16");

  int in_ch = 2;
  for (int i = 0; i < 4; ++i) {
    int out_ch = stage_channels(base_channels, i);
    blocks_.push_back(make_block<T>(in_ch, out_ch, i > 0,
                                    "d.block" + std::to_string(i), rng, false));
    in_ch = out_ch;
  }
  head_ = make_block<T>(in_ch, 1, false, "d.head", rng, false, 3);
}

template <class T>
nn::Var<T> PatchDiscriminator<T>::forward(const nn::Var<T>& spec,
                                          const nn::Var<T>& map) const {
  nn::expect_rank(spec, 4, "PatchDiscriminator::forward");
  nn::expect_same_shape(spec, map, "PatchDiscriminator::forward");
  if (spec->shape[1] != 1 || spec->shape[2] != input_size_ ||
      spec->shape[3] != input_size_)
    throw InvalidArgument("PatchDiscriminator::forward: expected [N, 1, S, S]");

  nn::Var<T> h = nn::concat_channels(spec, map);
  for (const auto& blk : blocks_) {
    h = nn::conv2d(h, blk.w, blk.b, 2, 1);
    if (blk.norm) h = nn::instance_norm(h, blk.gamma, blk.beta);
    h = nn::leaky_relu(h, T(0.2));
  }
  return nn::conv2d(h, head_.w, head_.b, 1, 1);
}

template <class T>
std::vector<nn::Var<T>> PatchDiscriminator<T>::parameters() const {
  std::vector<nn::Var<T>> out;
  for (const auto& b : blocks_) collect(b, out);
  collect(head_, out);
  return out;
}

template <class T>
void PatchDiscriminator<T>::set_trainable(bool on) {
  for (auto& b : blocks_) set_block_trainable(b, on);
  set_block_trainable(head_, on);
}

// ---------------------------------------------------------------------------
// Losses

template <class T>
GeneratorLoss<T> generator_loss(const PatchDiscriminator<T>& d,
                                const nn::Var<T>& spec, const nn::Var<T>& fake,
                                const nn::Var<T>& real_map,
                                const LossWeights& w) {
  GeneratorLoss<T> out;
  auto l1 = nn::l1_loss(fake, real_map);
  auto adv = nn::mse_to_scalar(d.forward(spec, fake), T(1));
  auto tv = nn::tv_loss(fake);
  out.l1 = double(l1->val[0]);
  out.adv = double(adv->val[0]);
  out.tv = double(tv->val[0]);
  out.total = nn::add(nn::add(nn::scale(l1, T(w.lambda_l1)),
                              nn::scale(adv, T(w.lambda_adv))),
                      nn::scale(tv, T(w.lambda_tv)));
  return out;
}

template <class T>
nn::Var<T> discriminator_loss(const PatchDiscriminator<T>& d,
                              const nn::Var<T>& spec,
                              const nn::Var<T>& fake_detached,
                              const nn::Var<T>& real_map) {
  auto on_fake = nn::mse_to_scalar(d.forward(spec, fake_detached), T(0));
  auto on_real = nn::mse_to_scalar(d.forward(spec, real_map), T(1));
  return nn::add(on_fake, on_real);
}

template class UnetGenerator<float>;
template class UnetGenerator<double>;
template class PatchDiscriminator<float>;
template class PatchDiscriminator<double>;
template GeneratorLoss<float> generator_loss(const PatchDiscriminator<float>&,
                                             const nn::Var<float>&,
                                             const nn::Var<float>&,
                                             const nn::Var<float>&,
                                             const LossWeights&);
template GeneratorLoss<double> generator_loss(const PatchDiscriminator<double>&,
                                              const nn::Var<double>&,
                                              const nn::Var<double>&,
                                              const nn::Var<double>&,
                                              const LossWeights&);
template nn::Var<float> discriminator_loss(const PatchDiscriminator<float>&,
                                           const nn::Var<float>&,
                                           const nn::Var<float>&,
                                           const nn::Var<float>&);
template nn::Var<double> discriminator_loss(const PatchDiscriminator<double>&,
                                            const nn::Var<double>&,
                                            const nn::Var<double>&,
                                            const nn::Var<double>&);

// ---------------------------------------------------------------------------
// Kernel-map conversions

GrayImage target_kernel_map(const Kernel& k, int map_size) {
  if (map_size < k.height)
    throw InvalidArgument("target_kernel_map: map smaller than kernel");
  GrayImage map = resize_bilinear(k, map_size, map_size);
  double mx = *std::max_element(map.data.begin(), map.data.end());
  if (mx <= 0.0) throw InvalidArgument("target_kernel_map: empty kernel");
  for (double& v : map.data) v /= mx;
  return map;
}

Kernel extract_kernel(const GrayImage& map, int native_size) {
  if (native_size < 3 || native_size % 2 == 0)
    throw InvalidArgument("extract_kernel: native size must be odd and >= 3");
  Kernel k = resize_bilinear(map, native_size, native_size);
  double sum = 0.0;
  for (double& v : k.data) {
    v = std::max(v, 0.0);
    sum += v;
  }
  if (sum <= 1e-12)
    throw EstimationError("extract_kernel: kernel map carries no mass");
  for (double& v : k.data) v /= sum;
  return k;
}

Kernel estimate_kernel(const UnetGenerator<float>& gen, const GrayImage& lr,
                       int native_size) {
  int s = gen.config().input_size;
  Spectrum spec = prepare_net_input(lr, s);

  auto input = nn::make_var<float>({1, 1, s, s});
  for (std::size_t i = 0; i < spec.size(); ++i)
    input->val[i] = float(spec.data[i]);

  auto map_var = gen.forward(input);
  GrayImage map(s, s);
  for (std::size_t i = 0; i < map.size(); ++i)
    map.data[i] = double(map_var->val[i]);
  return extract_kernel(map, native_size);
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

void append_params(const std::vector<nn::Var<float>>& params,
                   std::vector<NamedTensor>& out) {
  for (const auto& p : params) {
    NamedTensor t;
    t.name = p->name;
    for (int d : p->shape) t.dims.push_back(std::uint32_t(d));
    t.values.assign(p->val.begin(), p->val.end());
    out.push_back(std::move(t));
  }
}

void restore_params(const std::vector<NamedTensor>& tensors,
                    const std::vector<nn::Var<float>>& params,
                    const std::string& path) {
  for (const auto& p : params) {
    const NamedTensor& t = find_tensor(tensors, p->name);
    if (t.count() != p->count())
      throw FormatError(path + ": size mismatch for tensor " + p->name);
    std::copy(t.values.begin(), t.values.end(), p->val.begin());
  }
}

}  // namespace

void save_checkpoint(const std::string& path, const UnetGenerator<float>& gen,
                     const PatchDiscriminator<float>* disc,
                     const CheckpointMeta& meta) {
  std::vector<NamedTensor> tensors;
  NamedTensor m;
  m.name = "meta";
  m.dims = {6};
  m.values = {1.0f,  // format version
              float(gen.config().depth), float(gen.config().base_channels),
              float(gen.config().input_size), float(meta.native_size),
              float(disc ? disc->base_channels() : 0)};
  tensors.push_back(std::move(m));
  append_params(gen.parameters(), tensors);
  if (disc) append_params(disc->parameters(), tensors);
  write_tensor_file(path, tensors);
}

LoadedModel load_checkpoint(const std::string& path) {
  auto tensors = read_tensor_file(path);
  const NamedTensor& m = find_tensor(tensors, "meta");
  if (m.values.size() != 6 || m.values[0] != 1.0f)
    throw FormatError(path + ": unsupported checkpoint format");

  LoadedModel out;
  out.meta.gen.depth = int(m.values[1]);
  out.meta.gen.base_channels = int(m.values[2]);
  out.meta.gen.input_size = int(m.values[3]);
  out.meta.native_size = int(m.values[4]);
  out.meta.disc_base = int(m.values[5]);

  Rng scratch(0);
  out.gen = std::make_shared<UnetGenerator<float>>(out.meta.gen, scratch);
  restore_params(tensors, out.gen->parameters(), path);
  if (out.meta.disc_base > 0) {
    out.disc = std::make_shared<PatchDiscriminator<float>>(
        out.meta.disc_base, out.meta.gen.input_size, scratch);
    restore_params(tensors, out.disc->parameters(), path);
  }
  return out;
}

}  // namespace s2k
