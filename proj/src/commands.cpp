#include "s2k/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <vector>

#include "s2k/baseline.hpp"
#include "s2k/dataset.hpp"
#include "s2k/degrade.hpp"
#include "s2k/errors.hpp"
#include "s2k/image.hpp"
#include "s2k/metrics.hpp"
#include "s2k/model.hpp"
#include "s2k/restore.hpp"
#include "s2k/spectral.hpp"
#include "s2k/synthetic.hpp"
#include "s2k/tensor_file.hpp"
#include "s2k/theory.hpp"
#include "s2k/train.hpp"

namespace fs = std::filesystem;

namespace s2k {

namespace {

// ---------------------------------------------------------------------------
// Option bundles

struct GenHrArgs {
  std::string out;
  int count = 20;
  int size = 256;
  std::uint64_t seed = 1;
  double min_lum = 0.05;
};

struct SynthArgs {
  std::string hr_dir, out;
  int count = 100;
  std::string family = "gaussian";
  int scale = 2;
  int spec_size = 64;
  std::string boundary = "circular";
  std::string order = "downsample-first";
  double noise_sigma = 0.0;
  std::uint64_t seed = 1;
  int jobs = 1;
};

struct VerifyArgs {
  std::string dataset, out;
  double tau = 1e-3;
  std::string norm = "peak1";
  std::string boundary = "circular";
  std::string order = "downsample-first";
};

struct TrainArgs {
  std::string dataset, out, val_dataset;
  std::string arch = "unet-5-32";
  int epochs = 20;
  int batch = 8;
  std::uint64_t seed = 1;
  double lr = 0.001, beta1 = 0.5, beta2 = 0.999;
  std::vector<double> loss_weights = {100.0, 1.0, 1.0};
  int disc_base = 32;
  int native_size = 0;  // 0 = take it from the dataset
  int checkpoint_every = 0;
};

struct EstimateArgs {
  std::string ckpt, input, out;
  std::string baseline;  // "spectral" to bypass the network
  std::string prior = "one-over-r";
  int native_size = 0;  // 0 = checkpoint / config default
};

struct EvaluateArgs {
  std::string dataset, ckpt, out;
  std::string baseline;  // "spectral" to bypass the network
  std::string prior = "one-over-r";
  int scale = 0;  // 0 = accept the dataset's scale
  double nsr = 1e-3;
};

bool use_baseline(const std::string& b) {
  if (b.empty()) return false;
  if (b == "spectral") return true;
  throw InvalidArgument("unknown baseline estimator: " + b);
}

Boundary parse_boundary(const std::string& s) {
  if (s == "circular") return Boundary::circular;
  if (s == "replicate") return Boundary::replicate;
  throw InvalidArgument("unknown boundary: " + s);
}

DegradeOrder parse_order(const std::string& s) {
  if (s == "downsample-first") return DegradeOrder::downsample_then_convolve;
  if (s == "convolve-first") return DegradeOrder::convolve_then_downsample;
  throw InvalidArgument("unknown degradation order: " + s);
}

GeneratorConfig parse_arch(const std::string& arch, int input_size) {
  int depth = 0, base = 0;
  if (std::sscanf(arch.c_str(), "unet-%d-%d", &depth, &base) != 2)
    throw InvalidArgument("bad --arch, expected unet-<depth>-<base>: " + arch);
  GeneratorConfig cfg;
  cfg.depth = depth;
  cfg.base_channels = base;
  cfg.input_size = input_size;
  return cfg;
}

void write_kernel_file(const std::string& path, const Kernel& k) {
  NamedTensor t;
  t.name = "kernel";
  t.dims = {std::uint32_t(k.height), std::uint32_t(k.width)};
  t.values.assign(k.data.begin(), k.data.end());
  write_tensor_file(path, {t});
}

// ---------------------------------------------------------------------------
// Command bodies

int cmd_gen_hr(const GenHrArgs& a) {
  fs::create_directories(a.out);
  TextureConfig tc;
  tc.size = a.size;
  tc.min_lum = a.min_lum;
  Rng base(a.seed);
  for (int i = 0; i < a.count; ++i) {
    Rng rng = base.fork(std::uint64_t(i));
    GrayImage img = make_texture(tc, rng);
    char name[64];
    std::snprintf(name, sizeof(name), "hr_%04d.png", i);
    save_image(img, (fs::path(a.out) / name).string());
  }
  std::cout << "wrote " << a.count << " images to " << a.out << "\n";
  return 0;
}

int cmd_synth(const SynthArgs& a) {
  SynthConfig cfg;
  cfg.hr_dir = a.hr_dir;
  cfg.out_dir = a.out;
  cfg.count = a.count;
  cfg.family = a.family;
  cfg.spec_size = a.spec_size;
  cfg.degrade.scale = a.scale;
  cfg.degrade.boundary = parse_boundary(a.boundary);
  cfg.degrade.order = parse_order(a.order);
  cfg.degrade.noise_sigma = a.noise_sigma;
  cfg.seed = a.seed;
  cfg.jobs = a.jobs;
  synth_dataset(cfg);
  std::cout << "wrote " << a.count << " samples to " << a.out << "\n";
  return 0;
}

int cmd_verify_theory(const VerifyArgs& a) {
  Dataset data = load_dataset(a.dataset);
  ShapeConfig shape;
  shape.tau = a.tau;
  if (a.norm == "peak1")
    shape.norm = ShapeConfig::Norm::peak1;
  else if (a.norm == "energy1")
    shape.norm = ShapeConfig::Norm::energy1;
  else
    throw InvalidArgument("unknown norm: " + a.norm);

  DegradationConfig dc;
  dc.boundary = parse_boundary(a.boundary);
  dc.order = parse_order(a.order);

  std::ofstream csv(a.out);
  if (!csv) throw DataError("cannot write " + a.out);
  csv << "id,family,phi_freq,phi_spatial,ratio,bound_freq,bound_spatial,"
         "profile_spatial,profile_freq\n";

  int wins = 0, upper_violations = 0, lower_violations = 0;
  std::vector<double> ratios;
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const Sample& s = data.samples[i];
    dc.scale = s.scale;
    AdvantageReport rep = frequency_advantage(s.hr, s.kernel, dc, shape);
    ProfileDistance prof = profile_distance(s.lr, s.kernel);

    if (rep.phi_freq < rep.phi_spatial) ++wins;
    if (rep.phi_freq > rep.bound_freq) ++upper_violations;
    if (rep.phi_spatial < rep.bound_spatial) ++lower_violations;
    ratios.push_back(rep.ratio);

    char row[256];
    std::snprintf(row, sizeof(row), "%zu,%s,%zu,%zu,%.8g,%zu,%zu,%.8g,%.8g\n",
                  i, to_string(s.family).c_str(), rep.phi_freq,
                  rep.phi_spatial, rep.ratio, rep.bound_freq,
                  rep.bound_spatial, prof.spatial, prof.frequency);
    csv << row;
  }

  std::sort(ratios.begin(), ratios.end());
  double median = ratios.empty() ? 0.0
                  : ratios.size() % 2
                      ? ratios[ratios.size() / 2]
                      : 0.5 * (ratios[ratios.size() / 2 - 1] +
                               ratios[ratios.size() / 2]);
  std::printf("pairs: %zu\n", data.samples.size());
  std::printf("frequency wins: %d (%.1f%%)\n", wins,
              100.0 * wins / double(data.samples.size()));
  std::printf("median ratio: %.4f\n", median);
  std::printf("bound violations: upper %d, lower %d\n", upper_violations,
              lower_violations);
  return 0;
}

int cmd_train(const TrainArgs& a) {
  if (a.loss_weights.size() != 3)
    throw InvalidArgument("--loss-weights expects three values: l1,adv,tv");
  Dataset data = load_dataset(a.dataset);
  std::optional<Dataset> val;
  if (!a.val_dataset.empty()) val = load_dataset(a.val_dataset);

  TrainConfig cfg;
  cfg.gen = parse_arch(a.arch, data.spec_size);
  cfg.disc_base = a.disc_base;
  cfg.weights = {a.loss_weights[0], a.loss_weights[1], a.loss_weights[2]};
  cfg.adam_g.lr = float(a.lr);
  cfg.adam_g.beta1 = float(a.beta1);
  cfg.adam_g.beta2 = float(a.beta2);
  cfg.adam_d = cfg.adam_g;
  cfg.epochs = a.epochs;
  cfg.batch_size = a.batch;
  cfg.seed = a.seed;
  cfg.native_size =
      a.native_size > 0 ? a.native_size : data.samples.front().kernel.height;
  cfg.checkpoint_every = a.checkpoint_every;
  cfg.out_dir = a.out;

  train(data, val ? &*val : nullptr, cfg, [](const EpochStats& st) {
    std::printf(
        "epoch %3d  step %5ld  l1 %.4f  adv %.4f  tv %.4f  d %.4f  val_dv %.6f\n",
        st.epoch, st.step, st.l1, st.adv, st.tv, st.d_loss, st.val_dv);
    std::fflush(stdout);
  });
  std::cout << "model written to " << (fs::path(a.out) / "model.s2k1").string()
            << "\n";
  return 0;
}

int cmd_estimate(const EstimateArgs& a) {
  bool spectral = use_baseline(a.baseline);
  if (spectral == !a.ckpt.empty())
    throw InvalidArgument(
        "estimate: pass exactly one of --ckpt or --baseline spectral");

  std::vector<std::string> inputs;
  if (fs::is_directory(a.input)) {
    for (const auto& e : fs::directory_iterator(a.input)) {
      auto ext = e.path().extension();
      if (e.is_regular_file() && (ext == ".png" || ext == ".s2k1"))
        inputs.push_back(e.path().string());
    }
    std::sort(inputs.begin(), inputs.end());
    if (inputs.empty()) throw DataError("estimate: no inputs in " + a.input);
  } else if (fs::exists(a.input)) {
    inputs.push_back(a.input);
  } else {
    throw DataError("estimate: no such input: " + a.input);
  }
  fs::create_directories(a.out);

  LoadedModel model;
  if (!spectral) model = load_checkpoint(a.ckpt);

  BaselineConfig bc;
  bc.prior = a.prior == "flat" ? BaselineConfig::Prior::flat
                               : BaselineConfig::Prior::one_over_r;
  if (a.native_size > 0)
    bc.kernel_size = a.native_size;

  for (const auto& in : inputs) {
    GrayImage lr = load_image(in);
    Kernel k;
    if (spectral) {
      k = estimate_gaussian_spectral(lr, bc).kernel;
    } else {
      int native = a.native_size > 0 ? a.native_size : model.meta.native_size;
      k = estimate_kernel(*model.gen, lr, native);
    }
    std::string stem = fs::path(in).stem().string();
    std::string kpath = (fs::path(a.out) / (stem + ".kernel.s2k1")).string();
    write_kernel_file(kpath, k);

    // Peak-normalized preview for quick visual checks.
    GrayImage viz = k;
    double mx = *std::max_element(viz.data.begin(), viz.data.end());
    if (mx > 0.0)
      for (double& v : viz.data) v /= mx;
    save_image(viz, (fs::path(a.out) / (stem + ".kernel.png")).string());
    std::cout << in << " -> " << kpath << "\n";
  }
  return 0;
}

int cmd_evaluate(const EvaluateArgs& a) {
  bool spectral = use_baseline(a.baseline);
  if (spectral == !a.ckpt.empty())
    throw InvalidArgument(
        "evaluate: pass exactly one of --ckpt or --baseline spectral");
  Dataset data = load_dataset(a.dataset);
  if (a.scale > 0 && a.scale != data.scale)
    throw DataError("--scale does not match the dataset scale");

  LoadedModel model;
  if (!spectral) model = load_checkpoint(a.ckpt);
  BaselineConfig bc;
  bc.prior = a.prior == "flat" ? BaselineConfig::Prior::flat
                               : BaselineConfig::Prior::one_over_r;

  std::ofstream csv(a.out);
  if (!csv) throw DataError("cannot write " + a.out);
  csv << "id,family,est_source,dv_est,ds_est,dv_fixed,dv_gt,psnr_est,"
         "psnr_fixed,psnr_gt,psnr_bicubic,ssim_est,ssim_fixed,ssim_gt\n";

  int wins = 0, gt_ok = 0;
  double margin_sum = 0.0;
  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    const Sample& s = data.samples[i];
    int native = s.kernel.height;

    // The fixed comparison kernel approximates plain bicubic upsampling:
    // an isotropic Gaussian with sigma = 0.5 * scale.
    GaussianParams fp;
    fp.sigma_x = fp.sigma_y = 0.5 * s.scale;
    fp.size = native;
    Kernel fixed = gaussian_kernel(fp);

    const char* est_source = spectral ? "baseline" : "model";
    Kernel est;
    if (spectral) {
      bc.kernel_size = native;
      try {
        est = estimate_gaussian_spectral(s.lr, bc).kernel;
      } catch (const EstimationError&) {
        est = fixed;  // out-of-model input: fall back to the fixed kernel
        est_source = "fallback";
      }
    } else {
      est = estimate_kernel(*model.gen, s.lr, native);
    }

    GrayImage sr_est = blind_sr(s.lr, est, s.scale, a.nsr);
    GrayImage sr_fixed = blind_sr(s.lr, fixed, s.scale, a.nsr);
    GrayImage sr_gt = blind_sr(s.lr, s.kernel, s.scale, a.nsr);
    GrayImage up = resize_bicubic(s.lr, s.hr.height, s.hr.width);

    double p_est = psnr(s.hr, sr_est), p_fixed = psnr(s.hr, sr_fixed);
    double p_gt = psnr(s.hr, sr_gt), p_up = psnr(s.hr, up);
    if (p_est > p_fixed) ++wins;
    if (p_gt >= p_est && p_gt >= p_fixed) ++gt_ok;
    margin_sum += p_est - p_fixed;

    char row[384];
    std::snprintf(
        row, sizeof(row),
        "%zu,%s,%s,%.8g,%.8g,%.8g,%.8g,%.4f,%.4f,%.4f,%.4f,%.6f,%.6f,%.6f\n",
        i, to_string(s.family).c_str(), est_source, dv(s.kernel, est),
        ds(s.kernel, est), dv(s.kernel, fixed), dv(s.kernel, s.kernel), p_est,
        p_fixed, p_gt, p_up, ssim(s.hr, sr_est), ssim(s.hr, sr_fixed),
        ssim(s.hr, sr_gt));
    csv << row;
  }

  std::size_t n = data.samples.size();
  std::printf("samples: %zu\n", n);
  std::printf("estimated beats fixed: %d (%.1f%%)\n", wins,
              100.0 * wins / double(n));
  std::printf("mean psnr margin (est - fixed): %.4f dB\n",
              margin_sum / double(n));
  std::printf("gt kernel upper-bounds both: %d (%.1f%%)\n", gt_ok,
              100.0 * gt_ok / double(n));
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"s2k: blur-kernel estimation from amplitude spectra"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from a key=value file");

  GenHrArgs gh;
  auto* gen_hr = app.add_subcommand(
      "gen-hr", "generate procedural high-resolution test scenes");
  gen_hr->add_option("--out", gh.out, "output directory")->required();
  gen_hr->add_option("--count", gh.count, "number of images");
  gen_hr->add_option("--size", gh.size, "image side length");
  gen_hr->add_option("--seed", gh.seed, "rng seed");
  gen_hr->add_option("--min-lum", gh.min_lum, "luminance floor");

  SynthArgs sy;
  auto* synth = app.add_subcommand(
      "synth", "synthesize a degraded dataset from HR images");
  synth->add_option("--hr-dir", sy.hr_dir, "directory of HR PNGs")->required();
  synth->add_option("--out", sy.out, "output dataset directory")->required();
  synth->add_option("--count", sy.count, "number of samples");
  synth->add_option("--family", sy.family,
                    "kernel family: gaussian|motion|disk|mixed");
  synth->add_option("--scale", sy.scale, "downsampling factor");
  synth->add_option("--spec-size", sy.spec_size, "spectrum raster size");
  synth->add_option("--boundary", sy.boundary, "circular|replicate");
  synth->add_option("--order", sy.order, "downsample-first|convolve-first");
  synth->add_option("--noise-sigma", sy.noise_sigma, "additive noise std");
  synth->add_option("--seed", sy.seed, "rng seed");
  synth->add_option("--jobs", sy.jobs, "worker threads");

  VerifyArgs vf;
  auto* verify = app.add_subcommand(
      "verify-theory", "frequency-vs-spatial sparsity comparison over a dataset");
  verify->add_option("--dataset", vf.dataset, "dataset directory")->required();
  verify->add_option("--out", vf.out, "report CSV path")->required();
  verify->add_option("--tau", vf.tau, "truncation threshold");
  verify->add_option("--norm", vf.norm, "peak1|energy1");
  verify->add_option("--boundary", vf.boundary, "circular|replicate");
  verify->add_option("--order", vf.order, "downsample-first|convolve-first");

  TrainArgs tr;
  auto* train_cmd =
      app.add_subcommand("train", "train the spectrum-to-kernel generator");
  train_cmd->add_option("--dataset", tr.dataset, "training dataset")->required();
  train_cmd->add_option("--out", tr.out, "output directory")->required();
  train_cmd->add_option("--val-dataset", tr.val_dataset, "validation dataset");
  train_cmd->add_option("--arch", tr.arch, "generator arch, unet-<depth>-<base>");
  train_cmd->add_option("--epochs", tr.epochs, "training epochs");
  train_cmd->add_option("--batch", tr.batch, "batch size");
  train_cmd->add_option("--seed", tr.seed, "rng seed");
  train_cmd->add_option("--lr", tr.lr, "adam learning rate");
  train_cmd->add_option("--beta1", tr.beta1, "adam beta1");
  train_cmd->add_option("--beta2", tr.beta2, "adam beta2");
  train_cmd->add_option("--loss-weights", tr.loss_weights,
                        "comma-separated l1,adv,tv weights")
      ->delimiter(',')
      ->expected(3);
  train_cmd->add_option("--disc-base", tr.disc_base,
                        "discriminator base channels");
  train_cmd->add_option("--native-size", tr.native_size,
                        "kernel grid for validation (0 = from dataset)");
  train_cmd->add_option("--checkpoint-every", tr.checkpoint_every,
                        "epochs between snapshots (0 = final only)");

  EstimateArgs es;
  auto* estimate =
      app.add_subcommand("estimate", "estimate kernels for degraded images");
  estimate->add_option("--ckpt", es.ckpt, "trained checkpoint");
  estimate->add_option("--baseline", es.baseline,
                       "'spectral' = moment baseline instead of a model");
  estimate->add_option("--prior", es.prior, "baseline prior: flat|one-over-r");
  estimate->add_option("--input", es.input, "image file or directory")
      ->required();
  estimate->add_option("--out", es.out, "output directory")->required();
  estimate->add_option("--native-size", es.native_size,
                       "kernel grid (0 = checkpoint default)");

  EvaluateArgs ev;
  auto* evaluate = app.add_subcommand(
      "evaluate", "restoration metrics for a dataset and estimator");
  evaluate->add_option("--dataset", ev.dataset, "dataset directory")
      ->required();
  evaluate->add_option("--ckpt", ev.ckpt, "trained checkpoint");
  evaluate->add_option("--baseline", ev.baseline,
                       "'spectral' = moment baseline instead of a model");
  evaluate->add_option("--prior", ev.prior, "baseline prior: flat|one-over-r");
  evaluate->add_option("--scale", ev.scale,
                       "expected dataset scale (0 = accept any)");
  evaluate->add_option("--nsr", ev.nsr, "wiener noise-to-signal ratio");
  evaluate->add_option("--out", ev.out, "results CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*gen_hr) return cmd_gen_hr(gh);
    if (*synth) return cmd_synth(sy);
    if (*verify) return cmd_verify_theory(vf);
    if (*train_cmd) return cmd_train(tr);
    if (*estimate) return cmd_estimate(es);
    if (*evaluate) return cmd_evaluate(ev);
  } catch (const InvalidArgument& e) {
    // Contradictory or out-of-range flag values are usage errors, not
    // data errors.
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}

}  // namespace s2k
