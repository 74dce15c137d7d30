#include "s2k/dataset.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "s2k/errors.hpp"
#include "s2k/model.hpp"
#include "s2k/spectral.hpp"
#include "s2k/tensor_file.hpp"

namespace fs = std::filesystem;

namespace s2k {

namespace {

NamedTensor to_tensor(const std::string& name, const GrayImage& img) {
  NamedTensor t;
  t.name = name;
  t.dims = {std::uint32_t(img.height), std::uint32_t(img.width)};
  t.values.assign(img.data.begin(), img.data.end());
  return t;
}

GrayImage from_tensor(const NamedTensor& t, const std::string& context) {
  if (t.dims.size() != 2)
    throw DataError(context + ": tensor '" + t.name + "' is not rank 2");
  GrayImage img(int(t.dims[0]), int(t.dims[1]));
  for (std::size_t i = 0; i < img.size(); ++i)
    img.data[i] = double(t.values[i]);
  return img;
}

// Formats the family parameters exactly; the motion seed is an integer
// and must not round-trip through double.
std::string param_columns(const KernelParams& p) {
  char buf[160];
  if (auto* g = std::get_if<GaussianParams>(&p)) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,0", g->sigma_x,
                  g->sigma_y, g->theta);
  } else if (auto* m = std::get_if<MotionParams>(&p)) {
    std::snprintf(buf, sizeof(buf), "%" PRIu64 ",%.17g,%.17g,%d", m->seed,
                  m->exposure, m->anxiety, m->steps);
  } else {
    auto& d = std::get<DiskParams>(p);
    std::snprintf(buf, sizeof(buf), "%.17g,0,0,0", d.radius);
  }
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

void synth_dataset(const SynthConfig& cfg) {
  if (cfg.count < 1) throw InvalidArgument("synth_dataset: count must be >= 1");
  if (cfg.spec_size < 16)
    throw InvalidArgument("synth_dataset: spec_size must be >= 16");
  if (cfg.jobs < 1) throw InvalidArgument("synth_dataset: jobs must be >= 1");
  bool mixed = cfg.family == "mixed";
  KernelFamily fixed_family = KernelFamily::gaussian;
  if (!mixed) fixed_family = kernel_family_from_string(cfg.family);

  // Collect and preload the HR pool.
  std::vector<std::string> hr_files;
  if (!fs::is_directory(cfg.hr_dir))
    throw DataError("synth_dataset: hr_dir is not a directory: " + cfg.hr_dir);
  for (const auto& e : fs::directory_iterator(cfg.hr_dir))
    if (e.is_regular_file() && e.path().extension() == ".png")
      hr_files.push_back(e.path().string());
  std::sort(hr_files.begin(), hr_files.end());
  if (hr_files.empty())
    throw DataError("synth_dataset: no .png files in " + cfg.hr_dir);

  std::vector<GrayImage> pool;
  pool.reserve(hr_files.size());
  for (const auto& f : hr_files) pool.push_back(load_image(f));

  int crop_size = cfg.degrade.scale * cfg.spec_size;
  for (std::size_t i = 0; i < pool.size(); ++i)
    if (pool[i].height < crop_size || pool[i].width < crop_size)
      throw DataError("synth_dataset: " + hr_files[i] + " is smaller than " +
                      std::to_string(crop_size) + "^2");

  fs::create_directories(cfg.out_dir);
  Rng base(cfg.seed);

  std::vector<std::string> rows(cfg.count);
  auto build_sample = [&](int i) {
    Rng rng = base.fork(std::uint64_t(i));
    const GrayImage& hr_full = pool[rng.uniform_int(int(pool.size()))];

    KernelFamily family = fixed_family;
    if (mixed) family = KernelFamily(rng.uniform_int(3));
    KernelParams params = sample_params(family, rng);
    Kernel kernel = synthesize(params);

    int y0 = rng.uniform_int(hr_full.height - crop_size + 1);
    int x0 = rng.uniform_int(hr_full.width - crop_size + 1);
    GrayImage hr = crop(hr_full, y0, x0, crop_size, crop_size);
    GrayImage lr = degrade(hr, kernel, cfg.degrade, &rng);
    GrayImage spectrum = prepare_net_input(lr, cfg.spec_size);
    GrayImage map = target_kernel_map(kernel, cfg.spec_size);

    char name[64];
    std::snprintf(name, sizeof(name), "sample_%05d.s2k1", i);
    write_tensor_file((fs::path(cfg.out_dir) / name).string(),
                      {to_tensor("hr", hr), to_tensor("lr", lr),
                       to_tensor("kernel", kernel),
                       to_tensor("spectrum", spectrum),
                       to_tensor("target_map", map)});

    std::ostringstream row;
    row << i << ',' << name << ',' << to_string(family) << ','
        << cfg.degrade.scale << ',' << cfg.spec_size << ',' << kernel.height
        << ',' << param_columns(params);
    rows[i] = row.str();
  };

  if (cfg.jobs == 1) {
    for (int i = 0; i < cfg.count; ++i) build_sample(i);
  } else {
    // Static index partition: sample i depends only on fork(i), so the
    // output is identical for any job count.
    std::vector<std::thread> workers;
    std::exception_ptr failure;
    std::mutex failure_mu;
    for (int t = 0; t < cfg.jobs; ++t) {
      workers.emplace_back([&, t]() {
        try {
          for (int i = t; i < cfg.count; i += cfg.jobs) build_sample(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    if (failure) std::rethrow_exception(failure);
  }

  std::ofstream manifest(fs::path(cfg.out_dir) / "manifest.csv");
  if (!manifest) throw DataError("synth_dataset: cannot write manifest");
  manifest << "id,file,family,scale,spec_size,kernel_size,p1,p2,p3,p4\n";
  for (const auto& r : rows) manifest << r << '\n';
}

Dataset load_dataset(const std::string& dir) {
  fs::path manifest_path = fs::path(dir) / "manifest.csv";
  std::ifstream manifest(manifest_path);
  if (!manifest)
    throw DataError("load_dataset: missing manifest: " + manifest_path.string());

  Dataset ds;
  ds.dir = dir;
  std::string line;
  if (!std::getline(manifest, line))
    throw DataError("load_dataset: empty manifest");
  // Header is fixed; a mismatch means the directory is not a dataset.
  if (line.rfind("id,file,family,scale,spec_size,kernel_size", 0) != 0)
    throw DataError("load_dataset: unrecognized manifest header");

  bool first = true;
  while (std::getline(manifest, line)) {
    if (line.empty()) continue;
    auto cells = split_csv(line);
    if (cells.size() < 10)
      throw DataError("load_dataset: malformed manifest row: " + line);

    Sample s;
    s.file = cells[1];
    s.family = kernel_family_from_string(cells[2]);
    s.scale = std::stoi(cells[3]);
    int spec_size = std::stoi(cells[4]);
    for (int i = 0; i < 4; ++i) s.params[i] = std::stod(cells[6 + i]);

    fs::path sample_path = fs::path(dir) / s.file;
    if (!fs::exists(sample_path))
      throw DataError("load_dataset: missing sample file: " +
                      sample_path.string());
    auto tensors = read_tensor_file(sample_path.string());
    s.hr = from_tensor(find_tensor(tensors, "hr"), s.file);
    s.lr = from_tensor(find_tensor(tensors, "lr"), s.file);
    s.kernel = from_tensor(find_tensor(tensors, "kernel"), s.file);
    s.spectrum = from_tensor(find_tensor(tensors, "spectrum"), s.file);
    s.target_map = from_tensor(find_tensor(tensors, "target_map"), s.file);

    if (s.spectrum.height != spec_size || s.target_map.height != spec_size)
      throw DataError("load_dataset: raster sizes disagree with manifest in " +
                      s.file);
    if (first) {
      ds.spec_size = spec_size;
      ds.scale = s.scale;
      first = false;
    } else if (spec_size != ds.spec_size || s.scale != ds.scale) {
      throw DataError("load_dataset: inconsistent spec_size/scale in manifest");
    }
    ds.samples.push_back(std::move(s));
  }
  if (ds.samples.empty()) throw DataError("load_dataset: dataset has no rows");
  return ds;
}

}  // namespace s2k
