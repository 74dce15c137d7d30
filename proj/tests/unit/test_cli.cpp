#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "s2k/degrade.hpp"
#include "s2k/image.hpp"
#include "s2k/kernels.hpp"
#include "s2k/rng.hpp"

using namespace s2k;
namespace fs = std::filesystem;

namespace {

// The binary location is baked in at compile time by the build.
const char* cli_path() { return S2K_CLI_PATH; }

int run(const std::string& args) {
  std::string cmd = std::string(cli_path()) + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

fs::path temp_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("s2k_test_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), {});
}

int count_rows(const fs::path& csv) {
  std::ifstream in(csv);
  REQUIRE(in.good());
  std::string line;
  int rows = -1;  // don't count the header
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  return rows;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("running without a command is a usage error") {
    CHECK(run("") == 2);
    CHECK(run("no-such-command") == 2);
    CHECK(run("synth") == 2);  // missing required options
  }

  TEST_CASE("gen-hr writes the requested number of textures") {
    auto out = temp_dir("genhr");
    CHECK(run("gen-hr --out " + out.string() +
              " --count 2 --size 96 --seed 3") == 0);
    CHECK(fs::exists(out / "hr_0000.png"));
    CHECK(fs::exists(out / "hr_0001.png"));
    CHECK(!fs::exists(out / "hr_0002.png"));
    auto img = load_image((out / "hr_0000.png").string());
    CHECK(img.height == 96);
    fs::remove_all(out);
  }

  TEST_CASE("synth is reproducible and honors --count") {
    auto hr = temp_dir("synth_hr");
    REQUIRE(run("gen-hr --out " + hr.string() +
                " --count 2 --size 96 --seed 4") == 0);

    auto out_a = temp_dir("synth_a");
    auto out_b = temp_dir("synth_b");
    std::string common = " --hr-dir " + hr.string() +
                         " --count 3 --family gaussian --scale 2"
                         " --spec-size 32 --seed 5";
    CHECK(run("synth --out " + out_a.string() + common) == 0);
    CHECK(run("synth --out " + out_b.string() + common) == 0);
    CHECK(count_rows(out_a / "manifest.csv") == 3);
    CHECK(read_file(out_a / "manifest.csv") ==
          read_file(out_b / "manifest.csv"));
    CHECK(read_file(out_a / "sample_00002.s2k1") ==
          read_file(out_b / "sample_00002.s2k1"));

    fs::remove_all(hr);
    fs::remove_all(out_a);
    fs::remove_all(out_b);
  }

  TEST_CASE("verify-theory writes the per-pair table") {
    auto hr = temp_dir("verify_hr");
    REQUIRE(run("gen-hr --out " + hr.string() +
                " --count 1 --size 96 --seed 6") == 0);
    auto data = temp_dir("verify_data");
    REQUIRE(run("synth --hr-dir " + hr.string() + " --out " + data.string() +
                " --count 2 --family gaussian --scale 2 --spec-size 32"
                " --seed 7") == 0);

    auto csv = temp_dir("verify_out") / "report.csv";
    CHECK(run("verify-theory --dataset " + data.string() + " --out " +
              csv.string()) == 0);
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "id,family,phi_freq,phi_spatial,ratio,bound_freq,bound_spatial,"
          "profile_spatial,profile_freq");
    CHECK(count_rows(csv) == 2);

    fs::remove_all(hr);
    fs::remove_all(data);
    fs::remove_all(csv.parent_path());
  }

  TEST_CASE("estimate with the spectral baseline emits kernel files") {
    auto dir = temp_dir("estimate");
    // A blurred white-noise frame the moment fit can invert reliably.
    Rng rng(8);
    GrayImage carrier(128, 128);
    for (auto& v : carrier.data) v = rng.uniform();
    auto k = gaussian_kernel({2.0, 2.0, 0.0, 15});
    auto blurred = convolve2d(carrier, k, Boundary::circular);
    save_image(blurred, (dir / "blurred.png").string());

    auto out = dir / "kernels";
    CHECK(run("estimate --input " + (dir / "blurred.png").string() +
              " --baseline spectral --prior flat --out " + out.string()) == 0);
    CHECK(fs::exists(out / "blurred.kernel.s2k1"));
    CHECK(fs::exists(out / "blurred.kernel.png"));

    // Directory input: one kernel pair per image.
    auto in2 = dir / "batch";
    fs::create_directories(in2);
    fs::copy_file(dir / "blurred.png", in2 / "a.png");
    fs::copy_file(dir / "blurred.png", in2 / "b.png");
    auto out2 = dir / "kernels2";
    CHECK(run("estimate --input " + in2.string() +
              " --baseline spectral --prior flat --out " + out2.string()) == 0);
    CHECK(fs::exists(out2 / "a.kernel.s2k1"));
    CHECK(fs::exists(out2 / "b.kernel.png"));

    fs::remove_all(dir);
  }

  TEST_CASE("estimate rejects a model and a baseline together") {
    CHECK(run("estimate --input x.png --ckpt m.s2k1 --baseline spectral"
              " --out y") == 2);
    CHECK(run("estimate --input x.png --out y") == 2);  // neither given
  }

  TEST_CASE("a missing dataset is a data error") {
    CHECK(run("evaluate --dataset /nonexistent_s2k_dataset --baseline spectral"
              " --out /tmp/s2k_eval.csv") == 3);
  }

  TEST_CASE("train on a tiny dataset produces a model and a loss log") {
    auto hr = temp_dir("train_hr");
    REQUIRE(run("gen-hr --out " + hr.string() +
                " --count 1 --size 96 --seed 9") == 0);
    auto data = temp_dir("train_data");
    REQUIRE(run("synth --hr-dir " + hr.string() + " --out " + data.string() +
                " --count 4 --family gaussian --scale 2 --spec-size 32"
                " --seed 10") == 0);

    auto out = temp_dir("train_out");
    CHECK(run("train --dataset " + data.string() + " --out " + out.string() +
              " --arch unet-3-8 --epochs 1 --batch 2 --seed 11") == 0);
    REQUIRE(fs::exists(out / "loss_log.csv"));
    std::ifstream log(out / "loss_log.csv");
    std::string header;
    std::getline(log, header);
    CHECK(header == "epoch,step,l1,adv,tv,d_loss,val_dv");
    CHECK(fs::exists(out / "model.s2k1"));

    fs::remove_all(hr);
    fs::remove_all(data);
    fs::remove_all(out);
  }

  TEST_CASE("options can come from a config file, flags win") {
    auto dir = temp_dir("config");
    std::ofstream cfg(dir / "s2k.ini");
    cfg << "[gen-hr]\n"
        << "count=2\n"
        << "size=96\n"
        << "seed=12\n";
    cfg.close();

    auto out_a = dir / "a";
    CHECK(run("--config " + (dir / "s2k.ini").string() + " gen-hr --out " +
              out_a.string()) == 0);
    CHECK(fs::exists(out_a / "hr_0001.png"));

    auto out_b = dir / "b";
    CHECK(run("--config " + (dir / "s2k.ini").string() + " gen-hr --out " +
              out_b.string() + " --count 1") == 0);
    CHECK(fs::exists(out_b / "hr_0000.png"));
    CHECK(!fs::exists(out_b / "hr_0001.png"));

    fs::remove_all(dir);
  }
}
