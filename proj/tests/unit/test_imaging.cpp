#include <doctest.h>
#include <png.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "s2k/errors.hpp"
#include "s2k/image.hpp"
#include "s2k/rng.hpp"
#include "s2k/tensor_file.hpp"

namespace fs = std::filesystem;
using namespace s2k;

namespace {

fs::path temp_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("s2k_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Writes an 8-bit RGB PNG so the luminance conversion in load_image can
// be exercised; save_image only emits grayscale.
void write_rgb_png(const std::string& path, int h, int w,
                   const std::vector<unsigned char>& rgb) {
  FILE* f = std::fopen(path.c_str(), "wb");
  REQUIRE(f != nullptr);
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  REQUIRE(setjmp(png_jmpbuf(png)) == 0);
  png_init_io(png, f);
  png_set_IHDR(png, info, w, h, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_bytep> rows(h);
  for (int y = 0; y < h; ++y)
    rows[y] = const_cast<png_bytep>(rgb.data() + std::size_t(y) * w * 3);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(f);
}

}  // namespace

TEST_SUITE("rng") {
  TEST_CASE("same seed gives the same stream") {
    Rng a(7), b(7);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  }

  TEST_CASE("forks are decorrelated from the parent and each other") {
    Rng base(1);
    Rng f0 = base.fork(0), f1 = base.fork(1);
    CHECK(f0.next_u64() != f1.next_u64());
    Rng again(1);
    CHECK(again.fork(0).next_u64() == Rng(1).fork(0).next_u64());
  }

  TEST_CASE("uniform stays in [0, 1) and respects bounds") {
    Rng rng(3);
    for (int i = 0; i < 10000; ++i) {
      double u = rng.uniform();
      CHECK(u >= 0.0);
      CHECK(u < 1.0);
      double v = rng.uniform(2.0, 5.0);
      CHECK(v >= 2.0);
      CHECK(v < 5.0);
      int n = rng.uniform_int(7);
      CHECK(n >= 0);
      CHECK(n < 7);
    }
  }

  TEST_CASE("normal moments are sane") {
    Rng rng(11);
    double sum = 0.0, sq = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      double x = rng.normal();
      sum += x;
      sq += x * x;
    }
    double mean = sum / n;
    double var = sq / n - mean * mean;
    CHECK(std::abs(mean) < 0.03);
    CHECK(std::abs(var - 1.0) < 0.05);
  }
}

TEST_SUITE("imaging") {
  TEST_CASE("png round trip is 8-bit exact") {
    fs::path dir = temp_dir("png_rt");
    GrayImage img(16, 16);
    Rng rng(5);
    for (double& v : img.data) v = rng.uniform();
    std::string path = (dir / "a.png").string();
    save_image(img, path);
    GrayImage back = load_image(path);
    REQUIRE(back.height == 16);
    REQUIRE(back.width == 16);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
      double expected = std::round(img.data[i] * 255.0) / 255.0;
      CHECK(back.data[i] == doctest::Approx(expected).epsilon(1e-12));
    }
  }

  TEST_CASE("rgb png decodes through the 0.299/0.587/0.114 luminance") {
    fs::path dir = temp_dir("png_rgb");
    // One white row, one red row.
    std::vector<unsigned char> rgb(2 * 16 * 3, 0);
    for (int x = 0; x < 16; ++x) {
      rgb[x * 3 + 0] = 255;
      rgb[x * 3 + 1] = 255;
      rgb[x * 3 + 2] = 255;
      rgb[(16 + x) * 3 + 0] = 255;
    }
    std::string path = (dir / "rgb.png").string();
    write_rgb_png(path, 2, 16, rgb);
    // load_image requires >= 16x16, so tile the two rows vertically.
    std::vector<unsigned char> big(16 * 16 * 3);
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16 * 3; ++x)
        big[std::size_t(y) * 16 * 3 + x] = rgb[(y % 2) * 16 * 3 + x];
    write_rgb_png(path, 16, 16, big);
    GrayImage img = load_image(path);
    CHECK(img.at(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(img.at(1, 0) == doctest::Approx(0.299).epsilon(1e-9));
  }

  TEST_CASE("load_image rejects tiny images") {
    fs::path dir = temp_dir("png_tiny");
    GrayImage img(15, 15);
    std::string path = (dir / "t.png").string();
    // save_image itself has no minimum, only load does.
    save_image(img, path);
    CHECK_THROWS_AS((void)load_image(path), InvalidArgument);
  }

  TEST_CASE("bilinear identity is bitwise") {
    GrayImage img(5, 7);
    Rng rng(2);
    for (double& v : img.data) v = rng.uniform();
    GrayImage out = resize_bilinear(img, 5, 7);
    CHECK(out.data == img.data);
  }

  TEST_CASE("bilinear keeps constants") {
    GrayImage img(4, 4);
    for (double& v : img.data) v = 0.5;
    GrayImage out = resize_bilinear(img, 9, 13);
    for (double v : out.data) CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
  }

  TEST_CASE("bilinear half-pixel oracle on a 2x2 step") {
    GrayImage img(2, 2);
    img.at(0, 0) = 0.0;
    img.at(0, 1) = 1.0;
    img.at(1, 0) = 0.0;
    img.at(1, 1) = 1.0;
    GrayImage out = resize_bilinear(img, 2, 4);
    // Hand-evaluated half-pixel sample positions with edge clamping.
    const double expected[4] = {0.0, 0.25, 0.75, 1.0};
    for (int y = 0; y < 2; ++y)
      for (int x = 0; x < 4; ++x)
        CHECK(out.at(y, x) == doctest::Approx(expected[x]).epsilon(1e-12));
  }

  TEST_CASE("bicubic downsample: scale 1 is the identity") {
    GrayImage img(8, 8);
    Rng rng(4);
    for (double& v : img.data) v = rng.uniform();
    GrayImage out = downsample_bicubic(img, 1);
    CHECK(out.data == img.data);
  }

  TEST_CASE("bicubic keeps constants") {
    GrayImage img(12, 12);
    for (double& v : img.data) v = 0.7;
    GrayImage out = downsample_bicubic(img, 2);
    REQUIRE(out.height == 6);
    for (double v : out.data) CHECK(v == doctest::Approx(0.7).epsilon(1e-12));
  }

  TEST_CASE("bicubic ramp keeps its endpoints") {
    GrayImage img(16, 16);
    for (int y = 0; y < 16; ++y)
      for (int x = 0; x < 16; ++x) img.at(y, x) = x / 15.0;
    GrayImage out = downsample_bicubic(img, 2);
    REQUIRE(out.width == 8);
    for (int y = 0; y < 8; ++y) {
      CHECK(out.at(y, 0) == doctest::Approx(0.0).epsilon(1e-6));
      CHECK(out.at(y, 7) == doctest::Approx(1.0).epsilon(1e-6));
    }
    // The interior stays a linear ramp of the same slope.
    for (int x = 0; x < 8; ++x)
      CHECK(out.at(4, x) == doctest::Approx(x / 7.0).epsilon(1e-6));
  }

  TEST_CASE("downsample_bicubic center-crops non-divisible inputs") {
    GrayImage img(17, 19);
    GrayImage out = downsample_bicubic(img, 2);
    CHECK(out.height == 8);
    CHECK(out.width == 9);
  }

  TEST_CASE("center_crop takes the middle window") {
    GrayImage img(6, 6);
    for (int y = 0; y < 6; ++y)
      for (int x = 0; x < 6; ++x) img.at(y, x) = y * 10 + x;
    GrayImage out = center_crop(img, 2, 2);
    CHECK(out.at(0, 0) == 22.0);
    CHECK(out.at(1, 1) == 33.0);
  }
}

TEST_SUITE("tensor_file") {
  TEST_CASE("round trip is bitwise") {
    fs::path dir = temp_dir("tf_rt");
    std::string path = (dir / "t.s2k1").string();
    NamedTensor a{"alpha", {2, 3}, {1.f, -2.f, 3.5f, 0.f, 1e-20f, 4e7f}};
    NamedTensor b{"beta.长", {4}, {0.1f, 0.2f, 0.3f, 0.4f}};
    write_tensor_file(path, {a, b});
    auto back = read_tensor_file(path);
    REQUIRE(back.size() == 2);
    CHECK(back[0].name == "alpha");
    CHECK(back[0].dims == a.dims);
    CHECK(back[0].values == a.values);
    CHECK(back[1].name == b.name);
    CHECK(back[1].values == b.values);
  }

  TEST_CASE("empty file is valid and empty") {
    fs::path dir = temp_dir("tf_empty");
    std::string path = (dir / "e.s2k1").string();
    write_tensor_file(path, {});
    CHECK(read_tensor_file(path).empty());
  }

  TEST_CASE("corrupt magic raises FormatError") {
    fs::path dir = temp_dir("tf_magic");
    std::string path = (dir / "bad.s2k1").string();
    FILE* f = std::fopen(path.c_str(), "wb");
    std::fputs("NOPE\0\0\0\0", f);
    std::fclose(f);
    CHECK_THROWS_AS((void)read_tensor_file(path), FormatError);
  }

  TEST_CASE("trailing bytes raise FormatError") {
    fs::path dir = temp_dir("tf_trail");
    std::string path = (dir / "t.s2k1").string();
    write_tensor_file(path, {NamedTensor{"x", {1}, {1.f}}});
    FILE* f = std::fopen(path.c_str(), "ab");
    std::fputc('x', f);
    std::fclose(f);
    CHECK_THROWS_AS((void)read_tensor_file(path), FormatError);
  }

  TEST_CASE("truncated payload raises FormatError") {
    fs::path dir = temp_dir("tf_trunc");
    std::string path = (dir / "t.s2k1").string();
    write_tensor_file(path, {NamedTensor{"x", {8}, std::vector<float>(8, 1.f)}});
    fs::resize_file(path, fs::file_size(path) - 5);
    CHECK_THROWS_AS((void)read_tensor_file(path), FormatError);
  }

  TEST_CASE("missing file raises FormatError") {
    CHECK_THROWS_AS((void)read_tensor_file("/nonexistent/x.s2k1"), FormatError);
  }

  TEST_CASE("find_tensor locates by name") {
    std::vector<NamedTensor> ts = {NamedTensor{"a", {1}, {1.f}},
                                   NamedTensor{"b", {1}, {2.f}}};
    CHECK(find_tensor(ts, "b").values[0] == 2.f);
    CHECK(has_tensor(ts, "a"));
    CHECK(!has_tensor(ts, "c"));
    CHECK_THROWS_AS((void)find_tensor(ts, "zz"), FormatError);
  }
}
