#include "s2k/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <tuple>

#include "s2k/errors.hpp"

namespace s2k {

namespace {

// One cached plan with its owned buffers. FFTW plans are tied to the
// buffers they were created with (alignment), so execution copies
// through them under the cache mutex.
struct PlanEntry {
  fftw_plan plan = nullptr;
  fftw_complex* in = nullptr;
  fftw_complex* out = nullptr;
};

std::mutex g_mutex;
std::map<std::tuple<int, int, int>, PlanEntry>& plan_cache() {
  static auto* cache = new std::map<std::tuple<int, int, int>, PlanEntry>();
  return *cache;
}

PlanEntry& get_plan(int h, int w, int sign) {
  auto key = std::make_tuple(h, w, sign);
  auto it = plan_cache().find(key);
  if (it != plan_cache().end()) return it->second;

  PlanEntry e;
  e.in = fftw_alloc_complex(std::size_t(h) * w);
  e.out = fftw_alloc_complex(std::size_t(h) * w);
  e.plan = fftw_plan_dft_2d(h, w, e.in, e.out, sign, FFTW_ESTIMATE);
  if (!e.plan) throw Error("fftw plan creation failed");
  return plan_cache().emplace(key, e).first->second;
}

std::vector<std::complex<double>> run(const std::complex<double>* data, int h,
                                      int w, int sign) {
  if (h < 1 || w < 1) throw InvalidArgument("fft2: degenerate size");
  std::size_t n = std::size_t(h) * w;
  std::vector<std::complex<double>> result(n);
  {
    std::lock_guard<std::mutex> lock(g_mutex);
    PlanEntry& e = get_plan(h, w, sign);
    std::memcpy(e.in, data, n * sizeof(fftw_complex));
    fftw_execute(e.plan);
    std::memcpy(result.data(), e.out, n * sizeof(fftw_complex));
  }
  if (sign == FFTW_BACKWARD)
    for (auto& v : result) v /= double(n);
  return result;
}

}  // namespace

std::vector<std::complex<double>> fft2(const std::complex<double>* data,
                                       int h, int w) {
  return run(data, h, w, FFTW_FORWARD);
}

std::vector<std::complex<double>> fft2(const double* data, int h, int w) {
  std::vector<std::complex<double>> tmp(std::size_t(h) * w);
  for (std::size_t i = 0; i < tmp.size(); ++i) tmp[i] = data[i];
  return run(tmp.data(), h, w, FFTW_FORWARD);
}

std::vector<std::complex<double>> ifft2(const std::complex<double>* data,
                                        int h, int w) {
  return run(data, h, w, FFTW_BACKWARD);
}

}  // namespace s2k
