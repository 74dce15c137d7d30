#pragma once

#include <complex>
#include <vector>

namespace s2k {

// Thin wrappers over FFTW for the 2-D transforms used in this library.
// Convention: forward is unnormalized, inverse carries the full 1/(h*w)
// factor, so ifft2(fft2(x)) == x. Plans are cached per (h, w, direction)
// behind a mutex; the wrappers are safe to call from multiple threads.
std::vector<std::complex<double>> fft2(const std::complex<double>* data,
                                       int h, int w);
std::vector<std::complex<double>> fft2(const double* data, int h, int w);
std::vector<std::complex<double>> ifft2(const std::complex<double>* data,
                                        int h, int w);

}  // namespace s2k
