#pragma once

// Thin FFTW wrappers. Plan creation is serialized internally, so every
// function here may be called from several threads at once.

#include <complex>
#include <cstddef>
#include <vector>

namespace pq::fft {

using cplx = std::complex<double>;

// Smallest n' >= n whose only prime factors are 2, 3, 5, 7.
std::size_t fast_size(std::size_t n);

// One-sided DFT of a real sequence zero-padded to `n` (n >= x.size()):
// X_k = sum_j x_j exp(-2 pi i j k / n), k = 0 .. n/2.
std::vector<cplx> rfft(const std::vector<double>& x, std::size_t n);

// Full linear convolution (length x.size() + k.size() - 1).
std::vector<double> convolve(const std::vector<double>& x, const std::vector<double>& k);

}  // namespace pq::fft
