#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace fsat {

using cdouble = std::complex<double>;

// In-place complex FFT, length must be a power of two.
// Forward is unnormalized; inverse scales by 1/N.
void fft_pow2(std::vector<cdouble>& a, bool inverse);

// Complex DFT of arbitrary length (radix-2 fast path, Bluestein otherwise).
// Same normalization convention as fft_pow2.
std::vector<cdouble> fft(const std::vector<cdouble>& a, bool inverse);

// One-sided spectrum (n/2+1 bins) of a real block; n must be a power of two.
std::vector<cdouble> rfft_onesided(const double* x, std::size_t n);

// Real block from a one-sided spectrum via Hermitian extension; the result is
// the real part of the inverse DFT, so the map stays linear for arbitrary
// complex inputs (bins 0 and n/2 included).
std::vector<double> irfft_onesided(const cdouble* bins, std::size_t n);

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace fsat
