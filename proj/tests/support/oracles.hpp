#pragma once

// Test-only oracles, independent of the implementation paths they check.

#include <complex>
#include <vector>

#include "fsat/fft.hpp"
#include "fsat/rng.hpp"
#include "fsat/waveform.hpp"

namespace oracles {

// O(n^2) reference DFT (forward unnormalized, inverse scaled by 1/n).
inline std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& x,
                                                   bool inverse) {
    const std::size_t n = x.size();
    std::vector<std::complex<double>> out(n);
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t t = 0; t < n; ++t) {
            const double ang = sign * 2.0 * 3.141592653589793238462643383279502884 *
                               static_cast<double>(k) * static_cast<double>(t) / static_cast<double>(n);
            acc += x[t] * std::complex<double>{std::cos(ang), std::sin(ang)};
        }
        out[k] = inverse ? acc / static_cast<double>(n) : acc;
    }
    return out;
}

// Frequency (Hz) of the largest-magnitude one-sided spectrum bin.
inline double dominant_frequency_hz(const fsat::Waveform& w) {
    std::vector<std::complex<double>> spec(w.samples.size());
    for (std::size_t i = 0; i < w.samples.size(); ++i) spec[i] = {w.samples[i], 0.0};
    spec = fsat::fft(spec, false);
    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t k = 0; k <= w.samples.size() / 2; ++k) {
        const double m = std::abs(spec[k]);
        if (m > best_mag) {
            best_mag = m;
            best = k;
        }
    }
    return static_cast<double>(best) * w.sample_rate_hz / static_cast<double>(w.samples.size());
}

// Signal energy inside [lo_hz, hi_hz], measured on the full-length DFT.
inline double band_energy(const fsat::Waveform& w, double lo_hz, double hi_hz) {
    std::vector<std::complex<double>> spec(w.samples.size());
    for (std::size_t i = 0; i < w.samples.size(); ++i) spec[i] = {w.samples[i], 0.0};
    spec = fsat::fft(spec, false);
    const std::size_t n = w.samples.size();
    const double bin_hz = static_cast<double>(w.sample_rate_hz) / static_cast<double>(n);
    double acc = 0.0;
    for (std::size_t k = 0; k <= n / 2; ++k) {
        const double f = k * bin_hz;
        if (f < lo_hz || f > hi_hz) continue;
        const double e = std::norm(spec[k]);
        acc += (k == 0 || 2 * k == n) ? e : 2.0 * e;  // one-sided doubling
    }
    return acc / static_cast<double>(n);  // Parseval: sum x^2
}

inline fsat::Waveform sine(double freq_hz, int sample_rate_hz, std::size_t n, double amp = 0.5) {
    fsat::Waveform w;
    w.sample_rate_hz = sample_rate_hz;
    w.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        w.samples[i] =
            amp * std::sin(2.0 * 3.141592653589793238462643383279502884 * freq_hz * i / sample_rate_hz);
    return w;
}

inline fsat::Waveform random_waveform(std::uint64_t seed, std::size_t n, int sample_rate_hz = 16000,
                                      double amp = 0.9) {
    fsat::Rng rng(seed);
    fsat::Waveform w;
    w.sample_rate_hz = sample_rate_hz;
    w.samples.resize(n);
    for (auto& s : w.samples) s = rng.uniform(-amp, amp);
    return w;
}

}  // namespace oracles
