#pragma once

#include "fsat/matrix.hpp"
#include "fsat/stft.hpp"

namespace fsat {

struct FrequencyBand {
    double low_hz = 0.0;
    double high_hz = 0.0;

    void validate(int sample_rate_hz) const {
        if (!(low_hz >= 0.0 && low_hz < high_hz))
            throw DomainError("frequency band: need 0 <= low < high");
        if (high_hz > sample_rate_hz / 2.0)
            throw DomainError("frequency band: upper edge above Nyquist");
    }
};

// Inclusive bin range [lo_bin, hi_bin]; the diagonal 0/1 selector over a
// one-sided spectrum of n_bins columns.
struct BandMask {
    int lo_bin = 0;
    int hi_bin = 0;
    int n_bins = 0;

    bool contains(std::size_t k) const {
        return static_cast<int>(k) >= lo_bin && static_cast<int>(k) <= hi_bin;
    }
};

// lo = floor(f_l * n_fft / sr), hi = ceil(f_u * n_fft / sr), hi clamped to the
// last one-sided bin.
BandMask band_to_bins(const FrequencyBand& band, const StftConfig& cfg);

// Zeroes columns outside the mask; in-band values pass through untouched.
Matrix apply_band_mask(const Matrix& delta, const BandMask& mask);

// Perturbed spectrogram: magnitude becomes |X| + delta_s with the original
// phase; entries whose perturbation is exactly zero keep the original complex
// bin bit-for-bit. clamp_nonneg floors the perturbed magnitude at zero.
ComplexSpectrogram compose_perturbed(const ComplexSpectrogram& s, const Matrix& delta_s,
                                     bool clamp_nonneg = true);

}  // namespace fsat
