#pragma once

#include <complex>
#include <vector>

#include "fsat/matrix.hpp"
#include "fsat/waveform.hpp"

namespace fsat {

struct StftConfig {
    int n_fft = 512;
    int hop = 128;
    enum class Window { Hann } window = Window::Hann;
    int sample_rate_hz = 16000;

    int n_bins() const { return n_fft / 2 + 1; }

    // Analysis frames start n_fft - hop samples before the signal so that
    // every real sample sits in a full overlap-add neighbourhood (exact COLA
    // weight at hop = n_fft/4). Without it the first window taper makes the
    // leading samples unrecoverable.
    int pad_left() const { return n_fft - hop; }

    void validate() const {
        if (n_fft <= 0 || (n_fft & (n_fft - 1)) != 0)
            throw ConfigError("stft: n_fft must be a positive power of two");
        if (hop <= 0 || hop > n_fft) throw ConfigError("stft: need 0 < hop <= n_fft");
        if (n_fft % hop != 0) throw ConfigError("stft: hop must divide n_fft");
        if (sample_rate_hz <= 0) throw ConfigError("stft: sample rate must be positive");
    }

    bool operator==(const StftConfig&) const = default;
};

// Periodic Hann window of length n.
std::vector<double> hann_window(int n);

struct ComplexSpectrogram {
    ComplexMatrix bins;  // n_frames x (n_fft/2 + 1)
    StftConfig cfg;
    std::size_t original_length = 0;

    std::size_t n_frames() const { return bins.rows; }
    std::size_t n_bins() const { return bins.cols; }

    double magnitude(std::size_t t, std::size_t k) const { return std::abs(bins.at(t, k)); }
    double phase(std::size_t t, std::size_t k) const { return std::arg(bins.at(t, k)); }
};

std::size_t stft_frame_count(std::size_t samples, const StftConfig& cfg);

// Framed one-sided spectrum of a real signal; requires len >= n_fft.
ComplexSpectrogram stft(const Waveform& w, const StftConfig& cfg);

// Overlap-add inverse with window-square normalization, truncated to
// original_length. Exact round trip for unmodified spectrograms.
Waveform istft(const ComplexSpectrogram& s);

// Adjoint of the linear ISTFT map: for any complex V and real g of
// original_length, <istft_linear(V), g> = sum Re(V .* conj(G)).
// This is what pulls waveform-space loss gradients back to spectrogram space.
ComplexMatrix istft_adjoint(const std::vector<double>& waveform_grad, const StftConfig& cfg);

}  // namespace fsat
