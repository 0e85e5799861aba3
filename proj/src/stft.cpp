#include "fsat/stft.hpp"

#include <cmath>

#include "fsat/fft.hpp"
#include "fsat/parallel.hpp"

namespace fsat {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kWssFloor = 1e-6;

// Window-square overlap sum on the padded extent.
std::vector<double> window_square_sum(const std::vector<double>& win, std::size_t n_frames,
                                      int hop, std::size_t padded_len) {
    std::vector<double> wss(padded_len, 0.0);
    for (std::size_t t = 0; t < n_frames; ++t) {
        const std::size_t base = t * static_cast<std::size_t>(hop);
        for (std::size_t m = 0; m < win.size(); ++m) wss[base + m] += win[m] * win[m];
    }
    return wss;
}

struct Geometry {
    std::size_t n_frames;
    std::size_t padded_len;
    std::size_t pad_left;
};

Geometry geometry(std::size_t samples, const StftConfig& cfg) {
    const std::size_t pad = static_cast<std::size_t>(cfg.pad_left());
    const std::size_t hop = static_cast<std::size_t>(cfg.hop);
    const std::size_t n_frames = (pad + samples - 1) / hop + 1;
    const std::size_t padded_len = (n_frames - 1) * hop + static_cast<std::size_t>(cfg.n_fft);
    return {n_frames, padded_len, pad};
}

}  // namespace

std::vector<double> hann_window(int n) {
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) w[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * i / n));
    return w;
}

std::size_t stft_frame_count(std::size_t samples, const StftConfig& cfg) {
    cfg.validate();
    return geometry(samples, cfg).n_frames;
}

ComplexSpectrogram stft(const Waveform& w, const StftConfig& cfg) {
    cfg.validate();
    w.validate();
    const std::size_t n_fft = static_cast<std::size_t>(cfg.n_fft);
    if (w.samples.size() < n_fft)
        throw SizeError("stft: waveform shorter than one frame");

    const Geometry geo = geometry(w.samples.size(), cfg);
    std::vector<double> padded(geo.padded_len, 0.0);
    std::copy(w.samples.begin(), w.samples.end(), padded.begin() + static_cast<long>(geo.pad_left));

    const std::vector<double> win = hann_window(cfg.n_fft);
    ComplexSpectrogram out;
    out.cfg = cfg;
    out.original_length = w.samples.size();
    out.bins = ComplexMatrix(geo.n_frames, static_cast<std::size_t>(cfg.n_bins()));

    for (std::size_t t = 0; t < geo.n_frames; ++t) {
        const double* seg = padded.data() + t * static_cast<std::size_t>(cfg.hop);
        std::vector<double> frame(n_fft);
        for (std::size_t m = 0; m < n_fft; ++m) frame[m] = seg[m] * win[m];
        const std::vector<cdouble> spec = rfft_onesided(frame.data(), n_fft);
        std::copy(spec.begin(), spec.end(), out.bins.v.begin() + static_cast<long>(t * out.bins.cols));
    }
    return out;
}

Waveform istft(const ComplexSpectrogram& s) {
    s.cfg.validate();
    if (s.bins.cols != static_cast<std::size_t>(s.cfg.n_bins()))
        throw SizeError("istft: bin count does not match config");
    if (s.original_length == 0) throw SizeError("istft: empty original length");

    const std::size_t n_fft = static_cast<std::size_t>(s.cfg.n_fft);
    const Geometry geo = geometry(s.original_length, s.cfg);
    if (geo.n_frames != s.bins.rows)
        throw SizeError("istft: frame count does not match original length");

    const std::vector<double> win = hann_window(s.cfg.n_fft);
    const std::vector<double> wss = window_square_sum(win, geo.n_frames, s.cfg.hop, geo.padded_len);
    for (std::size_t i = geo.pad_left; i < geo.pad_left + s.original_length; ++i)
        if (wss[i] < kWssFloor)
            throw ConfigError("istft: degenerate window overlap (non-COLA configuration)");

    std::vector<double> acc(geo.padded_len, 0.0);
    for (std::size_t t = 0; t < geo.n_frames; ++t) {
        const std::vector<double> frame = irfft_onesided(s.bins.v.data() + t * s.bins.cols, n_fft);
        const std::size_t base = t * static_cast<std::size_t>(s.cfg.hop);
        for (std::size_t m = 0; m < n_fft; ++m) acc[base + m] += win[m] * frame[m];
    }

    Waveform out;
    out.sample_rate_hz = s.cfg.sample_rate_hz;
    out.samples.resize(s.original_length);
    for (std::size_t i = 0; i < s.original_length; ++i) {
        const std::size_t p = geo.pad_left + i;
        out.samples[i] = acc[p] / wss[p];
    }
    return out;
}

ComplexMatrix istft_adjoint(const std::vector<double>& waveform_grad, const StftConfig& cfg) {
    cfg.validate();
    if (waveform_grad.empty()) throw SizeError("istft_adjoint: empty gradient");
    const std::size_t n_fft = static_cast<std::size_t>(cfg.n_fft);
    if (waveform_grad.size() < n_fft)
        throw SizeError("istft_adjoint: gradient shorter than one frame");

    const Geometry geo = geometry(waveform_grad.size(), cfg);
    const std::vector<double> win = hann_window(cfg.n_fft);
    const std::vector<double> wss = window_square_sum(win, geo.n_frames, cfg.hop, geo.padded_len);

    // Transpose of zero-extension followed by the 1/wss scaling.
    std::vector<double> g_ext(geo.padded_len, 0.0);
    for (std::size_t i = 0; i < waveform_grad.size(); ++i) {
        const std::size_t p = geo.pad_left + i;
        if (wss[p] < kWssFloor)
            throw ConfigError("istft_adjoint: degenerate window overlap (non-COLA configuration)");
        g_ext[p] = waveform_grad[i] / wss[p];
    }

    const std::size_t n_bins = static_cast<std::size_t>(cfg.n_bins());
    ComplexMatrix out(geo.n_frames, n_bins);
    const double inv_n = 1.0 / static_cast<double>(n_fft);
    for (std::size_t t = 0; t < geo.n_frames; ++t) {
        const double* seg = g_ext.data() + t * static_cast<std::size_t>(cfg.hop);
        std::vector<double> frame(n_fft);
        for (std::size_t m = 0; m < n_fft; ++m) frame[m] = seg[m] * win[m];
        const std::vector<cdouble> spec = rfft_onesided(frame.data(), n_fft);
        for (std::size_t k = 0; k < n_bins; ++k) {
            // Interior bins appear twice in the Hermitian extension.
            const double mult = (k == 0 || k == n_fft / 2) ? 1.0 : 2.0;
            out.at(t, k) = spec[k] * (mult * inv_n);
        }
    }
    return out;
}

}  // namespace fsat
