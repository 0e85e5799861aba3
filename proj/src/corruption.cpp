#include "fsat/corruption.hpp"

#include <algorithm>
#include <cmath>

#include "fsat/fft.hpp"
#include "fsat/filters.hpp"
#include "fsat/resample.hpp"

namespace fsat {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

const char* kNames[] = {
    "gaussian_noise", "lowpass",         "highpass",   "peaking_eq",      "seven_band_eq",
    "aliasing",       "bit_crush",       "tanh_distortion", "gain",       "gain_transition",
    "time_mask",      "time_stretch",    "air_absorption",  "room_reverb",
};

void fix_length(std::vector<double>& x, std::size_t n) {
    x.resize(n, 0.0);
}

Waveform gaussian_noise(const Waveform& w, double snr_db, Rng& rng) {
    const double sigma = rms(w.samples) * std::pow(10.0, -snr_db / 20.0);
    Waveform out = w;
    for (auto& s : out.samples) s += sigma * rng.gaussian();
    return out;
}

Waveform peaking_eq(const Waveform& w, double gain_db, Rng& rng) {
    const double nyquist = w.sample_rate_hz / 2.0;
    const double hi = std::min(6000.0, 0.9 * nyquist);
    const double center = 100.0 * std::pow(hi / 100.0, rng.uniform());  // log-uniform
    Waveform out = w;
    Biquad::peaking(center, w.sample_rate_hz, gain_db, 1.0).process_inplace(out.samples);
    return out;
}

Waveform seven_band_eq(const Waveform& w, double max_gain_db, Rng& rng) {
    static constexpr double kCenters[7] = {60.0, 150.0, 400.0, 1000.0, 2400.0, 4800.0, 7000.0};
    Waveform out = w;
    const double nyquist = w.sample_rate_hz / 2.0;
    for (double center : kCenters) {
        const double gain = rng.uniform(-max_gain_db, max_gain_db);
        if (center >= nyquist) continue;
        Biquad::peaking(center, w.sample_rate_hz, gain, 1.0).process_inplace(out.samples);
    }
    return out;
}

Waveform aliasing(const Waveform& w, double factor) {
    if (factor <= 1.0) throw DomainError("aliasing: factor must exceed 1");
    const int down_hz = std::max(1, static_cast<int>(std::llround(w.sample_rate_hz / factor)));
    Waveform down = resample_to(w, down_hz, /*anti_alias=*/false);
    Waveform up = resample_to(down, w.sample_rate_hz, /*anti_alias=*/false);
    fix_length(up.samples, w.samples.size());
    return up;
}

Waveform bit_crush(const Waveform& w, double magnitude) {
    const int bits = static_cast<int>(std::llround(magnitude));
    if (bits < 1) throw DomainError("bit_crush: need at least 1 bit");
    const double levels = std::pow(2.0, bits - 1);
    const double lo = -levels;
    const double hi = levels - 1.0;
    Waveform out = w;
    for (auto& s : out.samples) s = std::clamp(std::round(s * levels), lo, hi) / levels;
    return out;
}

Waveform gain_transition(const Waveform& w, double target_db, Rng& rng) {
    const std::size_t n = w.samples.size();
    const std::size_t half = n / 2;
    const std::size_t start = half == 0 ? 0 : rng.uniform_index(n - half + 1);
    Waveform out = w;
    const double full_gain = std::pow(10.0, target_db / 20.0);
    for (std::size_t i = start; i < start + half && i < n; ++i) {
        const double frac = half <= 1 ? 1.0 : static_cast<double>(i - start) / (half - 1);
        out.samples[i] *= std::pow(10.0, target_db * frac / 20.0);
    }
    for (std::size_t i = start + half; i < n; ++i) out.samples[i] *= full_gain;
    return out;
}

Waveform time_mask(const Waveform& w, double fraction, Rng& rng) {
    if (fraction < 0.0 || fraction > 1.0) throw DomainError("time_mask: fraction must be in [0, 1]");
    const std::size_t n = w.samples.size();
    const std::size_t span = static_cast<std::size_t>(std::llround(fraction * n));
    Waveform out = w;
    if (span == 0) return out;
    const std::size_t start = rng.uniform_index(n - span + 1);
    std::fill(out.samples.begin() + start, out.samples.begin() + start + span, 0.0);
    return out;
}

Waveform time_stretch(const Waveform& w, double factor) {
    if (factor <= 0.0) throw DomainError("time_stretch: factor must be positive");
    const std::size_t n = w.samples.size();
    const std::size_t out_len =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(n / factor)));
    Waveform out = w;
    out.samples.assign(out_len, 0.0);
    for (std::size_t i = 0; i < out_len; ++i) {
        const double pos = i * factor;
        const std::size_t i0 = std::min(static_cast<std::size_t>(pos), n - 1);
        const std::size_t i1 = std::min(i0 + 1, n - 1);
        const double frac = pos - static_cast<double>(i0);
        out.samples[i] = w.samples[i0] + frac * (w.samples[i1] - w.samples[i0]);
    }
    fix_length(out.samples, n);
    return out;
}

Waveform air_absorption(const Waveform& w, double distance_m) {
    if (distance_m < 0.0) throw DomainError("air_absorption: distance must be non-negative");
    const std::size_t n = w.samples.size();
    std::vector<cdouble> spec(n);
    for (std::size_t i = 0; i < n; ++i) spec[i] = cdouble{w.samples[i], 0.0};
    spec = fft(spec, false);
    const double bin_hz = static_cast<double>(w.sample_rate_hz) / static_cast<double>(n);
    for (std::size_t k = 0; k <= n / 2; ++k) {
        const double f_khz = k * bin_hz / 1000.0;
        const double att = std::exp(-0.005 * distance_m * f_khz * f_khz);
        spec[k] *= att;
        if (k != 0 && 2 * k != n) spec[n - k] *= att;
    }
    spec = fft(spec, true);
    Waveform out = w;
    for (std::size_t i = 0; i < n; ++i) out.samples[i] = spec[i].real();
    return out;
}

Waveform room_reverb(const Waveform& w, double rt60_s, Rng& rng) {
    if (rt60_s <= 0.0) throw DomainError("room_reverb: RT60 must be positive");
    const std::size_t n = w.samples.size();
    const std::size_t ir_len =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(rt60_s * w.sample_rate_hz)));
    std::vector<double> ir(ir_len);
    const double decay = 6.91 / (rt60_s * w.sample_rate_hz);
    for (std::size_t t = 0; t < ir_len; ++t) ir[t] = rng.gaussian() * std::exp(-decay * t);
    const double e = std::sqrt(energy(ir));
    for (auto& v : ir) v /= std::max(e, 1e-12);

    // FFT convolution, truncated back to the clip length.
    std::size_t m = 1;
    while (m < n + ir_len - 1) m <<= 1;
    std::vector<cdouble> a(m, cdouble{0.0, 0.0}), b(m, cdouble{0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) a[i] = cdouble{w.samples[i], 0.0};
    for (std::size_t i = 0; i < ir_len; ++i) b[i] = cdouble{ir[i], 0.0};
    fft_pow2(a, false);
    fft_pow2(b, false);
    for (std::size_t i = 0; i < m; ++i) a[i] *= b[i];
    fft_pow2(a, true);

    Waveform out = w;
    for (std::size_t i = 0; i < n; ++i) out.samples[i] = a[i].real();
    return out;
}

}  // namespace

const char* corruption_name(CorruptionKind kind) { return kNames[static_cast<int>(kind)]; }

CorruptionKind corruption_from_name(const std::string& name) {
    for (int i = 0; i < static_cast<int>(std::size(kNames)); ++i)
        if (name == kNames[i]) return static_cast<CorruptionKind>(i);
    throw ConfigError("unknown corruption kind '" + name + "'");
}

Waveform apply_corruption(const Waveform& w, CorruptionKind kind, double magnitude, Rng& rng) {
    w.validate();
    switch (kind) {
        case CorruptionKind::GaussianNoise:
            return gaussian_noise(w, magnitude, rng);
        case CorruptionKind::Lowpass:
            return brickwall_filter(w, magnitude, FilterMode::Lowpass);
        case CorruptionKind::Highpass:
            return brickwall_filter(w, magnitude, FilterMode::Highpass);
        case CorruptionKind::PeakingEq:
            return peaking_eq(w, magnitude, rng);
        case CorruptionKind::SevenBandEq:
            return seven_band_eq(w, magnitude, rng);
        case CorruptionKind::Aliasing:
            return aliasing(w, magnitude);
        case CorruptionKind::BitCrush:
            return bit_crush(w, magnitude);
        case CorruptionKind::TanhDistortion: {
            if (magnitude <= 0.0) throw DomainError("tanh_distortion: drive must be positive");
            Waveform out = w;
            for (auto& s : out.samples) s = std::tanh(magnitude * s);
            return out;
        }
        case CorruptionKind::Gain: {
            const double g = std::pow(10.0, magnitude / 20.0);
            Waveform out = w;
            for (auto& s : out.samples) s *= g;
            return out;
        }
        case CorruptionKind::GainTransition:
            return gain_transition(w, magnitude, rng);
        case CorruptionKind::TimeMask:
            return time_mask(w, magnitude, rng);
        case CorruptionKind::TimeStretch:
            return time_stretch(w, magnitude);
        case CorruptionKind::AirAbsorption:
            return air_absorption(w, magnitude);
        case CorruptionKind::RoomReverb:
            return room_reverb(w, magnitude, rng);
    }
    throw DomainError("apply_corruption: unknown kind");
}

}  // namespace fsat
