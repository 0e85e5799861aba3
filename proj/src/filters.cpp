#include "fsat/filters.hpp"

#include <cmath>

#include "fsat/fft.hpp"

namespace fsat {

Waveform brickwall_filter(const Waveform& w, double cutoff_hz, FilterMode mode) {
    w.validate();
    const double nyquist = w.sample_rate_hz / 2.0;
    if (cutoff_hz <= 0.0 || cutoff_hz >= nyquist)
        throw DomainError("brickwall_filter: cutoff must lie in (0, Nyquist)");

    const std::size_t n = w.samples.size();
    std::vector<cdouble> spec(n);
    for (std::size_t i = 0; i < n; ++i) spec[i] = cdouble{w.samples[i], 0.0};
    spec = fft(spec, false);

    const double bin_hz = static_cast<double>(w.sample_rate_hz) / static_cast<double>(n);
    for (std::size_t k = 0; k <= n / 2; ++k) {
        const double f = k * bin_hz;
        const bool zero = mode == FilterMode::Highpass ? (f < cutoff_hz) : (f > cutoff_hz);
        if (!zero) continue;
        spec[k] = cdouble{0.0, 0.0};
        if (k != 0 && 2 * k != n) spec[n - k] = cdouble{0.0, 0.0};
    }
    spec = fft(spec, true);

    Waveform out;
    out.sample_rate_hz = w.sample_rate_hz;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.samples[i] = spec[i].real();
    return out;
}

Biquad Biquad::peaking(double center_hz, int sample_rate_hz, double gain_db, double q) {
    const double a = std::pow(10.0, gain_db / 40.0);
    const double w0 = 2.0 * 3.141592653589793238462643383279502884 * center_hz / sample_rate_hz;
    const double alpha = std::sin(w0) / (2.0 * q);
    const double cosw0 = std::cos(w0);

    const double a0 = 1.0 + alpha / a;
    Biquad f;
    f.b0 = (1.0 + alpha * a) / a0;
    f.b1 = (-2.0 * cosw0) / a0;
    f.b2 = (1.0 - alpha * a) / a0;
    f.a1 = (-2.0 * cosw0) / a0;
    f.a2 = (1.0 - alpha / a) / a0;
    return f;
}

void Biquad::process_inplace(std::span<double> x) const {
    double x1 = 0.0, x2 = 0.0, y1 = 0.0, y2 = 0.0;
    for (double& v : x) {
        const double in = v;
        const double out = b0 * in + b1 * x1 + b2 * x2 - a1 * y1 - a2 * y2;
        x2 = x1;
        x1 = in;
        y2 = y1;
        y1 = out;
        v = out;
    }
}

}  // namespace fsat
