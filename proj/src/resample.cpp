#include "fsat/resample.hpp"

#include <cmath>

#include "fsat/filters.hpp"

namespace fsat {

Waveform resample_to(const Waveform& w, int target_hz, bool anti_alias) {
    w.validate();
    if (target_hz <= 0) throw DomainError("resample_to: target rate must be positive");
    if (target_hz == w.sample_rate_hz) return w;

    Waveform src = w;
    if (anti_alias) {
        const double cutoff = std::min(w.sample_rate_hz, target_hz) / 2.0;
        if (cutoff < w.sample_rate_hz / 2.0)
            src = brickwall_filter(w, cutoff, FilterMode::Lowpass);
    }

    const std::size_t in_len = src.samples.size();
    const double ratio = static_cast<double>(target_hz) / src.sample_rate_hz;
    const std::size_t out_len =
        static_cast<std::size_t>(std::llround(static_cast<double>(in_len) * ratio));

    Waveform out;
    out.sample_rate_hz = target_hz;
    out.samples.resize(std::max<std::size_t>(out_len, 1));
    const double step = static_cast<double>(src.sample_rate_hz) / target_hz;
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
        const double pos = i * step;
        const std::size_t i0 = std::min(static_cast<std::size_t>(pos), in_len - 1);
        const std::size_t i1 = std::min(i0 + 1, in_len - 1);
        const double frac = pos - static_cast<double>(i0);
        out.samples[i] = src.samples[i0] + frac * (src.samples[i1] - src.samples[i0]);
    }
    return out;
}

}  // namespace fsat
