#include "fsat/band.hpp"

#include <cmath>

namespace fsat {

BandMask band_to_bins(const FrequencyBand& band, const StftConfig& cfg) {
    cfg.validate();
    band.validate(cfg.sample_rate_hz);

    BandMask mask;
    mask.n_bins = cfg.n_bins();
    mask.lo_bin = static_cast<int>(std::floor(band.low_hz * cfg.n_fft / cfg.sample_rate_hz));
    mask.hi_bin = static_cast<int>(std::ceil(band.high_hz * cfg.n_fft / cfg.sample_rate_hz));
    mask.hi_bin = std::min(mask.hi_bin, mask.n_bins - 1);
    return mask;
}

Matrix apply_band_mask(const Matrix& delta, const BandMask& mask) {
    if (delta.cols != static_cast<std::size_t>(mask.n_bins))
        throw SizeError("apply_band_mask: column count does not match mask");
    Matrix out = delta;
    for (std::size_t t = 0; t < out.rows; ++t)
        for (std::size_t k = 0; k < out.cols; ++k)
            if (!mask.contains(k)) out.at(t, k) = 0.0;
    return out;
}

ComplexSpectrogram compose_perturbed(const ComplexSpectrogram& s, const Matrix& delta_s,
                                     bool clamp_nonneg) {
    if (delta_s.rows != s.bins.rows || delta_s.cols != s.bins.cols)
        throw SizeError("compose_perturbed: perturbation shape does not match spectrogram");

    ComplexSpectrogram out = s;
    for (std::size_t i = 0; i < out.bins.v.size(); ++i) {
        const double d = delta_s.v[i];
        if (d == 0.0) continue;  // untouched bins stay bit-exact
        const std::complex<double> z = s.bins.v[i];
        const double rho = std::abs(z);
        double mag = rho + d;
        if (clamp_nonneg && mag < 0.0) mag = 0.0;
        const double phi = std::arg(z);
        out.bins.v[i] = std::complex<double>{mag * std::cos(phi), mag * std::sin(phi)};
    }
    return out;
}

}  // namespace fsat
