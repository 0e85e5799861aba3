#pragma once

#include <span>

#include "fsat/waveform.hpp"

namespace fsat {

enum class FilterMode { Highpass, Lowpass };

// Zeroes full-signal DFT bins strictly below (Highpass) or above (Lowpass)
// the cutoff, then inverts. Exact-length DFT, so bin k sits at k*sr/len Hz.
Waveform brickwall_filter(const Waveform& w, double cutoff_hz, FilterMode mode);

// Second-order IIR section (direct form 1), normalized so a0 = 1.
struct Biquad {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;

    // Parametric peaking EQ (RBJ cookbook coefficients).
    static Biquad peaking(double center_hz, int sample_rate_hz, double gain_db, double q);

    void process_inplace(std::span<double> x) const;
};

}  // namespace fsat
