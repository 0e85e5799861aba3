#pragma once

#include <string>

#include "fsat/rng.hpp"
#include "fsat/waveform.hpp"

namespace fsat {

// Magnitude units per kind:
//   GaussianNoise   target SNR in dB
//   Lowpass/Highpass brickwall cutoff in Hz
//   PeakingEq       gain in dB (random center, Q = 1)
//   SevenBandEq     per-band gains drawn uniformly from +-magnitude dB
//   Aliasing        downsampling factor (resample to sr/m and back, no filter)
//   BitCrush        bit depth (rounded to an integer >= 1)
//   TanhDistortion  drive k in y = tanh(k x)
//   Gain            gain in dB
//   GainTransition  ramp target in dB over a random contiguous half clip
//   TimeMask        masked fraction of the clip in [0, 1]
//   TimeStretch     playback-rate factor (> 0), padded/trimmed to length
//   AirAbsorption   distance in meters; attenuation exp(-0.005 d (f/1kHz)^2)
//   RoomReverb      RT60 in seconds; noise-burst impulse response
enum class CorruptionKind {
    GaussianNoise,
    Lowpass,
    Highpass,
    PeakingEq,
    SevenBandEq,
    Aliasing,
    BitCrush,
    TanhDistortion,
    Gain,
    GainTransition,
    TimeMask,
    TimeStretch,
    AirAbsorption,
    RoomReverb,
};

struct CorruptionOp {
    CorruptionKind kind;
    double lo = 0.0;  // magnitude range, op-specific units
    double hi = 0.0;

    void validate() const {
        if (!(lo <= hi)) throw ConfigError("corruption op: need lo <= hi");
    }
};

const char* corruption_name(CorruptionKind kind);
CorruptionKind corruption_from_name(const std::string& name);

// Applies one corruption at the given magnitude. Never changes the sample
// rate or the length. Random draws (noise, segment positions, per-band gains)
// come from the supplied stream.
Waveform apply_corruption(const Waveform& w, CorruptionKind kind, double magnitude, Rng& rng);

}  // namespace fsat
