#pragma once

#include "fsat/waveform.hpp"

namespace fsat {

// Linear-interpolation resampler. Output length is round(len * target/source).
// anti_alias=true low-passes at min(Nyquist_in, Nyquist_out) first;
// anti_alias=false interpolates the raw signal (the aliasing corruption's
// downsampling leg relies on this).
Waveform resample_to(const Waveform& w, int target_hz, bool anti_alias);

}  // namespace fsat
