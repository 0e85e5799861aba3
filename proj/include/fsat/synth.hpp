#pragma once

#include <cstdint>
#include <filesystem>

#include "fsat/band.hpp"
#include "fsat/waveform.hpp"

namespace fsat {

struct SynthConfig {
    int n_real = 1250;
    int n_fake = 1250;
    double clip_seconds = 1.0;
    int sample_rate_hz = 16000;
    FrequencyBand artifact_band{5500.0, 7500.0};
    double artifact_level_db = -10.0;  // dB relative to the base clip's RMS
    double base_peak = 0.05;           // peak-normalization target of the base clip
    std::uint64_t seed = 0;

    void validate() const {
        if (n_real < 0 || n_fake < 0 || n_real + n_fake == 0)
            throw ConfigError("synth: need at least one clip");
        if (clip_seconds <= 0.0) throw ConfigError("synth: clip_seconds must be positive");
        if (sample_rate_hz <= 0) throw ConfigError("synth: sample rate must be positive");
        if (base_peak <= 0.0 || base_peak > 1.0)
            throw ConfigError("synth: base_peak must be in (0, 1]");
        artifact_band.validate(sample_rate_hz);
    }
};

// Base "speech-like" clip for pair index i: a handful of harmonics plus
// 1/f-shaped noise, low-passed at 4 kHz. Fake clips add band-limited noise in
// the artifact band on top of the same base, so a real/fake pair with one
// index differs only inside that band.
Waveform synth_base_clip(const SynthConfig& cfg, int index);
Waveform synth_fake_clip(const SynthConfig& cfg, int index);

// Writes WAVs plus manifest.tsv (80/20 train/test split per class) under
// out_dir and returns the manifest. Byte-identical across reruns with the
// same config.
Manifest gen_synthetic_corpus(const SynthConfig& cfg, const std::filesystem::path& out_dir,
                              int threads = 1);

}  // namespace fsat
