#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "fsat/errors.hpp"

namespace fsat {

struct Waveform {
    std::vector<double> samples;
    int sample_rate_hz = 16000;

    std::size_t size() const { return samples.size(); }

    void validate() const {
        if (samples.empty()) throw DomainError("waveform: samples empty");
        if (sample_rate_hz <= 0) throw DomainError("waveform: sample rate must be positive");
        for (double s : samples)
            if (!std::isfinite(s)) throw NumericError("waveform: non-finite sample");
    }

    double duration_seconds() const {
        return static_cast<double>(samples.size()) / sample_rate_hz;
    }
};

enum class Label : int { Real = 0, Fake = 1 };
enum class Split : int { Train = 0, Test = 1 };

inline const char* label_name(Label l) { return l == Label::Real ? "real" : "fake"; }
inline const char* split_name(Split s) { return s == Split::Train ? "train" : "test"; }

struct LabeledClip {
    Waveform waveform;
    Label label = Label::Real;
    std::string source_id;
    Split split = Split::Train;
};

struct ManifestEntry {
    std::string path;  // relative to the manifest's directory
    Label label = Label::Real;
    Split split = Split::Train;
    std::string source_id;
};

struct Manifest {
    std::vector<ManifestEntry> entries;
};

inline double rms(const std::vector<double>& x) {
    if (x.empty()) return 0.0;
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return std::sqrt(acc / static_cast<double>(x.size()));
}

inline double energy(const std::vector<double>& x) {
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return acc;
}

}  // namespace fsat
