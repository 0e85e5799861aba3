#include "fsat/synth.hpp"

#include <cmath>

#include "fsat/fft.hpp"
#include "fsat/filters.hpp"
#include "fsat/parallel.hpp"
#include "fsat/rng.hpp"
#include "fsat/wav_io.hpp"

namespace fsat {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kSpeechLowpassHz = 4000.0;
constexpr std::uint64_t kBaseStream = 0xBA5Eu;
constexpr std::uint64_t kArtifactStream = 0xFA4Eu;

std::size_t clip_samples(const SynthConfig& cfg) {
    return static_cast<std::size_t>(std::llround(cfg.clip_seconds * cfg.sample_rate_hz));
}

// White noise shaped towards 1/f below the lowpass, used as a speech-ish bed.
std::vector<double> pinkish_noise(Rng& rng, std::size_t n, int sample_rate_hz) {
    std::vector<cdouble> spec(n);
    for (std::size_t i = 0; i < n; ++i) spec[i] = cdouble{rng.gaussian(), 0.0};
    spec = fft(spec, false);
    const double bin_hz = static_cast<double>(sample_rate_hz) / static_cast<double>(n);
    for (std::size_t k = 0; k <= n / 2; ++k) {
        const double f = std::max(k * bin_hz, 50.0);
        const double scale = 1.0 / std::sqrt(f / 50.0);
        spec[k] *= scale;
        if (k != 0 && 2 * k != n) spec[n - k] *= scale;
    }
    spec = fft(spec, true);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = spec[i].real();
    return out;
}

std::vector<double> band_noise(Rng& rng, std::size_t n, const SynthConfig& cfg) {
    Waveform noise;
    noise.sample_rate_hz = cfg.sample_rate_hz;
    noise.samples.resize(n);
    for (auto& s : noise.samples) s = rng.gaussian();
    noise = brickwall_filter(noise, cfg.artifact_band.low_hz, FilterMode::Highpass);
    noise = brickwall_filter(noise, cfg.artifact_band.high_hz, FilterMode::Lowpass);
    return noise.samples;
}

}  // namespace

Waveform synth_base_clip(const SynthConfig& cfg, int index) {
    cfg.validate();
    const std::size_t n = clip_samples(cfg);
    Rng rng(hash_seed({cfg.seed, kBaseStream, static_cast<std::uint64_t>(index)}));

    const double f0 = rng.uniform(100.0, 400.0);
    const int harmonics = rng.uniform_int(3, 6);
    std::vector<double> x(n, 0.0);
    for (int h = 1; h <= harmonics; ++h) {
        const double amp = rng.uniform(0.4, 1.0) / h;
        const double phase = rng.uniform(0.0, 2.0 * kPi);
        const double w = 2.0 * kPi * f0 * h / cfg.sample_rate_hz;
        for (std::size_t i = 0; i < n; ++i) x[i] += amp * std::sin(w * i + phase);
    }

    const std::vector<double> noise = pinkish_noise(rng, n, cfg.sample_rate_hz);
    const double noise_gain = 0.05 * rms(x) / std::max(rms(noise), 1e-12);
    for (std::size_t i = 0; i < n; ++i) x[i] += noise_gain * noise[i];

    Waveform w;
    w.sample_rate_hz = cfg.sample_rate_hz;
    w.samples = std::move(x);
    w = brickwall_filter(w, kSpeechLowpassHz, FilterMode::Lowpass);

    double peak = 0.0;
    for (double s : w.samples) peak = std::max(peak, std::abs(s));
    const double gain = cfg.base_peak / std::max(peak, 1e-9);
    for (auto& s : w.samples) s *= gain;
    return w;
}

Waveform synth_fake_clip(const SynthConfig& cfg, int index) {
    Waveform w = synth_base_clip(cfg, index);
    const std::size_t n = w.samples.size();
    Rng rng(hash_seed({cfg.seed, kArtifactStream, static_cast<std::uint64_t>(index)}));

    std::vector<double> artifact = band_noise(rng, n, cfg);
    const double target_rms = rms(w.samples) * std::pow(10.0, cfg.artifact_level_db / 20.0);
    const double gain = target_rms / std::max(rms(artifact), 1e-12);
    for (std::size_t i = 0; i < n; ++i) w.samples[i] += gain * artifact[i];
    return w;
}

Manifest gen_synthetic_corpus(const SynthConfig& cfg, const std::filesystem::path& out_dir,
                              int threads) {
    cfg.validate();
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir))
        throw IoError("gen_synthetic_corpus: cannot create " + out_dir.string());

    struct Job {
        std::string name;
        Label label;
        int index;
    };
    std::vector<Job> jobs;
    jobs.reserve(static_cast<std::size_t>(cfg.n_real + cfg.n_fake));
    char buf[64];
    for (int i = 0; i < cfg.n_real; ++i) {
        std::snprintf(buf, sizeof buf, "real_%05d.wav", i);
        jobs.push_back({buf, Label::Real, i});
    }
    for (int i = 0; i < cfg.n_fake; ++i) {
        std::snprintf(buf, sizeof buf, "fake_%05d.wav", i);
        jobs.push_back({buf, Label::Fake, i});
    }

    parallel_for(jobs.size(), threads, [&](std::size_t j) {
        const Job& job = jobs[j];
        const Waveform w = job.label == Label::Real ? synth_base_clip(cfg, job.index)
                                                    : synth_fake_clip(cfg, job.index);
        write_wav(w, out_dir / job.name);
    });

    Manifest m;
    for (const Job& job : jobs) {
        const int class_total = job.label == Label::Real ? cfg.n_real : cfg.n_fake;
        const bool train = job.index < (class_total * 4) / 5;
        ManifestEntry e;
        e.path = job.name;
        e.label = job.label;
        e.split = train ? Split::Train : Split::Test;
        e.source_id = std::string("synth:") + label_name(job.label) + ":" + std::to_string(job.index);
        m.entries.push_back(std::move(e));
    }
    save_manifest(m, out_dir / "manifest.tsv");
    return m;
}

}  // namespace fsat
