#include "fsat/attack.hpp"

#include <algorithm>
#include <cmath>

#include "fsat/parallel.hpp"
#include "fsat/rng.hpp"

namespace fsat {

namespace {

constexpr std::uint64_t kRestartStream = 0xA77u;
constexpr std::uint64_t kGridStream = 0xC11Fu;

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

void check_projected(double norm, double epsilon) {
    if (norm > epsilon + 1e-12)
        throw ContractError("attack: projected delta escaped the epsilon ball");
}

struct BestCandidate {
    double loss = -1.0;
    int steps = 0;
    Waveform adversarial;
    double delta_norm = 0.0;
    Matrix delta_freq;
};

}  // namespace

AttackResult attack_time(const ClassifierParams& params, const Waveform& w, Label y,
                         const AttackConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    if (cfg.domain != AttackDomain::Time) throw ConfigError("attack_time: wrong domain");
    w.validate();

    const std::size_t n = w.samples.size();
    const double loss0 = loss(params, w, y);

    BestCandidate best;
    best.loss = loss0;
    best.adversarial = w;
    double max_norm_seen = 0.0;

    for (int r = 0; r < cfg.restarts; ++r) {
        Rng rng(hash_seed({seed, kRestartStream, static_cast<std::uint64_t>(r)}));
        std::vector<double> delta(n, 0.0);
        if (cfg.random_init || r > 0)
            for (auto& d : delta) d = rng.uniform(-cfg.epsilon, cfg.epsilon);

        Waveform adv = w;
        auto compose = [&]() {
            for (std::size_t i = 0; i < n; ++i)
                adv.samples[i] = std::clamp(w.samples[i] + delta[i], -1.0, 1.0);
        };
        compose();

        for (int step = 0;; ++step) {
            const ForwardResult fr = forward(params, adv);
            const double l = loss_from_probs(fr.trace.probs, y);
            if (!std::isfinite(l)) throw NumericError("attack_time: non-finite loss");
            if (l > best.loss) {
                best.loss = l;
                best.steps = step;
                best.adversarial = adv;
                double dn = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    dn = std::max(dn, std::abs(adv.samples[i] - w.samples[i]));
                best.delta_norm = dn;
            }
            if (step == cfg.iterations) break;

            const Gradients g = backward(params, fr.trace, y);
            double norm = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double gi = g.d_input[i];
                if (!std::isfinite(gi)) throw NumericError("attack_time: non-finite gradient");
                delta[i] = std::clamp(delta[i] + cfg.alpha * sign(gi), -cfg.epsilon, cfg.epsilon);
                norm = std::max(norm, std::abs(delta[i]));
            }
            check_projected(norm, cfg.epsilon);
            max_norm_seen = std::max(max_norm_seen, norm);
            compose();
        }
    }

    AttackResult res;
    res.adversarial = std::move(best.adversarial);
    res.delta_norm_inf = best.delta_norm;
    res.loss_before = loss0;
    res.loss_after = best.loss;
    res.iterate_of_max_loss = best.steps;
    res.max_delta_norm_seen = max_norm_seen;
    return res;
}

AttackResult attack_freq_selective(const ClassifierParams& params, const Waveform& w, Label y,
                                   const AttackConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    if (cfg.domain != AttackDomain::FreqMagnitude)
        throw ConfigError("attack_freq_selective: wrong domain");
    w.validate();
    if (cfg.stft.sample_rate_hz != w.sample_rate_hz)
        throw ConfigError("attack_freq_selective: stft sample rate does not match waveform");

    const ComplexSpectrogram spec = stft(w, cfg.stft);
    const BandMask mask = band_to_bins(cfg.band, cfg.stft);
    const std::size_t frames = spec.n_frames();
    const std::size_t bins = spec.n_bins();

    // Unit phasors and magnitudes of the original spectrogram, fixed for the
    // whole attack.
    std::vector<double> mag(frames * bins), cph(frames * bins), sph(frames * bins);
    for (std::size_t i = 0; i < frames * bins; ++i) {
        const std::complex<double> z = spec.bins.v[i];
        const double rho = std::abs(z);
        mag[i] = rho;
        if (rho > 0.0) {
            cph[i] = z.real() / rho;
            sph[i] = z.imag() / rho;
        } else {
            cph[i] = 1.0;
            sph[i] = 0.0;
        }
    }

    // delta = 0 candidate: the pure round trip.
    Waveform base = istft(spec);
    const double loss0 = loss(params, base, y);

    BestCandidate best;
    best.loss = loss0;
    best.adversarial = std::move(base);
    best.delta_freq = Matrix(frames, bins, 0.0);
    double max_norm_seen = 0.0;

    for (int r = 0; r < cfg.restarts; ++r) {
        Rng rng(hash_seed({seed, kRestartStream, static_cast<std::uint64_t>(r)}));
        Matrix delta(frames, bins, 0.0);
        if (cfg.random_init || r > 0)
            for (std::size_t t = 0; t < frames; ++t)
                for (int k = mask.lo_bin; k <= mask.hi_bin; ++k)
                    delta.at(t, static_cast<std::size_t>(k)) = rng.uniform(-cfg.epsilon, cfg.epsilon);

        for (int step = 0;; ++step) {
            const ComplexSpectrogram perturbed = compose_perturbed(spec, delta, /*clamp_nonneg=*/true);
            const Waveform adv = istft(perturbed);
            const ForwardResult fr = forward(params, adv);
            const double l = loss_from_probs(fr.trace.probs, y);
            if (!std::isfinite(l)) throw NumericError("attack_freq_selective: non-finite loss");
            if (l > best.loss) {
                best.loss = l;
                best.steps = step;
                best.adversarial = adv;
                best.delta_freq = delta;
                double dn = 0.0;
                for (double d : delta.v) dn = std::max(dn, std::abs(d));
                best.delta_norm = dn;
            }
            if (step == cfg.iterations) break;

            const Gradients g = backward(params, fr.trace, y);
            for (double gi : g.d_input)
                if (!std::isfinite(gi))
                    throw NumericError("attack_freq_selective: non-finite gradient");
            const ComplexMatrix adj = istft_adjoint(g.d_input, cfg.stft);

            double norm = 0.0;
            for (std::size_t t = 0; t < frames; ++t) {
                for (int kk = mask.lo_bin; kk <= mask.hi_bin; ++kk) {
                    const std::size_t k = static_cast<std::size_t>(kk);
                    const std::size_t i = t * bins + k;
                    // d x' / d delta is e^{j phi}; the clamp zeroes it where
                    // the perturbed magnitude went negative.
                    double gd = cph[i] * adj.v[i].real() + sph[i] * adj.v[i].imag();
                    if (mag[i] + delta.v[i] < 0.0) gd = 0.0;
                    delta.v[i] = std::clamp(delta.v[i] + cfg.alpha * sign(gd), -cfg.epsilon, cfg.epsilon);
                    norm = std::max(norm, std::abs(delta.v[i]));
                }
            }
            check_projected(norm, cfg.epsilon);
            max_norm_seen = std::max(max_norm_seen, norm);
        }
    }

    AttackResult res;
    res.adversarial = std::move(best.adversarial);
    res.delta_norm_inf = best.delta_norm;
    res.loss_before = loss0;
    res.loss_after = best.loss;
    res.iterate_of_max_loss = best.steps;
    res.max_delta_norm_seen = max_norm_seen;
    res.delta_freq = std::move(best.delta_freq);
    return res;
}

AttackResult run_attack(const ClassifierParams& params, const Waveform& w, Label y,
                        const AttackConfig& cfg, std::uint64_t seed) {
    return cfg.domain == AttackDomain::Time ? attack_time(params, w, y, cfg, seed)
                                            : attack_freq_selective(params, w, y, cfg, seed);
}

std::vector<AttackGridRow> attack_grid(const ClassifierParams& defender,
                                       std::span<const LabeledClip> clips,
                                       std::span<const AttackGridEntry> entries,
                                       std::uint64_t seed, double threshold, int threads) {
    if (clips.empty()) throw DomainError("attack_grid: empty dataset");
    if (entries.empty()) throw DomainError("attack_grid: empty grid");

    std::vector<AttackGridRow> rows;
    rows.reserve(entries.size());
    for (const AttackGridEntry& entry : entries) {
        entry.cfg.validate();
        const ClassifierParams& attacker = entry.attacker ? *entry.attacker : defender;

        struct ClipOutcome {
            bool ok = false;
            double score = 0.0;
        };
        std::vector<ClipOutcome> outcomes(clips.size());
        parallel_for(clips.size(), threads, [&](std::size_t i) {
            const LabeledClip& clip = clips[i];
            try {
                const std::uint64_t clip_seed = hash_seed({seed, kGridStream, i});
                const AttackResult ar = run_attack(attacker, clip.waveform, clip.label, entry.cfg, clip_seed);
                outcomes[i] = {true, forward_score(defender, ar.adversarial)};
            } catch (const Error&) {
                outcomes[i].ok = false;
            }
        });

        AttackGridRow row;
        row.condition = entry.condition;
        int correct_real = 0, correct_fake = 0;
        for (std::size_t i = 0; i < clips.size(); ++i) {
            if (!outcomes[i].ok) {
                ++row.n_errors;
                continue;
            }
            const double s = outcomes[i].score;
            const bool predicted_fake = s >= threshold;
            if (clips[i].label == Label::Real) {
                ++row.n_real;
                row.scores_real.push_back(s);
                if (!predicted_fake) ++correct_real;
            } else {
                ++row.n_fake;
                row.scores_fake.push_back(s);
                if (predicted_fake) ++correct_fake;
            }
        }
        if (row.n_real > 0) row.acc_real = static_cast<double>(correct_real) / row.n_real;
        if (row.n_fake > 0) row.acc_fake = static_cast<double>(correct_fake) / row.n_fake;
        if (row.acc_real && row.acc_fake)
            row.acc_avg = (*row.acc_real + *row.acc_fake) / 2.0;
        else
            row.acc_avg = row.acc_real.value_or(row.acc_fake.value_or(0.0));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<AttackGridEntry> build_table5_grid(
    const StftConfig& stft, double eps_time, double alpha_time, double eps_freq, double alpha_freq,
    std::span<const std::pair<int, int>> iters_restarts,
    std::span<const std::pair<std::string, const ClassifierParams*>> sources) {
    struct DomainSpec {
        const char* label;
        bool time;
        double lo, hi;
    };
    const double nyquist = stft.sample_rate_hz / 2.0;
    const DomainSpec domains[] = {
        {"time", true, 0.0, 0.0},
        {"freq0-8k", false, 0.0, std::min(8000.0, nyquist)},
        {"freq2-8k", false, 2000.0, std::min(8000.0, nyquist)},
        {"freq4-8k", false, 4000.0, std::min(8000.0, nyquist)},
        {"freq6-8k", false, 6000.0, std::min(8000.0, nyquist)},
    };

    std::vector<AttackGridEntry> entries;
    for (const DomainSpec& d : domains) {
        for (const auto& [iters, restarts] : iters_restarts) {
            for (const auto& [label, params] : sources) {
                AttackGridEntry e;
                e.cfg.domain = d.time ? AttackDomain::Time : AttackDomain::FreqMagnitude;
                e.cfg.epsilon = d.time ? eps_time : eps_freq;
                e.cfg.alpha = d.time ? alpha_time : alpha_freq;
                e.cfg.iterations = iters;
                e.cfg.restarts = restarts;
                e.cfg.stft = stft;
                if (!d.time) e.cfg.band = FrequencyBand{d.lo, d.hi};
                e.condition = std::string(d.label) + ":iters" + std::to_string(iters) + ":restarts" +
                              std::to_string(restarts) + ":src=" + label;
                e.attacker = params;
                entries.push_back(std::move(e));
            }
        }
    }
    return entries;
}

}  // namespace fsat
