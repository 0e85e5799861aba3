#pragma once

#include <optional>
#include <span>
#include <string>

#include "fsat/band.hpp"
#include "fsat/classifier.hpp"
#include "fsat/matrix.hpp"
#include "fsat/stft.hpp"

namespace fsat {

enum class AttackDomain { Time, FreqMagnitude };

struct AttackConfig {
    AttackDomain domain = AttackDomain::Time;
    double epsilon = 1e-4;  // L-inf budget; amplitude (time) or magnitude (freq) units
    double alpha = 4e-5;    // step size, same units
    int iterations = 2;
    int restarts = 1;
    bool random_init = false;
    FrequencyBand band;   // freq domain only
    StftConfig stft;      // freq domain only

    // epsilon 0 is allowed as the degenerate no-budget attack.
    void validate() const {
        if (epsilon < 0.0) throw ConfigError("attack: epsilon must be non-negative");
        if (alpha <= 0.0) throw ConfigError("attack: alpha must be positive");
        if (iterations < 1) throw ConfigError("attack: need at least one iteration");
        if (restarts < 1) throw ConfigError("attack: need at least one restart");
        if (domain == AttackDomain::FreqMagnitude) {
            stft.validate();
            band.validate(stft.sample_rate_hz);
        }
    }
};

struct AttackResult {
    Waveform adversarial;
    double delta_norm_inf = 0.0;  // time: max |x' - x|; freq: max |delta| over bins
    double loss_before = 0.0;     // loss of the unperturbed candidate
    double loss_after = 0.0;      // loss of the best iterate (>= loss_before)
    int iterate_of_max_loss = 0;  // gradient steps applied to the winner
    // Max projected ||delta||_inf seen after any iteration of any restart;
    // the constraint suite checks it never exceeds epsilon.
    double max_delta_norm_seen = 0.0;
    // Freq domain: the winning magnitude perturbation (already band-masked).
    Matrix delta_freq;
};

// Iterated signed-gradient PGD on raw samples, projected into the epsilon
// ball; x' is clamped to [-1, 1]. The returned iterate maximizes the loss
// over everything visited, including delta = 0.
AttackResult attack_time(const ClassifierParams& params, const Waveform& w, Label y,
                         const AttackConfig& cfg, std::uint64_t seed);

// Frequency-selective attack: perturbs STFT magnitudes inside the band only;
// phase and out-of-band bins always come from the original signal. Gradients
// reach delta through the ISTFT adjoint and the phase factor.
AttackResult attack_freq_selective(const ClassifierParams& params, const Waveform& w, Label y,
                                   const AttackConfig& cfg, std::uint64_t seed);

AttackResult run_attack(const ClassifierParams& params, const Waveform& w, Label y,
                        const AttackConfig& cfg, std::uint64_t seed);

struct AttackGridEntry {
    AttackConfig cfg;
    std::string condition;
    // Attack is generated against these params (surrogate/white-box source);
    // null means the defender itself.
    const ClassifierParams* attacker = nullptr;
};

struct AttackGridRow {
    std::string condition;
    int n_real = 0;
    int n_fake = 0;
    int n_errors = 0;
    std::optional<double> acc_real, acc_fake;
    double acc_avg = 0.0;
    std::vector<double> scores_real, scores_fake;  // defender scores on attacked clips
};

// Attacks every clip per entry and scores the defender on the results at the
// given threshold. Per-clip failures are recorded, not fatal. Per-clip seeds
// depend only on (seed, clip index) so restart counts nest across entries.
std::vector<AttackGridRow> attack_grid(const ClassifierParams& defender,
                                       std::span<const LabeledClip> clips,
                                       std::span<const AttackGridEntry> entries,
                                       std::uint64_t seed, double threshold = 0.5,
                                       int threads = 1);

// The paper-protocol grid shape: {time, 0-8k, 2-8k, 4-8k, 6-8k} x
// iterations/restarts pattern x sources. Source pointers index into
// `sources`; labels are "<domain>:iters<K>:restarts<R>:src=<label>".
std::vector<AttackGridEntry> build_table5_grid(
    const StftConfig& stft, double eps_time, double alpha_time, double eps_freq, double alpha_freq,
    std::span<const std::pair<int, int>> iters_restarts,
    std::span<const std::pair<std::string, const ClassifierParams*>> sources);

}  // namespace fsat
