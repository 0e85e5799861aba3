#pragma once

#include <cstdint>
#include <vector>

#include "fsat/corruption.hpp"

namespace fsat {

struct AugmentPolicy {
    std::vector<CorruptionOp> ops;
    int n_select = 2;        // transforms drawn per call, without replacement
    double apply_prob = 0.5; // chance each drawn transform actually runs
    std::uint64_t seed = 0;

    void validate() const {
        if (ops.empty()) throw ConfigError("augment policy: empty op list");
        if (n_select < 1 || n_select > static_cast<int>(ops.size()))
            throw ConfigError("augment policy: need 1 <= n_select <= #ops");
        if (apply_prob < 0.0 || apply_prob > 1.0)
            throw ConfigError("augment policy: apply_prob must be in [0, 1]");
        for (const auto& op : ops) op.validate();
    }
};

// The 14-op catalogue with default magnitude ranges; cutoffs respect the
// sample rate's Nyquist.
AugmentPolicy default_augment_policy(int sample_rate_hz, std::uint64_t seed);

// Draws n_select ops uniformly without replacement, applies each with
// probability apply_prob at a magnitude drawn uniformly from its range.
// Deterministic given (policy.seed, counter); callers pick a fresh counter
// per clip (e.g. epoch * dataset_size + index).
Waveform rand_augment(const Waveform& w, const AugmentPolicy& policy, std::uint64_t counter);

}  // namespace fsat
