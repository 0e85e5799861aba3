#include "fsat/randaugment.hpp"

#include <algorithm>
#include <numeric>

namespace fsat {

namespace {
constexpr std::uint64_t kAugmentStream = 0xA06u;
}

AugmentPolicy default_augment_policy(int sample_rate_hz, std::uint64_t seed) {
    const double nyquist = sample_rate_hz / 2.0;
    AugmentPolicy p;
    p.seed = seed;
    p.ops = {
        {CorruptionKind::GaussianNoise, 10.0, 40.0},
        {CorruptionKind::Lowpass, 1000.0, 0.95 * nyquist},
        {CorruptionKind::Highpass, 20.0, 2400.0},
        {CorruptionKind::PeakingEq, -12.0, 12.0},
        {CorruptionKind::SevenBandEq, 0.0, 12.0},
        {CorruptionKind::Aliasing, 2.0, 8.0},
        {CorruptionKind::BitCrush, 4.0, 12.0},
        {CorruptionKind::TanhDistortion, 1.0, 20.0},
        {CorruptionKind::Gain, -12.0, 12.0},
        {CorruptionKind::GainTransition, -24.0, 24.0},
        {CorruptionKind::TimeMask, 0.02, 0.2},
        {CorruptionKind::TimeStretch, 0.8, 1.25},
        {CorruptionKind::AirAbsorption, 5.0, 80.0},
        {CorruptionKind::RoomReverb, 0.1, 0.8},
    };
    return p;
}

Waveform rand_augment(const Waveform& w, const AugmentPolicy& policy, std::uint64_t counter) {
    policy.validate();
    w.validate();
    Rng rng(hash_seed({policy.seed, kAugmentStream, counter}));

    // Partial Fisher-Yates: the first n_select slots are the draw order.
    std::vector<std::size_t> order(policy.ops.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (int i = 0; i < policy.n_select; ++i) {
        const std::size_t j = i + rng.uniform_index(order.size() - i);
        std::swap(order[i], order[j]);
    }

    Waveform out = w;
    for (int i = 0; i < policy.n_select; ++i) {
        const CorruptionOp& op = policy.ops[order[i]];
        if (rng.uniform() >= policy.apply_prob) continue;
        const double magnitude = op.lo == op.hi ? op.lo : rng.uniform(op.lo, op.hi);
        out = apply_corruption(out, op.kind, magnitude, rng);
    }
    return out;
}

}  // namespace fsat
