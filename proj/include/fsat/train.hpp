#pragma once

#include <filesystem>
#include <optional>
#include <span>

#include "fsat/attack.hpp"
#include "fsat/classifier.hpp"
#include "fsat/randaugment.hpp"

namespace fsat {

struct TrainConfig {
    double gamma = 0.0;  // robust-loss weight; 0 disables the inner attack
    double lr = 0.01;
    double momentum = 0.9;
    int epochs = 30;
    int batch_size = 16;
    std::optional<AugmentPolicy> augment;
    std::optional<AttackConfig> attack;  // inner maximization, required when gamma > 0
    std::uint64_t seed = 0;
    int checkpoint_every = 0;  // epochs between periodic checkpoints; 0 = off
    Precision precision = Precision::F64;
    int threads = 1;

    void validate() const {
        if (gamma < 0.0) throw ConfigError("train: gamma must be non-negative");
        if (gamma > 0.0 && !attack) throw ConfigError("train: gamma > 0 requires an attack config");
        if (lr <= 0.0) throw ConfigError("train: lr must be positive");
        if (momentum < 0.0 || momentum >= 1.0) throw ConfigError("train: momentum must be in [0, 1)");
        if (epochs < 1) throw ConfigError("train: need at least one epoch");
        if (batch_size < 1) throw ConfigError("train: batch size must be positive");
        if (checkpoint_every < 0) throw ConfigError("train: checkpoint_every must be non-negative");
        if (augment) augment->validate();
        if (attack) attack->validate();
    }
};

struct EpochRecord {
    double loss_clean = 0.0;
    double loss_robust = 0.0;
    double loss_total = 0.0;  // always loss_clean + gamma * loss_robust
    double train_accuracy = 0.0;
    double wall_seconds = 0.0;  // in-memory only; never serialized
};

struct TrainHistory {
    std::vector<EpochRecord> records;
};

struct TrainResult {
    ClassifierParams params;
    TrainHistory history;
};

// Clean + robust mini-batch SGD. Per batch: optional RandAugment, clean loss,
// inner attack against the live parameters when gamma > 0, one SGD step on
// L_clean + gamma * L_robust. Deterministic given the config seed at any
// thread count (per-clip work is independent; reductions run in index order).
// resume_from continues epoch counting toward cfg.epochs (velocity restarts).
TrainResult train(std::span<const LabeledClip> clips, const TrainConfig& cfg,
                  const TrainResult* resume_from = nullptr,
                  const std::filesystem::path* checkpoint_path = nullptr);

// Versioned little-endian binary: shapes, weights (f64 or f32 per the
// precision tag), training seed and history (deterministic fields only),
// guarded by a checksum. Load rejects shape or checksum mismatches;
// allow_widen turns an F32 checkpoint into F64 evaluation params.
void save_checkpoint(const ClassifierParams& params, const TrainHistory& history,
                     const std::filesystem::path& path, std::uint64_t seed = 0);
struct Checkpoint {
    ClassifierParams params;
    TrainHistory history;
    std::uint64_t seed = 0;
};
Checkpoint load_checkpoint(const std::filesystem::path& path, bool allow_widen = false);

}  // namespace fsat
