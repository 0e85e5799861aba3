#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>

#include "fsat/attack.hpp"
#include "fsat/classifier.hpp"
#include "fsat/corruption.hpp"

namespace fsat {

// Per-condition accuracy report. Accuracies are per class (macro average);
// an absent class leaves its accuracy unset and acc_avg falls back to the
// class that exists. Histograms are 20 uniform score bins over [0, 1].
struct EvalReport {
    std::string condition;
    int n_real = 0;
    int n_fake = 0;
    std::optional<double> acc_real;
    std::optional<double> acc_fake;
    double acc_avg = 0.0;
    std::array<int, 20> hist_real{};
    std::array<int, 20> hist_fake{};
};

// A clip is predicted fake iff score_fake >= threshold.
EvalReport evaluate(const ClassifierParams& params, std::span<const LabeledClip> clips,
                    double threshold = 0.5, const std::string& condition = "clean",
                    int threads = 1);

// Builds a report from precomputed scores aligned with clips.
EvalReport report_from_scores(const std::string& condition, std::span<const LabeledClip> clips,
                              std::span<const double> scores, double threshold);

// One report per (kind, magnitude), the corruption applied to every clip with
// per-clip streams derived from (seed, op index, clip index).
std::vector<EvalReport> corruption_sweep(const ClassifierParams& params,
                                         std::span<const LabeledClip> clips,
                                         std::span<const std::pair<CorruptionKind, double>> ops,
                                         std::uint64_t seed, double threshold = 0.5,
                                         int threads = 1);

// Brickwall high-pass diagnostic; a zero cutoff means no filtering. Cutoffs
// must be ascending and below Nyquist.
std::vector<std::pair<double, EvalReport>> highpass_sweep(const ClassifierParams& params,
                                                          std::span<const LabeledClip> clips,
                                                          std::span<const double> cutoffs_hz,
                                                          double threshold = 0.5, int threads = 1);

EvalReport report_from_grid_row(const AttackGridRow& row);

// Machine-readable per-condition per-class histograms (JSON array).
void score_histogram_export(std::span<const EvalReport> reports, const std::filesystem::path& path);

// One JSON object per line, fields: condition, n_real, n_fake, acc_real,
// acc_fake, acc_avg, hist_real[20], hist_fake[20]. Undefined accuracy is null.
void write_reports_jsonl(std::span<const EvalReport> reports, const std::filesystem::path& path);

// Same objects as a single JSON array.
void write_summary_json(std::span<const EvalReport> reports, const std::filesystem::path& path);

}  // namespace fsat
