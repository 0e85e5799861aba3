#include "fsat/evaluate.hpp"

#include <fstream>

#include <json.hpp>

#include "fsat/filters.hpp"
#include "fsat/parallel.hpp"
#include "fsat/rng.hpp"

namespace fsat {

namespace {

constexpr std::uint64_t kCorruptStream = 0xC0A7u;

int score_bin(double score) {
    const int b = static_cast<int>(score * 20.0);
    return std::clamp(b, 0, 19);
}

template <class Transform>
EvalReport evaluate_transformed(const ClassifierParams& params, std::span<const LabeledClip> clips,
                                double threshold, const std::string& condition, int threads,
                                Transform&& transform) {
    if (clips.empty()) throw DomainError("evaluate: empty dataset");
    std::vector<double> scores(clips.size());
    parallel_for(clips.size(), threads, [&](std::size_t i) {
        scores[i] = forward_score(params, transform(clips[i].waveform, i));
    });
    return report_from_scores(condition, clips, scores, threshold);
}

nlohmann::json report_to_json(const EvalReport& r) {
    nlohmann::json j;
    j["condition"] = r.condition;
    j["n_real"] = r.n_real;
    j["n_fake"] = r.n_fake;
    j["acc_real"] = r.acc_real ? nlohmann::json(*r.acc_real) : nlohmann::json(nullptr);
    j["acc_fake"] = r.acc_fake ? nlohmann::json(*r.acc_fake) : nlohmann::json(nullptr);
    j["acc_avg"] = r.acc_avg;
    j["hist_real"] = r.hist_real;
    j["hist_fake"] = r.hist_fake;
    return j;
}

void write_text(const std::filesystem::path& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!f) throw IoError("short write to " + path.string());
}

}  // namespace

EvalReport report_from_scores(const std::string& condition, std::span<const LabeledClip> clips,
                              std::span<const double> scores, double threshold) {
    EvalReport rep;
    rep.condition = condition;
    int correct_real = 0, correct_fake = 0;
    for (std::size_t i = 0; i < clips.size(); ++i) {
        const double s = scores[i];
        const bool predicted_fake = s >= threshold;
        if (clips[i].label == Label::Real) {
            ++rep.n_real;
            ++rep.hist_real[score_bin(s)];
            if (!predicted_fake) ++correct_real;
        } else {
            ++rep.n_fake;
            ++rep.hist_fake[score_bin(s)];
            if (predicted_fake) ++correct_fake;
        }
    }
    if (rep.n_real > 0) rep.acc_real = static_cast<double>(correct_real) / rep.n_real;
    if (rep.n_fake > 0) rep.acc_fake = static_cast<double>(correct_fake) / rep.n_fake;
    if (rep.acc_real && rep.acc_fake)
        rep.acc_avg = (*rep.acc_real + *rep.acc_fake) / 2.0;
    else
        rep.acc_avg = rep.acc_real.value_or(rep.acc_fake.value_or(0.0));
    return rep;
}

EvalReport evaluate(const ClassifierParams& params, std::span<const LabeledClip> clips,
                    double threshold, const std::string& condition, int threads) {
    return evaluate_transformed(params, clips, threshold, condition, threads,
                                [](const Waveform& w, std::size_t) -> const Waveform& { return w; });
}

std::vector<EvalReport> corruption_sweep(const ClassifierParams& params,
                                         std::span<const LabeledClip> clips,
                                         std::span<const std::pair<CorruptionKind, double>> ops,
                                         std::uint64_t seed, double threshold, int threads) {
    std::vector<EvalReport> reports;
    reports.reserve(ops.size());
    for (std::size_t op_idx = 0; op_idx < ops.size(); ++op_idx) {
        const auto& [kind, magnitude] = ops[op_idx];
        const std::string condition =
            std::string("corrupt:") + corruption_name(kind) + ":" + std::to_string(magnitude);
        reports.push_back(evaluate_transformed(
            params, clips, threshold, condition, threads, [&](const Waveform& w, std::size_t i) {
                Rng rng(hash_seed({seed, kCorruptStream, op_idx, i}));
                return apply_corruption(w, kind, magnitude, rng);
            }));
    }
    return reports;
}

std::vector<std::pair<double, EvalReport>> highpass_sweep(const ClassifierParams& params,
                                                          std::span<const LabeledClip> clips,
                                                          std::span<const double> cutoffs_hz,
                                                          double threshold, int threads) {
    if (cutoffs_hz.empty()) throw DomainError("highpass_sweep: no cutoffs");
    for (std::size_t i = 0; i + 1 < cutoffs_hz.size(); ++i)
        if (!(cutoffs_hz[i] < cutoffs_hz[i + 1]))
            throw DomainError("highpass_sweep: cutoffs must be ascending");

    std::vector<std::pair<double, EvalReport>> out;
    for (double cutoff : cutoffs_hz) {
        const std::string condition = "highpass:" + std::to_string(cutoff);
        if (cutoff == 0.0) {
            out.emplace_back(cutoff, evaluate(params, clips, threshold, condition, threads));
            continue;
        }
        out.emplace_back(
            cutoff, evaluate_transformed(params, clips, threshold, condition, threads,
                                         [&](const Waveform& w, std::size_t) {
                                             return brickwall_filter(w, cutoff, FilterMode::Highpass);
                                         }));
    }
    return out;
}

EvalReport report_from_grid_row(const AttackGridRow& row) {
    EvalReport rep;
    rep.condition = row.condition;
    rep.n_real = row.n_real;
    rep.n_fake = row.n_fake;
    rep.acc_real = row.acc_real;
    rep.acc_fake = row.acc_fake;
    rep.acc_avg = row.acc_avg;
    for (double s : row.scores_real) ++rep.hist_real[score_bin(s)];
    for (double s : row.scores_fake) ++rep.hist_fake[score_bin(s)];
    return rep;
}

void score_histogram_export(std::span<const EvalReport> reports,
                            const std::filesystem::path& path) {
    nlohmann::json arr = nlohmann::json::array();
    for (const EvalReport& r : reports) {
        nlohmann::json j;
        j["condition"] = r.condition;
        j["hist_real"] = r.hist_real;
        j["hist_fake"] = r.hist_fake;
        arr.push_back(std::move(j));
    }
    write_text(path, arr.dump(2) + "\n");
}

void write_reports_jsonl(std::span<const EvalReport> reports, const std::filesystem::path& path) {
    std::string body;
    for (const EvalReport& r : reports) body += report_to_json(r).dump() + "\n";
    write_text(path, body);
}

void write_summary_json(std::span<const EvalReport> reports, const std::filesystem::path& path) {
    nlohmann::json arr = nlohmann::json::array();
    for (const EvalReport& r : reports) arr.push_back(report_to_json(r));
    write_text(path, arr.dump(2) + "\n");
}

}  // namespace fsat
