#include "fsat/train.hpp"

#include <chrono>
#include <cstring>
#include <fstream>
#include <numeric>

#include "fsat/parallel.hpp"
#include "fsat/rng.hpp"

namespace fsat {

namespace {

constexpr std::uint64_t kShuffleStream = 0x5F1Eu;
constexpr std::uint64_t kAttackStream = 0xA7ACu;
constexpr char kMagic[8] = {'F', 'S', 'A', 'T', 'C', 'K', 'P', '1'};
constexpr std::uint32_t kVersion = 1;

struct ClipWork {
    double loss_clean = 0.0;
    double loss_robust = 0.0;
    bool correct = false;
    Gradients grad_clean;
    Gradients grad_robust;
};

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

template <class T>
void put_raw(std::string& out, const T& v) {
    const char* p = reinterpret_cast<const char*>(&v);
    out.append(p, sizeof(T));
}

template <class T>
T take_raw(const std::string& in, std::size_t& off) {
    if (off + sizeof(T) > in.size()) throw FormatError("checkpoint: truncated file");
    T v;
    std::memcpy(&v, in.data() + off, sizeof(T));
    off += sizeof(T);
    return v;
}

}  // namespace

TrainResult train(std::span<const LabeledClip> clips, const TrainConfig& cfg,
                  const TrainResult* resume_from, const std::filesystem::path* checkpoint_path) {
    cfg.validate();
    if (clips.empty()) throw DomainError("train: empty dataset");

    const int threads = resolve_threads(cfg.threads);
    TrainResult result;
    if (resume_from) {
        result = *resume_from;
        result.params.precision = cfg.precision;
    } else {
        result.params = init_classifier(cfg.seed, cfg.precision);
    }
    ClassifierParams& params = result.params;
    SgdState velocity;

    const std::size_t n = clips.size();
    const int start_epoch = static_cast<int>(result.history.records.size());
    for (int epoch = start_epoch; epoch < cfg.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();

        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng shuffle_rng(hash_seed({cfg.seed, kShuffleStream, static_cast<std::uint64_t>(epoch)}));
        for (std::size_t i = n; i > 1; --i)
            std::swap(order[i - 1], order[shuffle_rng.uniform_index(i)]);

        double sum_clean = 0.0, sum_robust = 0.0;
        std::size_t n_correct = 0;

        for (std::size_t batch_start = 0; batch_start < n; batch_start += cfg.batch_size) {
            const std::size_t batch_end = std::min(n, batch_start + cfg.batch_size);
            const std::size_t batch_n = batch_end - batch_start;
            std::vector<ClipWork> work(batch_n);

            parallel_for(batch_n, threads, [&](std::size_t b) {
                const std::size_t idx = order[batch_start + b];
                const LabeledClip& clip = clips[idx];
                ClipWork& out = work[b];

                Waveform x = clip.waveform;
                if (cfg.augment) {
                    const std::uint64_t counter =
                        static_cast<std::uint64_t>(epoch) * n + idx;
                    x = rand_augment(x, *cfg.augment, counter);
                }

                const ForwardResult fr = forward(params, x);
                out.loss_clean = loss_from_probs(fr.trace.probs, clip.label);
                const bool predicted_fake = fr.score_fake >= 0.5;
                out.correct = predicted_fake == (clip.label == Label::Fake);
                out.grad_clean = backward(params, fr.trace, clip.label);

                if (cfg.gamma > 0.0) {
                    const std::uint64_t atk_seed =
                        hash_seed({cfg.seed, kAttackStream, static_cast<std::uint64_t>(epoch), idx});
                    const AttackResult ar = run_attack(params, x, clip.label, *cfg.attack, atk_seed);
                    const ForwardResult fr2 = forward(params, ar.adversarial);
                    out.loss_robust = loss_from_probs(fr2.trace.probs, clip.label);
                    out.grad_robust = backward(params, fr2.trace, clip.label);
                }
            });

            Gradients total;
            total.init_zero();
            const double inv_b = 1.0 / static_cast<double>(batch_n);
            double batch_clean = 0.0, batch_robust = 0.0;
            for (const ClipWork& cw : work) {
                total.accumulate_params(cw.grad_clean, inv_b);
                if (cfg.gamma > 0.0) total.accumulate_params(cw.grad_robust, cfg.gamma * inv_b);
                batch_clean += cw.loss_clean;
                batch_robust += cw.loss_robust;
                if (cw.correct) ++n_correct;
            }
            if (!std::isfinite(batch_clean) || !std::isfinite(batch_robust) || !total.params_finite())
                throw NumericError("train: non-finite loss in epoch " + std::to_string(epoch) +
                                   ", batch starting at sample " + std::to_string(batch_start));
            sum_clean += batch_clean;
            sum_robust += batch_robust;
            sgd_step(params, total, cfg.lr, cfg.momentum, velocity);
        }

        EpochRecord rec;
        rec.loss_clean = sum_clean / static_cast<double>(n);
        rec.loss_robust = sum_robust / static_cast<double>(n);
        rec.loss_total = rec.loss_clean + cfg.gamma * rec.loss_robust;
        rec.train_accuracy = static_cast<double>(n_correct) / static_cast<double>(n);
        rec.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        result.history.records.push_back(rec);

        if (checkpoint_path && cfg.checkpoint_every > 0 && (epoch + 1) % cfg.checkpoint_every == 0)
            save_checkpoint(params, result.history, *checkpoint_path, cfg.seed);
    }
    return result;
}

void save_checkpoint(const ClassifierParams& params, const TrainHistory& history,
                     const std::filesystem::path& path, std::uint64_t seed) {
    params.validate();
    std::string out;
    out.append(kMagic, sizeof kMagic);
    put_raw(out, kVersion);
    put_raw(out, static_cast<std::uint32_t>(params.precision));
    put_raw(out, seed);

    using P = ClassifierParams;
    const std::uint32_t shape[] = {
        P::kConv1Out, 1,            P::kConv1Taps, P::kConv1Stride,
        P::kConv2Out, P::kConv1Out, P::kConv2Taps, P::kConv2Stride,
        P::kClasses,  P::kConv2Out,
    };
    put_raw(out, static_cast<std::uint32_t>(std::size(shape)));
    for (std::uint32_t s : shape) put_raw(out, s);

    auto put_tensor = [&](const std::vector<double>& v) {
        put_raw(out, static_cast<std::uint64_t>(v.size()));
        if (params.precision == Precision::F64) {
            for (double x : v) put_raw(out, x);
        } else {
            for (double x : v) put_raw(out, static_cast<float>(x));
        }
    };
    put_tensor(params.conv1_w);
    put_tensor(params.conv1_b);
    put_tensor(params.conv2_w);
    put_tensor(params.conv2_b);
    put_tensor(params.head_w);
    put_tensor(params.head_b);

    put_raw(out, static_cast<std::uint32_t>(history.records.size()));
    for (const EpochRecord& r : history.records) {
        put_raw(out, r.loss_clean);
        put_raw(out, r.loss_robust);
        put_raw(out, r.loss_total);
        put_raw(out, r.train_accuracy);
        // wall_seconds intentionally not serialized: checkpoints must be
        // byte-identical across reruns of the same seed.
    }
    put_raw(out, fnv1a(out));

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("save_checkpoint: cannot open " + path.string());
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("save_checkpoint: short write to " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path, bool allow_widen) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("load_checkpoint: cannot open " + path.string());
    std::string in((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

    if (in.size() < sizeof kMagic + 8 || std::memcmp(in.data(), kMagic, sizeof kMagic) != 0)
        throw FormatError("load_checkpoint: bad magic in " + path.string());
    const std::uint64_t stored_sum = [&] {
        std::size_t off = in.size() - 8;
        return take_raw<std::uint64_t>(in, off);
    }();
    if (fnv1a(in.substr(0, in.size() - 8)) != stored_sum)
        throw FormatError("load_checkpoint: checksum mismatch (corrupt file)");

    std::size_t off = sizeof kMagic;
    const auto version = take_raw<std::uint32_t>(in, off);
    if (version != kVersion)
        throw FormatError("load_checkpoint: unsupported version " + std::to_string(version));
    const auto precision_tag = take_raw<std::uint32_t>(in, off);
    if (precision_tag > 1) throw FormatError("load_checkpoint: bad precision tag");
    const Precision precision = static_cast<Precision>(precision_tag);
    const auto seed = take_raw<std::uint64_t>(in, off);

    using P = ClassifierParams;
    const std::uint32_t expect_shape[] = {
        P::kConv1Out, 1,            P::kConv1Taps, P::kConv1Stride,
        P::kConv2Out, P::kConv1Out, P::kConv2Taps, P::kConv2Stride,
        P::kClasses,  P::kConv2Out,
    };
    const auto n_shape = take_raw<std::uint32_t>(in, off);
    if (n_shape != std::size(expect_shape))
        throw FormatError("load_checkpoint: shape table size mismatch");
    for (std::uint32_t expected : expect_shape)
        if (take_raw<std::uint32_t>(in, off) != expected)
            throw FormatError("load_checkpoint: architecture shape mismatch");

    Checkpoint ck;
    ck.seed = seed;
    ck.params.precision = precision;
    auto take_tensor = [&](std::vector<double>& v, std::size_t expect) {
        const auto count = take_raw<std::uint64_t>(in, off);
        if (count != expect) throw FormatError("load_checkpoint: tensor size mismatch");
        v.resize(count);
        for (auto& x : v)
            x = precision == Precision::F64 ? take_raw<double>(in, off)
                                            : static_cast<double>(take_raw<float>(in, off));
    };
    take_tensor(ck.params.conv1_w, static_cast<std::size_t>(P::kConv1Out) * P::kConv1Taps);
    take_tensor(ck.params.conv1_b, P::kConv1Out);
    take_tensor(ck.params.conv2_w, static_cast<std::size_t>(P::kConv2Out) * P::kConv1Out * P::kConv2Taps);
    take_tensor(ck.params.conv2_b, P::kConv2Out);
    take_tensor(ck.params.head_w, static_cast<std::size_t>(P::kClasses) * P::kConv2Out);
    take_tensor(ck.params.head_b, P::kClasses);

    const auto n_records = take_raw<std::uint32_t>(in, off);
    ck.history.records.resize(n_records);
    for (auto& r : ck.history.records) {
        r.loss_clean = take_raw<double>(in, off);
        r.loss_robust = take_raw<double>(in, off);
        r.loss_total = take_raw<double>(in, off);
        r.train_accuracy = take_raw<double>(in, off);
        r.wall_seconds = 0.0;
    }
    if (off + 8 != in.size()) throw FormatError("load_checkpoint: trailing bytes");

    if (allow_widen && precision == Precision::F32) ck.params.precision = Precision::F64;
    ck.params.validate();
    return ck;
}

}  // namespace fsat
