// fsat: frequency-selective adversarial training toolkit for audio deepfake
// detectors. Subcommands: gen-data, train, eval, attack, corrupt,
// sweep-highpass. Exit codes: 0 ok, 1 I/O error, 2 config/validation error,
// 3 numerical failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "fsat/config.hpp"
#include "fsat/evaluate.hpp"
#include "fsat/parallel.hpp"
#include "fsat/synth.hpp"
#include "fsat/train.hpp"
#include "fsat/wav_io.hpp"

namespace fs = std::filesystem;
using namespace fsat;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::string seed_override;
    std::string threads_override;
    bool resume = false;
};

struct Run {
    ConfigMap cfg = ConfigMap::empty();
    fs::path out;
    std::uint64_t seed = 0;
    int threads = 1;
};

Run begin_run(const CommonArgs& args) {
    Run run;
    run.cfg = ConfigMap::load(args.config_path);
    if (!args.seed_override.empty()) run.cfg.set("seed", args.seed_override);
    if (!args.threads_override.empty()) run.cfg.set("threads", args.threads_override);
    run.seed = run.cfg.get_uint64("seed", 42);
    run.threads = resolve_threads(run.cfg.get_int("threads", 1));

    run.out = fs::path(args.out_dir);
    std::error_code ec;
    fs::create_directories(run.out, ec);
    if (ec || !fs::is_directory(run.out))
        throw IoError("cannot create output directory " + run.out.string());
    return run;
}

void finish_run(Run& run) {
    run.cfg.reject_unknown_keys();
    run.cfg.dump_effective(run.out / "effective_config.txt");
}

StftConfig stft_from_config(Run& run, int sample_rate_hz) {
    StftConfig stft;
    stft.n_fft = run.cfg.get_int("stft.n_fft", 512);
    stft.hop = run.cfg.get_int("stft.hop", 128);
    stft.sample_rate_hz = sample_rate_hz;
    stft.validate();
    return stft;
}

AugmentPolicy augment_from_config(Run& run, int sample_rate_hz) {
    AugmentPolicy policy = default_augment_policy(sample_rate_hz, run.seed);
    const std::vector<std::string> ops = run.cfg.get_list("augment.ops");
    if (!ops.empty()) {
        policy.ops.clear();
        for (const std::string& spec : ops) {
            const std::vector<std::string> parts = split_list(spec, ':');
            if (parts.size() != 3)
                throw ConfigError("augment.ops entry '" + spec + "': expected kind:lo:hi");
            CorruptionOp op;
            op.kind = corruption_from_name(parts[0]);
            op.lo = std::stod(parts[1]);
            op.hi = std::stod(parts[2]);
            policy.ops.push_back(op);
        }
    }
    policy.n_select = run.cfg.get_int("augment.n_select", 2);
    policy.apply_prob = run.cfg.get_double("augment.apply_prob", 0.5);
    policy.validate();
    return policy;
}

AttackConfig attack_from_config(Run& run, int sample_rate_hz) {
    AttackConfig atk;
    const std::string domain = run.cfg.get_string("attack.domain", "freq");
    if (domain == "time")
        atk.domain = AttackDomain::Time;
    else if (domain == "freq")
        atk.domain = AttackDomain::FreqMagnitude;
    else
        throw ConfigError("attack.domain must be 'time' or 'freq'");
    atk.epsilon = run.cfg.get_double("attack.epsilon", 0.01);
    atk.alpha = run.cfg.get_double("attack.alpha", 4.0 * atk.epsilon);
    atk.iterations = run.cfg.get_int("attack.iterations", 2);
    atk.restarts = run.cfg.get_int("attack.restarts", 1);
    atk.random_init = run.cfg.get_bool("attack.random_init", false);
    atk.stft = stft_from_config(run, sample_rate_hz);
    atk.band.low_hz = run.cfg.get_double("attack.band_low_hz", 4000.0);
    atk.band.high_hz = run.cfg.get_double("attack.band_high_hz", sample_rate_hz / 2.0);
    atk.validate();
    return atk;
}

struct Dataset {
    Manifest manifest;
    fs::path root;
    std::vector<LabeledClip> clips;
};

Dataset load_dataset(Run& run, const std::string& split_default = "test") {
    const fs::path manifest_path = run.cfg.require_string("data.manifest");
    if (!fs::exists(manifest_path))
        throw ConfigError("data.manifest does not exist: " + manifest_path.string());
    Dataset ds;
    ds.manifest = load_manifest(manifest_path);
    ds.root = manifest_path.parent_path();
    const std::string split = run.cfg.get_string("eval.split", split_default);
    std::optional<Split> filter;
    if (split == "train")
        filter = Split::Train;
    else if (split == "test")
        filter = Split::Test;
    else if (split != "all")
        throw ConfigError("eval.split must be train, test or all");
    ds.clips = load_clips(ds.manifest, ds.root, filter);
    if (ds.clips.empty()) throw ConfigError("dataset split '" + split + "' is empty");
    return ds;
}

ClassifierParams load_eval_params(Run& run) {
    const fs::path ckpt = run.cfg.require_string("eval.checkpoint");
    if (!fs::exists(ckpt)) throw ConfigError("eval.checkpoint does not exist: " + ckpt.string());
    const bool widen = run.cfg.get_bool("eval.widen_f32", false);
    return load_checkpoint(ckpt, widen).params;
}

void write_report_files(Run& run, const std::vector<EvalReport>& reports) {
    write_reports_jsonl(reports, run.out / "reports.jsonl");
    write_summary_json(reports, run.out / "summary.json");
    score_histogram_export(reports, run.out / "histograms.json");
    for (const EvalReport& r : reports) {
        std::cout << r.condition << ": acc_real=";
        if (r.acc_real)
            std::cout << *r.acc_real;
        else
            std::cout << "n/a";
        std::cout << " acc_fake=";
        if (r.acc_fake)
            std::cout << *r.acc_fake;
        else
            std::cout << "n/a";
        std::cout << " acc_avg=" << r.acc_avg << "\n";
    }
}

int cmd_gen_data(const CommonArgs& args) {
    Run run = begin_run(args);
    SynthConfig synth;
    synth.n_real = run.cfg.get_int("synth.n_real", 1250);
    synth.n_fake = run.cfg.get_int("synth.n_fake", 1250);
    synth.clip_seconds = run.cfg.get_double("synth.clip_seconds", 1.0);
    synth.sample_rate_hz = run.cfg.get_int("synth.sample_rate_hz", 16000);
    synth.artifact_band.low_hz = run.cfg.get_double("synth.artifact_low_hz", 5500.0);
    synth.artifact_band.high_hz = run.cfg.get_double("synth.artifact_high_hz", 7500.0);
    synth.artifact_level_db = run.cfg.get_double("synth.artifact_level_db", -30.0);
    synth.seed = run.seed;
    synth.validate();
    const fs::path data_dir = run.cfg.get_string("data.dir", (run.out / "data").string());
    finish_run(run);

    gen_synthetic_corpus(synth, data_dir, run.threads);
    std::cout << (data_dir / "manifest.tsv").string() << "\n";
    return 0;
}

int cmd_train(const CommonArgs& args) {
    Run run = begin_run(args);
    Dataset ds = load_dataset(run, "train");
    const int sr = ds.clips.front().waveform.sample_rate_hz;

    TrainConfig tc;
    tc.gamma = run.cfg.get_double("train.gamma", 0.0);
    tc.lr = run.cfg.get_double("train.lr", 0.01);
    tc.momentum = run.cfg.get_double("train.momentum", 0.9);
    tc.epochs = run.cfg.get_int("train.epochs", 30);
    tc.batch_size = run.cfg.get_int("train.batch_size", 16);
    tc.checkpoint_every = run.cfg.get_int("train.checkpoint_every", 0);
    tc.seed = run.seed;
    tc.threads = run.threads;
    const std::string precision = run.cfg.get_string("train.precision", "f64");
    if (precision == "f32")
        tc.precision = Precision::F32;
    else if (precision != "f64")
        throw ConfigError("train.precision must be f64 or f32");
    if (run.cfg.get_bool("augment.enabled", false)) tc.augment = augment_from_config(run, sr);
    if (tc.gamma > 0.0) tc.attack = attack_from_config(run, sr);
    tc.validate();

    const fs::path ckpt_path = run.out / "model.ckpt";
    TrainResult resume_state;
    const TrainResult* resume_from = nullptr;
    if (args.resume) {
        if (!fs::exists(ckpt_path))
            throw ConfigError("--resume given but no checkpoint at " + ckpt_path.string());
        Checkpoint ck = load_checkpoint(ckpt_path);
        resume_state.params = std::move(ck.params);
        resume_state.history = std::move(ck.history);
        resume_from = &resume_state;
    }
    finish_run(run);

    const TrainResult res = train(ds.clips, tc, resume_from, &ckpt_path);
    save_checkpoint(res.params, res.history, ckpt_path, tc.seed);

    std::string history_text;
    char buf[256];
    for (std::size_t e = 0; e < res.history.records.size(); ++e) {
        const EpochRecord& r = res.history.records[e];
        std::snprintf(buf, sizeof buf, "%zu\t%.17g\t%.17g\t%.17g\t%.17g\n", e, r.loss_clean,
                      r.loss_robust, r.loss_total, r.train_accuracy);
        history_text += buf;
        std::cout << "epoch " << e << ": loss_total=" << r.loss_total
                  << " train_acc=" << r.train_accuracy << " (" << r.wall_seconds << "s)\n";
    }
    std::ofstream hist(run.out / "history.tsv", std::ios::binary | std::ios::trunc);
    if (!hist) throw IoError("cannot write history.tsv");
    hist << "epoch\tloss_clean\tloss_robust\tloss_total\ttrain_accuracy\n" << history_text;

    std::cout << ckpt_path.string() << "\n";
    return 0;
}

int cmd_eval(const CommonArgs& args) {
    Run run = begin_run(args);
    Dataset ds = load_dataset(run);
    ClassifierParams params = load_eval_params(run);
    const double threshold = run.cfg.get_double("eval.threshold", 0.5);
    finish_run(run);

    const EvalReport rep = evaluate(params, ds.clips, threshold, "clean", run.threads);
    write_report_files(run, {rep});
    return 0;
}

int cmd_attack(const CommonArgs& args) {
    Run run = begin_run(args);
    Dataset ds = load_dataset(run);
    ClassifierParams params = load_eval_params(run);
    const double threshold = run.cfg.get_double("eval.threshold", 0.5);
    const int sr = ds.clips.front().waveform.sample_rate_hz;

    std::vector<AttackGridEntry> entries;
    std::vector<std::unique_ptr<ClassifierParams>> source_params;
    const std::string grid = run.cfg.get_string("attack.grid", "");
    if (grid.empty()) {
        AttackGridEntry e;
        e.cfg = attack_from_config(run, sr);
        const bool time = e.cfg.domain == AttackDomain::Time;
        e.condition = std::string("attack:") + (time ? "time" : "freq") +
                      ":eps=" + std::to_string(e.cfg.epsilon) +
                      ":iters" + std::to_string(e.cfg.iterations) + ":restarts" +
                      std::to_string(e.cfg.restarts);
        entries.push_back(std::move(e));
    } else if (grid == "table5") {
        const double eps_time = run.cfg.get_double("attack.eps_time", 1e-4);
        const double alpha_time = run.cfg.get_double("attack.alpha_time", 4e-5);
        const double eps_freq = run.cfg.get_double("attack.eps_freq", 1e-4);
        const double alpha_freq = run.cfg.get_double("attack.alpha_freq", 4e-4);

        std::vector<std::pair<int, int>> iters_restarts;
        std::vector<std::string> ir = run.cfg.get_list("attack.grid_iters_restarts");
        if (ir.empty()) ir = {"2:1", "5:1", "5:2"};
        for (const std::string& spec : ir) {
            const auto parts = split_list(spec, ':');
            if (parts.size() != 2)
                throw ConfigError("attack.grid_iters_restarts entry '" + spec + "': expected K:R");
            iters_restarts.emplace_back(std::stoi(parts[0]), std::stoi(parts[1]));
        }

        std::vector<std::pair<std::string, const ClassifierParams*>> sources;
        for (const std::string& spec : run.cfg.get_list("attack.sources")) {
            const auto eq = spec.find('=');
            if (eq == std::string::npos)
                throw ConfigError("attack.sources entry '" + spec + "': expected label=checkpoint");
            const std::string label = spec.substr(0, eq);
            const fs::path path = spec.substr(eq + 1);
            if (!fs::exists(path))
                throw ConfigError("attack source checkpoint does not exist: " + path.string());
            source_params.push_back(std::make_unique<ClassifierParams>(load_checkpoint(path).params));
            sources.emplace_back(label, source_params.back().get());
        }
        if (sources.empty()) sources.emplace_back("A", nullptr);  // white-box against the defender

        entries = build_table5_grid(stft_from_config(run, sr), eps_time, alpha_time, eps_freq,
                                    alpha_freq, iters_restarts, sources);
    } else {
        throw ConfigError("attack.grid must be empty or 'table5'");
    }
    finish_run(run);

    const std::vector<AttackGridRow> rows =
        attack_grid(params, ds.clips, entries, run.seed, threshold, run.threads);
    std::vector<EvalReport> reports;
    reports.reserve(rows.size());
    for (const AttackGridRow& row : rows) reports.push_back(report_from_grid_row(row));
    write_report_files(run, reports);
    return 0;
}

int cmd_corrupt(const CommonArgs& args) {
    Run run = begin_run(args);
    Dataset ds = load_dataset(run);
    ClassifierParams params = load_eval_params(run);
    const double threshold = run.cfg.get_double("eval.threshold", 0.5);
    const bool write_wavs = run.cfg.get_bool("corrupt.write_wavs", true);

    std::vector<std::pair<CorruptionKind, double>> ops;
    for (const std::string& spec : run.cfg.get_list("corrupt.ops")) {
        const auto parts = split_list(spec, ':');
        if (parts.size() != 2)
            throw ConfigError("corrupt.ops entry '" + spec + "': expected kind:magnitude");
        ops.emplace_back(corruption_from_name(parts[0]), std::stod(parts[1]));
    }
    if (ops.empty()) throw ConfigError("corrupt.ops is empty");
    finish_run(run);

    std::vector<EvalReport> reports;
    for (std::size_t op_idx = 0; op_idx < ops.size(); ++op_idx) {
        const auto& [kind, magnitude] = ops[op_idx];
        std::vector<Waveform> corrupted(ds.clips.size());
        parallel_for(ds.clips.size(), run.threads, [&](std::size_t i) {
            Rng rng(hash_seed({run.seed, 0xC0A7u, op_idx, i}));
            corrupted[i] = apply_corruption(ds.clips[i].waveform, kind, magnitude, rng);
        });

        std::vector<double> scores(ds.clips.size());
        parallel_for(ds.clips.size(), run.threads,
                     [&](std::size_t i) { scores[i] = forward_score(params, corrupted[i]); });

        const std::string condition =
            std::string("corrupt:") + corruption_name(kind) + ":" + std::to_string(magnitude);
        reports.push_back(report_from_scores(condition, ds.clips, scores, threshold));

        if (write_wavs) {
            const fs::path dir = run.out / "corrupt" /
                                 (std::string(corruption_name(kind)) + "_" + std::to_string(magnitude));
            std::error_code ec;
            fs::create_directories(dir, ec);
            if (ec) throw IoError("cannot create " + dir.string());
            for (std::size_t i = 0; i < ds.clips.size(); ++i)
                write_wav(corrupted[i], dir / fs::path(ds.manifest.entries[i].path).filename());
        }
    }
    write_report_files(run, reports);
    return 0;
}

int cmd_sweep_highpass(const CommonArgs& args) {
    Run run = begin_run(args);
    Dataset ds = load_dataset(run);
    ClassifierParams params = load_eval_params(run);
    const double threshold = run.cfg.get_double("eval.threshold", 0.5);

    std::vector<double> cutoffs;
    for (const std::string& c : run.cfg.get_list("highpass.cutoffs")) cutoffs.push_back(std::stod(c));
    if (cutoffs.empty()) throw ConfigError("highpass.cutoffs is empty");
    finish_run(run);

    const auto swept = highpass_sweep(params, ds.clips, cutoffs, threshold, run.threads);
    std::vector<EvalReport> reports;
    for (const auto& [cutoff, rep] : swept) reports.push_back(rep);
    write_report_files(run, reports);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"frequency-selective adversarial training toolkit"};
    app.require_subcommand(1);

    CommonArgs args;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", args.config_path, "run configuration file")->required();
        sub->add_option("--out", args.out_dir, "output directory")->required();
        sub->add_option("--seed", args.seed_override, "override the config seed");
        sub->add_option("--threads", args.threads_override, "worker thread cap (1 = serial)");
        return sub;
    };

    CLI::App* gen = add_common(app.add_subcommand("gen-data", "generate the synthetic corpus"));
    CLI::App* tr = add_common(app.add_subcommand("train", "train a detector"));
    tr->add_flag("--resume", args.resume, "continue from the output checkpoint");
    CLI::App* ev = add_common(app.add_subcommand("eval", "evaluate a checkpoint"));
    CLI::App* atk = add_common(app.add_subcommand("attack", "attack evaluation (single or grid)"));
    CLI::App* cor = add_common(app.add_subcommand("corrupt", "corruption sweep, writes WAVs"));
    CLI::App* hp = add_common(app.add_subcommand("sweep-highpass", "high-pass diagnostic sweep"));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (gen->parsed()) return cmd_gen_data(args);
        if (tr->parsed()) return cmd_train(args);
        if (ev->parsed()) return cmd_eval(args);
        if (atk->parsed()) return cmd_attack(args);
        if (cor->parsed()) return cmd_corrupt(args);
        if (hp->parsed()) return cmd_sweep_highpass(args);
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 1;
    } catch (const NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
