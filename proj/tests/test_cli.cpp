#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

std::string g_cli;  // path to the fsat binary, from the last argv entry
fs::path g_work;

int run(const std::string& args) {
    const std::string cmd = g_cli + " " + args + " >" + (g_work / "stdout.txt").string() + " 2>" +
                            (g_work / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
}

void write_file(const fs::path& p, const std::string& body) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    f << body;
}

int count_lines(const fs::path& p) {
    std::ifstream f(p);
    std::string line;
    int n = 0;
    while (std::getline(f, line))
        if (!line.empty()) ++n;
    return n;
}

const std::string kGenConfig =
    "synth.n_real = 8\n"
    "synth.n_fake = 8\n"
    "synth.clip_seconds = 0.3\n"
    "synth.sample_rate_hz = 16000\n"
    "synth.artifact_low_hz = 5500\n"
    "synth.artifact_high_hz = 7500\n"
    "synth.artifact_level_db = -25\n";

fs::path data_dir() { return g_work / "data"; }
fs::path manifest_path() { return data_dir() / "manifest.tsv"; }
fs::path model_path() { return g_work / "train" / "model.ckpt"; }

void ensure_corpus() {
    if (fs::exists(manifest_path())) return;
    const fs::path cfg = g_work / "gen.cfg";
    write_file(cfg, kGenConfig + "data.dir = " + data_dir().string() + "\n");
    REQUIRE(run("gen-data --config " + cfg.string() + " --out " + (g_work / "gen").string() +
                " --seed 31") == 0);
}

void ensure_model() {
    if (fs::exists(model_path())) return;
    ensure_corpus();
    const fs::path cfg = g_work / "train.cfg";
    write_file(cfg, "data.manifest = " + manifest_path().string() +
                        "\n"
                        "eval.split = train\n"
                        "train.epochs = 6\n"
                        "train.lr = 0.02\n"
                        "train.batch_size = 8\n");
    REQUIRE(run("train --config " + cfg.string() + " --out " + (g_work / "train").string() +
                " --seed 31 --threads 2") == 0);
}

}  // namespace

TEST_CASE("gen-data produces a corpus, prints the manifest path, honors --seed") {
    ensure_corpus();
    CHECK(fs::exists(manifest_path()));
    CHECK(fs::exists(g_work / "gen" / "effective_config.txt"));

    // 8 real + 8 fake clips on disk.
    int wavs = 0;
    for (const auto& e : fs::directory_iterator(data_dir()))
        if (e.path().extension() == ".wav") ++wavs;
    CHECK(wavs == 16);

    // A different seed produces different audio bytes.
    const fs::path cfg2 = g_work / "gen2.cfg";
    write_file(cfg2, kGenConfig + "data.dir = " + (g_work / "data2").string() + "\n");
    REQUIRE(run("gen-data --config " + cfg2.string() + " --out " + (g_work / "gen2").string() +
                " --seed 32") == 0);
    CHECK(slurp(data_dir() / "real_00000.wav") != slurp(g_work / "data2" / "real_00000.wav"));
}

TEST_CASE("invalid configs exit with code 2") {
    const fs::path cfg = g_work / "bad.cfg";
    write_file(cfg, kGenConfig + "synth.clip_seconds = -1\n");
    CHECK(run("gen-data --config " + cfg.string() + " --out " + (g_work / "bad").string()) == 2);

    write_file(cfg, kGenConfig + "mystery.key = 1\n");
    CHECK(run("gen-data --config " + cfg.string() + " --out " + (g_work / "bad").string()) == 2);

    CHECK(run("gen-data --config " + (g_work / "missing.cfg").string() + " --out " +
              (g_work / "bad").string()) == 2);
}

TEST_CASE("I/O failures exit with code 1") {
    const fs::path blocker = g_work / "blocker";
    write_file(blocker, "a plain file");
    const fs::path cfg = g_work / "io.cfg";
    write_file(cfg, kGenConfig);
    CHECK(run("gen-data --config " + cfg.string() + " --out " + (blocker / "sub").string()) == 1);
}

TEST_CASE("train writes a checkpoint and per-epoch history") {
    ensure_model();
    CHECK(fs::exists(model_path()));
    const fs::path hist = g_work / "train" / "history.tsv";
    REQUIRE(fs::exists(hist));
    CHECK(count_lines(hist) == 7);  // header + 6 epochs

    SUBCASE("--resume continues toward the new epoch target") {
        const fs::path cfg = g_work / "resume.cfg";
        write_file(cfg, "data.manifest = " + manifest_path().string() +
                            "\n"
                            "eval.split = train\n"
                            "train.epochs = 8\n"
                            "train.lr = 0.02\n"
                            "train.batch_size = 8\n");
        REQUIRE(run("train --config " + cfg.string() + " --out " + (g_work / "train").string() +
                    " --seed 31 --threads 2 --resume") == 0);
        CHECK(count_lines(hist) == 9);
    }
}

TEST_CASE("invalid training configs exit with code 2") {
    ensure_corpus();
    const fs::path cfg = g_work / "badtrain.cfg";
    write_file(cfg, "data.manifest = " + manifest_path().string() +
                        "\n"
                        "train.gamma = -0.5\n");
    CHECK(run("train --config " + cfg.string() + " --out " + (g_work / "badtrain").string()) == 2);
}

TEST_CASE("numerical blowups exit with code 3") {
    ensure_corpus();
    const fs::path cfg = g_work / "blowup.cfg";
    write_file(cfg, "data.manifest = " + manifest_path().string() +
                        "\n"
                        "eval.split = train\n"
                        "train.epochs = 10\n"
                        "train.lr = 1e18\n");
    CHECK(run("train --config " + cfg.string() + " --out " + (g_work / "blowup").string()) == 3);
}

TEST_CASE("eval requires an existing checkpoint and writes reports") {
    ensure_model();
    const fs::path cfg = g_work / "eval.cfg";
    write_file(cfg, "data.manifest = " + manifest_path().string() +
                        "\n"
                        "eval.checkpoint = " +
                        (g_work / "nonexistent.ckpt").string() + "\n");
    CHECK(run("eval --config " + cfg.string() + " --out " + (g_work / "eval").string()) == 2);

    write_file(cfg, "data.manifest = " + manifest_path().string() +
                        "\n"
                        "eval.checkpoint = " +
                        model_path().string() + "\n");
    REQUIRE(run("eval --config " + cfg.string() + " --out " + (g_work / "eval").string()) == 0);
    CHECK(fs::exists(g_work / "eval" / "reports.jsonl"));
    CHECK(fs::exists(g_work / "eval" / "summary.json"));
    CHECK(fs::exists(g_work / "eval" / "histograms.json"));
    CHECK(count_lines(g_work / "eval" / "reports.jsonl") == 1);
}

TEST_CASE("single attack evaluation emits one report row") {
    ensure_model();
    const fs::path cfg = g_work / "attack1.cfg";
    write_file(cfg, "data.manifest = " + manifest_path().string() +
                        "\n"
                        "eval.checkpoint = " +
                        model_path().string() +
                        "\n"
                        "attack.domain = freq\n"
                        "attack.epsilon = 0.01\n"
                        "attack.iterations = 2\n"
                        "attack.band_low_hz = 4000\n"
                        "attack.band_high_hz = 8000\n");
    REQUIRE(run("attack --config " + cfg.string() + " --out " + (g_work / "attack1").string() +
                " --threads 2") == 0);
    CHECK(count_lines(g_work / "attack1" / "reports.jsonl") == 1);
}

TEST_CASE("a table-5 grid over three sources yields 45 report rows") {
    ensure_model();
    const fs::path cfg = g_work / "grid.cfg";
    write_file(cfg, "data.manifest = " + manifest_path().string() +
                        "\n"
                        "eval.checkpoint = " +
                        model_path().string() +
                        "\n"
                        "attack.grid = table5\n"
                        "attack.sources = A=" +
                        model_path().string() + ",A'=" + model_path().string() + ",B=" +
                        model_path().string() + "\n");
    REQUIRE(run("attack --config " + cfg.string() + " --out " + (g_work / "grid").string() +
                " --threads 2") == 0);
    const fs::path reports = g_work / "grid" / "reports.jsonl";
    REQUIRE(fs::exists(reports));
    CHECK(count_lines(reports) == 45);

    std::ifstream f(reports);
    std::string line;
    int freq_rows = 0, time_rows = 0;
    while (std::getline(f, line)) {
        const auto j = nlohmann::json::parse(line);
        const std::string cond = j["condition"];
        if (cond.rfind("time", 0) == 0) ++time_rows;
        if (cond.rfind("freq", 0) == 0) ++freq_rows;
    }
    CHECK(time_rows == 9);
    CHECK(freq_rows == 36);
}

TEST_CASE("corrupt writes perturbed WAVs alongside the report") {
    ensure_model();
    const fs::path cfg = g_work / "corrupt.cfg";
    write_file(cfg, "data.manifest = " + manifest_path().string() +
                        "\n"
                        "eval.checkpoint = " +
                        model_path().string() +
                        "\n"
                        "corrupt.ops = gain:3,bit_crush:6\n");
    REQUIRE(run("corrupt --config " + cfg.string() + " --out " + (g_work / "corrupt").string()) ==
            0);
    CHECK(count_lines(g_work / "corrupt" / "reports.jsonl") == 2);

    int wavs = 0;
    for (const auto& e : fs::recursive_directory_iterator(g_work / "corrupt" / "corrupt"))
        if (e.path().extension() == ".wav") ++wavs;
    CHECK(wavs == 8);  // 4 test clips x 2 ops
}

TEST_CASE("sweep-highpass emits one row per cutoff") {
    ensure_model();
    const fs::path cfg = g_work / "hp.cfg";
    write_file(cfg, "data.manifest = " + manifest_path().string() +
                        "\n"
                        "eval.checkpoint = " +
                        model_path().string() +
                        "\n"
                        "highpass.cutoffs = 0,1000,2000,3000,4000,5000,6000,7000\n");
    REQUIRE(run("sweep-highpass --config " + cfg.string() + " --out " + (g_work / "hp").string() +
                " --threads 2") == 0);
    CHECK(count_lines(g_work / "hp" / "reports.jsonl") == 8);
}

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: test_cli [doctest args] <path-to-fsat>\n");
        return 1;
    }
    g_cli = argv[argc - 1];
    g_work = fs::temp_directory_path() / "fsat_cli_test";
    fs::remove_all(g_work);
    fs::create_directories(g_work);

    doctest::Context ctx;
    ctx.applyCommandLine(argc - 1, argv);
    return ctx.run();
}
