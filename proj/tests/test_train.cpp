#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "fsat/train.hpp"
#include "support/mini_model.hpp"
#include "support/oracles.hpp"

using namespace fsat;
namespace fs = std::filesystem;

namespace {

bool same_params(const ClassifierParams& a, const ClassifierParams& b) {
    return a.conv1_w == b.conv1_w && a.conv1_b == b.conv1_b && a.conv2_w == b.conv2_w &&
           a.conv2_b == b.conv2_b && a.head_w == b.head_w && a.head_b == b.head_b;
}

fs::path temp_file(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "fsat_train_test";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("gamma zero with one clip reduces to plain cross-entropy SGD") {
    auto clips = mini::corpus(1);
    clips.resize(1);

    TrainConfig tc;
    tc.gamma = 0.0;
    tc.lr = 0.05;
    tc.momentum = 0.9;
    tc.epochs = 5;
    tc.batch_size = 1;
    tc.seed = 3;
    const TrainResult res = train(clips, tc);

    // Reference loop: forward, backward, sgd_step.
    ClassifierParams ref = init_classifier(tc.seed);
    SgdState vel;
    for (int epoch = 0; epoch < tc.epochs; ++epoch) {
        const ForwardResult fr = forward(ref, clips[0].waveform);
        Gradients g = backward(ref, fr.trace, clips[0].label);
        g.d_input.clear();
        sgd_step(ref, g, tc.lr, tc.momentum, vel);
    }
    CHECK(same_params(res.params, ref));
    CHECK(res.history.records.size() == 5);
}

TEST_CASE("history keeps the exact total-loss identity") {
    const auto clips = mini::corpus(4);
    TrainConfig tc;
    tc.gamma = 0.3;
    tc.lr = 0.02;
    tc.epochs = 2;
    tc.batch_size = 4;
    tc.seed = 5;
    tc.threads = 2;
    AttackConfig atk;
    atk.domain = AttackDomain::FreqMagnitude;
    atk.epsilon = 0.01;
    atk.alpha = 0.04;
    atk.iterations = 1;
    atk.band = {4000.0, 8000.0};
    tc.attack = atk;

    const TrainResult res = train(clips, tc);
    for (const EpochRecord& r : res.history.records) {
        CHECK(r.loss_total == r.loss_clean + tc.gamma * r.loss_robust);
        CHECK(r.loss_robust > 0.0);
        CHECK(r.wall_seconds > 0.0);
    }
}

TEST_CASE("training is bit-reproducible and thread-count independent") {
    const auto clips = mini::corpus(6);
    TrainConfig tc;
    tc.lr = 0.02;
    tc.epochs = 3;
    tc.batch_size = 4;
    tc.seed = 7;

    tc.threads = 1;
    const TrainResult a = train(clips, tc);
    const TrainResult b = train(clips, tc);
    CHECK(same_params(a.params, b.params));

    tc.threads = 2;
    const TrainResult c = train(clips, tc);
    CHECK(same_params(a.params, c.params));
    for (std::size_t e = 0; e < a.history.records.size(); ++e) {
        CHECK(a.history.records[e].loss_clean == c.history.records[e].loss_clean);
        CHECK(a.history.records[e].train_accuracy == c.history.records[e].train_accuracy);
    }
}

TEST_CASE("augmented training stays deterministic") {
    const auto clips = mini::corpus(4);
    TrainConfig tc;
    tc.lr = 0.02;
    tc.epochs = 2;
    tc.batch_size = 4;
    tc.seed = 11;
    tc.augment = default_augment_policy(16000, 11);
    tc.threads = 2;
    const TrainResult a = train(clips, tc);
    const TrainResult b = train(clips, tc);
    CHECK(same_params(a.params, b.params));
}

TEST_CASE("a 16-clip probe overfits within 50 steps") {
    const auto clips = mini::corpus(8);  // 16 clips total
    TrainConfig tc;
    tc.lr = 0.05;
    tc.momentum = 0.9;
    tc.epochs = 50;  // batch = dataset, one step per epoch
    tc.batch_size = 16;
    tc.seed = 13;
    tc.threads = 2;
    const TrainResult res = train(clips, tc);
    const double initial = res.history.records.front().loss_clean;
    const double final_loss = res.history.records.back().loss_clean;
    CHECK(final_loss < 0.1 * initial);
}

TEST_CASE("non-finite losses abort with a diagnostic") {
    const auto clips = mini::corpus(2);
    TrainConfig tc;
    tc.lr = 1e18;
    tc.epochs = 10;
    tc.batch_size = 4;
    tc.seed = 17;
    CHECK_THROWS_AS(train(clips, tc), NumericError);
}

TEST_CASE("config validation") {
    TrainConfig tc;
    tc.gamma = -0.1;
    CHECK_THROWS_AS(tc.validate(), ConfigError);
    tc.gamma = 0.5;  // gamma > 0 without an attack
    CHECK_THROWS_AS(tc.validate(), ConfigError);
    tc.gamma = 0.0;
    tc.lr = 0.0;
    CHECK_THROWS_AS(tc.validate(), ConfigError);
    tc.lr = 0.01;
    tc.epochs = 0;
    CHECK_THROWS_AS(tc.validate(), ConfigError);
}

TEST_CASE("checkpoints round trip bit-exactly") {
    const ClassifierParams& params = mini::trained_baseline();
    TrainHistory history;
    history.records.push_back({0.5, 0.1, 0.51, 0.9, 1.25});
    history.records.push_back({0.4, 0.05, 0.405, 0.95, 1.5});

    const fs::path path = temp_file("roundtrip.ckpt");
    save_checkpoint(params, history, path, 777);
    const Checkpoint back = load_checkpoint(path);

    CHECK(same_params(back.params, params));
    CHECK(back.seed == 777);
    REQUIRE(back.history.records.size() == 2);
    CHECK(back.history.records[0].loss_clean == 0.5);
    CHECK(back.history.records[1].loss_total == 0.405);
    CHECK(back.history.records[1].wall_seconds == 0.0);  // timing never persists
}

TEST_CASE("corrupt or truncated checkpoints raise FormatError") {
    const fs::path path = temp_file("corrupt.ckpt");
    save_checkpoint(mini::trained_baseline(), TrainHistory{}, path, 1);

    SUBCASE("flipped byte") {
        std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(64);
        char c;
        f.seekg(64);
        f.read(&c, 1);
        c ^= 0x5a;
        f.seekp(64);
        f.write(&c, 1);
        f.close();
        CHECK_THROWS_AS(load_checkpoint(path), FormatError);
    }
    SUBCASE("truncation") {
        std::ifstream in(path, std::ios::binary);
        std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        in.close();
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
        out.close();
        CHECK_THROWS_AS(load_checkpoint(path), FormatError);
    }
    SUBCASE("garbage") {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << "definitely not a checkpoint";
        out.close();
        CHECK_THROWS_AS(load_checkpoint(path), FormatError);
    }
    SUBCASE("missing file") { CHECK_THROWS_AS(load_checkpoint(temp_file("nope.ckpt")), IoError); }
}

TEST_CASE("an F32 checkpoint widens into F64 evaluation only on request") {
    ClassifierParams p32 = init_classifier(19, Precision::F32);
    const fs::path path = temp_file("f32.ckpt");
    save_checkpoint(p32, TrainHistory{}, path, 2);

    const Checkpoint narrow = load_checkpoint(path, /*allow_widen=*/false);
    CHECK(narrow.params.precision == Precision::F32);

    const Checkpoint widened = load_checkpoint(path, /*allow_widen=*/true);
    CHECK(widened.params.precision == Precision::F64);
    for (std::size_t i = 0; i < p32.conv1_w.size(); ++i)
        CHECK(widened.params.conv1_w[i] ==
              doctest::Approx(p32.conv1_w[i]).epsilon(1e-6));
}

TEST_CASE("resume continues epoch counting") {
    const auto clips = mini::corpus(3);
    TrainConfig tc;
    tc.lr = 0.02;
    tc.epochs = 2;
    tc.batch_size = 4;
    tc.seed = 23;
    const TrainResult first = train(clips, tc);
    CHECK(first.history.records.size() == 2);

    tc.epochs = 5;
    const TrainResult resumed = train(clips, tc, &first);
    CHECK(resumed.history.records.size() == 5);
    CHECK(resumed.history.records[0].loss_clean == first.history.records[0].loss_clean);
}

TEST_CASE("periodic checkpoints are written during training") {
    const auto clips = mini::corpus(2);
    TrainConfig tc;
    tc.lr = 0.02;
    tc.epochs = 4;
    tc.batch_size = 4;
    tc.seed = 29;
    tc.checkpoint_every = 2;
    const fs::path path = temp_file("periodic.ckpt");
    fs::remove(path);
    train(clips, tc, nullptr, &path);
    CHECK(fs::exists(path));
    const Checkpoint ck = load_checkpoint(path);
    CHECK(ck.history.records.size() == 4);
}
