#include <doctest.h>

#include "fsat/classifier.hpp"
#include "support/oracles.hpp"

using namespace fsat;

namespace {

// Central finite difference of the loss with respect to one entry of an
// arbitrary parameter vector.
double fd_param(ClassifierParams params, std::vector<double> ClassifierParams::* member,
                std::size_t idx, const Waveform& w, Label y, double h = 1e-6) {
    (params.*member)[idx] += h;
    const double up = loss(params, w, y);
    (params.*member)[idx] -= 2.0 * h;
    const double down = loss(params, w, y);
    return (up - down) / (2.0 * h);
}

void check_grad_block(const ClassifierParams& params,
                      std::vector<double> ClassifierParams::* member,
                      const std::vector<double>& analytic, const Waveform& w, Label y, Rng& rng,
                      int samples_per_block) {
    for (int s = 0; s < samples_per_block; ++s) {
        const std::size_t idx = rng.uniform_index(analytic.size());
        const double fd = fd_param(params, member, idx, w, y);
        const double denom = std::max({std::abs(fd), std::abs(analytic[idx]), 1e-6});
        CHECK(std::abs(analytic[idx] - fd) / denom < 1e-5);
    }
}

}  // namespace

TEST_CASE("init is deterministic with zero biases and the documented shape") {
    const ClassifierParams a = init_classifier(7);
    const ClassifierParams b = init_classifier(7);
    CHECK(a.conv1_w == b.conv1_w);
    CHECK(a.conv2_w == b.conv2_w);
    CHECK(a.head_w == b.head_w);

    CHECK(a.conv1_w.size() == 248);  // 8 filters x 1 channel x 31 taps
    CHECK(a.conv2_w.size() == 16 * 8 * 15);
    CHECK(a.head_w.size() == 32);
    for (double v : a.conv1_b) CHECK(v == 0.0);
    for (double v : a.conv2_b) CHECK(v == 0.0);
    for (double v : a.head_b) CHECK(v == 0.0);

    const ClassifierParams c = init_classifier(8);
    CHECK(a.conv1_w != c.conv1_w);
}

TEST_CASE("zero input with zero biases gives logits (0,0) and score 1/2") {
    const ClassifierParams params = init_classifier(3);
    Waveform w;
    w.sample_rate_hz = 16000;
    w.samples.assign(1600, 0.0);
    const ForwardResult fr = forward(params, w);
    CHECK(fr.logits[0] == 0.0);
    CHECK(fr.logits[1] == 0.0);
    CHECK(fr.score_fake == doctest::Approx(0.5));
    CHECK(fr.trace.probs[0] + fr.trace.probs[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("softmax outputs always sum to one") {
    const ClassifierParams params = init_classifier(4);
    for (int trial = 0; trial < 5; ++trial) {
        const Waveform w = oracles::random_waveform(500 + trial, 800);
        const ForwardResult fr = forward(params, w);
        CHECK(fr.trace.probs[0] + fr.trace.probs[1] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(fr.score_fake >= 0.0);
        CHECK(fr.score_fake <= 1.0);
    }
}

TEST_CASE("scaling the head pushes the score away from 1/2 monotonically") {
    ClassifierParams params = init_classifier(5);
    const Waveform w = oracles::random_waveform(501, 900);
    const double s1 = forward_score(params, w);
    for (auto& v : params.head_w) v *= 3.0;
    for (auto& v : params.head_b) v *= 3.0;
    const double s2 = forward_score(params, w);
    if (s1 >= 0.5) {
        CHECK(s2 >= s1);
    } else {
        CHECK(s2 <= s1);
    }
}

TEST_CASE("forward is pure and deterministic") {
    const ClassifierParams params = init_classifier(6);
    const Waveform w = oracles::random_waveform(502, 700);
    const ForwardResult a = forward(params, w);
    const ForwardResult b = forward(params, w);
    CHECK(a.logits[0] == b.logits[0]);
    CHECK(a.logits[1] == b.logits[1]);
    CHECK(a.score_fake == b.score_fake);
}

TEST_CASE("inputs shorter than the receptive field are rejected") {
    const ClassifierParams params = init_classifier(7);
    Waveform w;
    w.sample_rate_hz = 16000;
    w.samples.assign(150, 0.1);
    CHECK_THROWS_AS(forward(params, w), SizeError);
    w.samples.assign(151, 0.1);
    CHECK_NOTHROW(forward(params, w));
}

TEST_CASE("cross-entropy basics") {
    const ClassifierParams params = init_classifier(8);
    Waveform zero;
    zero.sample_rate_hz = 16000;
    zero.samples.assign(800, 0.0);
    CHECK(loss(params, zero, Label::Real) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(loss(params, zero, Label::Fake) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    SUBCASE("confident correct prediction drives the loss to zero") {
        ClassifierParams confident = init_classifier(8);
        confident.head_b[static_cast<int>(Label::Fake)] = 40.0;
        CHECK(loss(confident, zero, Label::Fake) < 1e-12);
        CHECK(loss(confident, zero, Label::Real) > 30.0);
    }

    SUBCASE("loss(REAL) + loss(FAKE) >= 2 ln 2 on random inputs") {
        for (int trial = 0; trial < 20; ++trial) {
            const Waveform w = oracles::random_waveform(600 + trial, 600);
            const double sum = loss(params, w, Label::Real) + loss(params, w, Label::Fake);
            CHECK(sum >= 2.0 * std::log(2.0) - 1e-12);
        }
    }
}

TEST_CASE("backward matches central finite differences everywhere") {
    Rng rng(31337);
    for (int trial = 0; trial < 4; ++trial) {
        const ClassifierParams params = init_classifier(100 + trial);
        const Waveform w = oracles::random_waveform(700 + trial, 400);
        const Label y = trial % 2 == 0 ? Label::Real : Label::Fake;

        const ForwardResult fr = forward(params, w);
        const Gradients g = backward(params, fr.trace, y);

        check_grad_block(params, &ClassifierParams::conv1_w, g.conv1_w, w, y, rng, 6);
        check_grad_block(params, &ClassifierParams::conv1_b, g.conv1_b, w, y, rng, 3);
        check_grad_block(params, &ClassifierParams::conv2_w, g.conv2_w, w, y, rng, 6);
        check_grad_block(params, &ClassifierParams::conv2_b, g.conv2_b, w, y, rng, 3);
        check_grad_block(params, &ClassifierParams::head_w, g.head_w, w, y, rng, 4);
        check_grad_block(params, &ClassifierParams::head_b, g.head_b, w, y, rng, 2);

        // Input gradient by the same oracle.
        for (int s = 0; s < 8; ++s) {
            const std::size_t idx = rng.uniform_index(w.samples.size());
            Waveform up = w, down = w;
            const double h = 1e-6;
            up.samples[idx] += h;
            down.samples[idx] -= h;
            const double fd = (loss(params, up, y) - loss(params, down, y)) / (2.0 * h);
            const double denom = std::max({std::abs(fd), std::abs(g.d_input[idx]), 1e-6});
            CHECK(std::abs(g.d_input[idx] - fd) / denom < 1e-5);
        }
    }
}

TEST_CASE("gradient vanishes at a one-parameter local minimum") {
    ClassifierParams params = init_classifier(9);
    const Waveform w = oracles::random_waveform(800, 600);
    const Label y = Label::Fake;
    const std::size_t idx = 5;

    // Ternary search along a single head weight.
    double lo = -30.0, hi = 30.0;
    auto value_at = [&](double v) {
        params.head_w[idx] = v;
        return loss(params, w, y);
    };
    for (int it = 0; it < 200; ++it) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        if (value_at(m1) < value_at(m2))
            hi = m2;
        else
            lo = m1;
    }
    params.head_w[idx] = (lo + hi) / 2.0;
    const ForwardResult fr = forward(params, w);
    const Gradients g = backward(params, fr.trace, y);
    CHECK(std::abs(g.head_w[idx]) < 1e-8);
}

TEST_CASE("sgd_step follows the momentum update rule") {
    SUBCASE("plain step") {
        ClassifierParams p = init_classifier(10);
        SgdState vel;
        Gradients g;
        g.init_zero();
        g.head_b[0] = 1.0;
        const double before = p.head_b[0];
        sgd_step(p, g, 0.1, 0.0, vel);
        CHECK(p.head_b[0] == doctest::Approx(before - 0.1).epsilon(1e-15));
    }
    SUBCASE("zero gradient leaves parameters bit-identical") {
        ClassifierParams p = init_classifier(11);
        const ClassifierParams copy = p;
        SgdState vel;
        Gradients g;
        g.init_zero();
        sgd_step(p, g, 0.1, 0.9, vel);
        CHECK(p.conv1_w == copy.conv1_w);
        CHECK(p.head_w == copy.head_w);
        CHECK(p.revision == copy.revision + 1);
    }
    SUBCASE("two momentum steps accumulate velocity") {
        ClassifierParams p = init_classifier(12);
        p.head_b[0] = 0.0;
        SgdState vel;
        Gradients g;
        g.init_zero();
        g.head_b[0] = 1.0;
        sgd_step(p, g, 1.0, 0.9, vel);
        CHECK(p.head_b[0] == doctest::Approx(-1.0).epsilon(1e-15));
        sgd_step(p, g, 1.0, 0.9, vel);
        CHECK(p.head_b[0] == doctest::Approx(-2.9).epsilon(1e-15));
    }
    SUBCASE("non-finite gradients abort") {
        ClassifierParams p = init_classifier(13);
        SgdState vel;
        Gradients g;
        g.init_zero();
        g.conv2_w[0] = std::numeric_limits<double>::infinity();
        CHECK_THROWS_AS(sgd_step(p, g, 0.1, 0.9, vel), NumericError);
    }
    SUBCASE("hyperparameter domain") {
        ClassifierParams p = init_classifier(14);
        SgdState vel;
        Gradients g;
        g.init_zero();
        CHECK_THROWS_AS(sgd_step(p, g, 0.0, 0.9, vel), DomainError);
        CHECK_THROWS_AS(sgd_step(p, g, 0.1, 1.0, vel), DomainError);
    }
}

TEST_CASE("stale traces are rejected") {
    ClassifierParams p = init_classifier(15);
    const Waveform w = oracles::random_waveform(801, 500);
    const ForwardResult fr = forward(p, w);
    SgdState vel;
    Gradients g;
    g.init_zero();
    sgd_step(p, g, 0.1, 0.0, vel);  // bumps the revision
    CHECK_THROWS_AS(backward(p, fr.trace, Label::Real), ContractError);
}

TEST_CASE("F32 path tracks F64 closely and round-trips its own precision") {
    ClassifierParams p64 = init_classifier(16, Precision::F64);
    ClassifierParams p32 = init_classifier(16, Precision::F32);
    const Waveform w = oracles::random_waveform(802, 1000);

    const double s64 = forward_score(p64, w);
    const double s32 = forward_score(p32, w);
    CHECK(s32 == doctest::Approx(s64).epsilon(1e-4));

    const ForwardResult fr = forward(p32, w);
    const Gradients g = backward(p32, fr.trace, Label::Fake);
    CHECK(g.params_finite());
    CHECK(g.d_input.size() == w.samples.size());
}
