#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "fsat/waveform.hpp"

namespace fsat {

enum class Precision : int { F64 = 0, F32 = 1 };

// Two strided 1-D convolutions, ReLU, global average pooling, linear head.
// Small enough to train on a desk, differentiable end to end including the
// input waveform.
struct ClassifierParams {
    static constexpr int kConv1Out = 8;
    static constexpr int kConv1Taps = 31;
    static constexpr int kConv1Stride = 4;
    static constexpr int kConv2Out = 16;
    static constexpr int kConv2Taps = 15;
    static constexpr int kConv2Stride = 4;
    static constexpr int kClasses = 2;
    // Documented minimum input length; anything at least this long yields a
    // non-empty pooled feature map.
    static constexpr int kMinInputSamples = 151;

    std::vector<double> conv1_w;  // [kConv1Out][kConv1Taps]
    std::vector<double> conv1_b;  // [kConv1Out]
    std::vector<double> conv2_w;  // [kConv2Out][kConv1Out][kConv2Taps]
    std::vector<double> conv2_b;  // [kConv2Out]
    std::vector<double> head_w;   // [kClasses][kConv2Out]
    std::vector<double> head_b;   // [kClasses]
    Precision precision = Precision::F64;
    std::uint64_t revision = 0;

    void validate() const;
    std::size_t weight_count() const;
};

// Zero-mean uniform weights scaled by 1/sqrt(fan_in); zero biases.
ClassifierParams init_classifier(std::uint64_t seed, Precision precision = Precision::F64);

struct ForwardTrace {
    std::vector<double> input;
    std::vector<double> h1;  // pre-activation, [kConv1Out][l1]
    std::vector<double> h2;  // pre-activation, [kConv2Out][l2]
    std::vector<double> pooled;
    std::array<double, 2> logits{};
    std::array<double, 2> probs{};
    std::size_t l1 = 0;
    std::size_t l2 = 0;
    Precision precision = Precision::F64;
    std::uint64_t params_revision = 0;
};

struct ForwardResult {
    std::array<double, 2> logits{};
    double score_fake = 0.5;
    ForwardTrace trace;
};

ForwardResult forward(const ClassifierParams& params, const Waveform& w);

// Score-only forward pass (no caches kept).
double forward_score(const ClassifierParams& params, const Waveform& w);

// Cross-entropy -log softmax(logits)[y].
double loss(const ClassifierParams& params, const Waveform& w, Label y);
double loss_from_probs(const std::array<double, 2>& probs, Label y);

struct Gradients {
    std::vector<double> conv1_w, conv1_b;
    std::vector<double> conv2_w, conv2_b;
    std::vector<double> head_w, head_b;
    std::vector<double> d_input;

    void init_zero();
    // this += other, parameter gradients only.
    void accumulate_params(const Gradients& other, double scale);
    bool params_finite() const;
};

// Exact gradients of the cross-entropy at the trace's (params, input) pair,
// with respect to every parameter and every input sample.
Gradients backward(const ClassifierParams& params, const ForwardTrace& trace, Label y);

struct SgdState {
    std::vector<double> conv1_w, conv1_b;
    std::vector<double> conv2_w, conv2_b;
    std::vector<double> head_w, head_b;

    void init_zero();
    bool empty() const { return conv1_w.empty(); }
};

// v <- momentum * v - lr * g; theta <- theta + v. Bumps params.revision.
void sgd_step(ClassifierParams& params, const Gradients& grads, double lr, double momentum,
              SgdState& velocity);

}  // namespace fsat
