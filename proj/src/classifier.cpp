#include "fsat/classifier.hpp"

#include <algorithm>
#include <cmath>

#include "fsat/rng.hpp"

namespace fsat {

namespace {

using P = ClassifierParams;

std::size_t conv_out_len(std::size_t in, int taps, int stride) {
    return (in - static_cast<std::size_t>(taps)) / static_cast<std::size_t>(stride) + 1;
}

template <class T>
struct Buffers {
    std::vector<T> conv1_w, conv1_b, conv2_w, conv2_b, head_w, head_b;
};

template <class T>
Buffers<T> to_buffers(const ClassifierParams& p) {
    Buffers<T> b;
    auto cast = [](const std::vector<double>& src, std::vector<T>& dst) {
        dst.assign(src.begin(), src.end());
    };
    cast(p.conv1_w, b.conv1_w);
    cast(p.conv1_b, b.conv1_b);
    cast(p.conv2_w, b.conv2_w);
    cast(p.conv2_b, b.conv2_b);
    cast(p.head_w, b.head_w);
    cast(p.head_b, b.head_b);
    return b;
}

template <class T>
void run_forward(const Buffers<T>& p, const std::vector<T>& x, std::vector<T>& h1,
                 std::vector<T>& h2, std::vector<T>& pooled, std::array<T, 2>& logits) {
    const std::size_t n = x.size();
    const std::size_t l1 = conv_out_len(n, P::kConv1Taps, P::kConv1Stride);
    const std::size_t l2 = conv_out_len(l1, P::kConv2Taps, P::kConv2Stride);

    h1.assign(P::kConv1Out * l1, T(0));
    for (int f = 0; f < P::kConv1Out; ++f) {
        const T* w = p.conv1_w.data() + f * P::kConv1Taps;
        const T bias = p.conv1_b[f];
        T* row = h1.data() + f * l1;
        for (std::size_t i = 0; i < l1; ++i) {
            const T* seg = x.data() + i * P::kConv1Stride;
            T acc = bias;
            for (int t = 0; t < P::kConv1Taps; ++t) acc += w[t] * seg[t];
            row[i] = acc;
        }
    }

    h2.assign(P::kConv2Out * l2, T(0));
    for (int g = 0; g < P::kConv2Out; ++g) {
        const T bias = p.conv2_b[g];
        T* row = h2.data() + g * l2;
        for (std::size_t j = 0; j < l2; ++j) row[j] = bias;
        for (int f = 0; f < P::kConv1Out; ++f) {
            const T* w = p.conv2_w.data() + (g * P::kConv1Out + f) * P::kConv2Taps;
            const T* a1_row = h1.data() + f * l1;
            for (std::size_t j = 0; j < l2; ++j) {
                const T* seg = a1_row + j * P::kConv2Stride;
                T acc = T(0);
                for (int t = 0; t < P::kConv2Taps; ++t) {
                    const T a = seg[t] > T(0) ? seg[t] : T(0);
                    acc += w[t] * a;
                }
                row[j] += acc;
            }
        }
    }

    pooled.assign(P::kConv2Out, T(0));
    const T inv_l2 = T(1) / static_cast<T>(l2);
    for (int g = 0; g < P::kConv2Out; ++g) {
        const T* row = h2.data() + g * l2;
        T acc = T(0);
        for (std::size_t j = 0; j < l2; ++j) acc += row[j] > T(0) ? row[j] : T(0);
        pooled[g] = acc * inv_l2;
    }

    for (int c = 0; c < P::kClasses; ++c) {
        T acc = p.head_b[c];
        const T* w = p.head_w.data() + c * P::kConv2Out;
        for (int g = 0; g < P::kConv2Out; ++g) acc += w[g] * pooled[g];
        logits[c] = acc;
    }
}

std::array<double, 2> softmax2(const std::array<double, 2>& logits) {
    const double m = std::max(logits[0], logits[1]);
    const double e0 = std::exp(logits[0] - m);
    const double e1 = std::exp(logits[1] - m);
    const double z = e0 + e1;
    return {e0 / z, e1 / z};
}

template <class T>
void run_backward(const Buffers<T>& p, const std::vector<T>& x, const std::vector<T>& h1,
                  const std::vector<T>& h2, const std::vector<T>& pooled,
                  const std::array<double, 2>& probs, Label y, Gradients& out) {
    const std::size_t n = x.size();
    const std::size_t l1 = conv_out_len(n, P::kConv1Taps, P::kConv1Stride);
    const std::size_t l2 = conv_out_len(l1, P::kConv2Taps, P::kConv2Stride);

    std::array<T, 2> dlogits{};
    for (int c = 0; c < P::kClasses; ++c)
        dlogits[c] = static_cast<T>(probs[c] - (static_cast<int>(y) == c ? 1.0 : 0.0));

    std::vector<T> dhead_w(P::kClasses * P::kConv2Out, T(0));
    std::array<T, 2> dhead_b{};
    std::vector<T> dpooled(P::kConv2Out, T(0));
    for (int c = 0; c < P::kClasses; ++c) {
        dhead_b[c] = dlogits[c];
        for (int g = 0; g < P::kConv2Out; ++g) {
            dhead_w[c * P::kConv2Out + g] = dlogits[c] * pooled[g];
            dpooled[g] += dlogits[c] * p.head_w[c * P::kConv2Out + g];
        }
    }

    const T inv_l2 = T(1) / static_cast<T>(l2);
    std::vector<T> dh2(P::kConv2Out * l2, T(0));
    std::vector<T> dconv2_b(P::kConv2Out, T(0));
    for (int g = 0; g < P::kConv2Out; ++g) {
        const T* h2_row = h2.data() + g * l2;
        T* row = dh2.data() + g * l2;
        const T dp = dpooled[g] * inv_l2;
        T acc_b = T(0);
        for (std::size_t j = 0; j < l2; ++j) {
            row[j] = h2_row[j] > T(0) ? dp : T(0);
            acc_b += row[j];
        }
        dconv2_b[g] = acc_b;
    }

    std::vector<T> dconv2_w(P::kConv2Out * P::kConv1Out * P::kConv2Taps, T(0));
    std::vector<T> da1(P::kConv1Out * l1, T(0));
    for (int g = 0; g < P::kConv2Out; ++g) {
        const T* dh2_row = dh2.data() + g * l2;
        for (int f = 0; f < P::kConv1Out; ++f) {
            const T* a1_row = h1.data() + f * l1;
            const T* w = p.conv2_w.data() + (g * P::kConv1Out + f) * P::kConv2Taps;
            T* dw = dconv2_w.data() + (g * P::kConv1Out + f) * P::kConv2Taps;
            T* da1_row = da1.data() + f * l1;
            for (std::size_t j = 0; j < l2; ++j) {
                const T d = dh2_row[j];
                if (d == T(0)) continue;
                const std::size_t base = j * P::kConv2Stride;
                for (int t = 0; t < P::kConv2Taps; ++t) {
                    const T a = a1_row[base + t] > T(0) ? a1_row[base + t] : T(0);
                    dw[t] += d * a;
                    da1_row[base + t] += d * w[t];
                }
            }
        }
    }

    std::vector<T> dconv1_w(P::kConv1Out * P::kConv1Taps, T(0));
    std::vector<T> dconv1_b(P::kConv1Out, T(0));
    std::vector<T> dx(n, T(0));
    for (int f = 0; f < P::kConv1Out; ++f) {
        const T* h1_row = h1.data() + f * l1;
        const T* da1_row = da1.data() + f * l1;
        const T* w = p.conv1_w.data() + f * P::kConv1Taps;
        T* dw = dconv1_w.data() + f * P::kConv1Taps;
        T acc_b = T(0);
        for (std::size_t i = 0; i < l1; ++i) {
            if (!(h1_row[i] > T(0))) continue;
            const T d = da1_row[i];
            if (d == T(0)) continue;
            acc_b += d;
            const std::size_t base = i * P::kConv1Stride;
            const T* seg = x.data() + base;
            for (int t = 0; t < P::kConv1Taps; ++t) {
                dw[t] += d * seg[t];
                dx[base + t] += d * w[t];
            }
        }
        dconv1_b[f] = acc_b;
    }

    auto widen = [](const std::vector<T>& src, std::vector<double>& dst) {
        dst.assign(src.begin(), src.end());
    };
    widen(dconv1_w, out.conv1_w);
    widen(dconv1_b, out.conv1_b);
    widen(dconv2_w, out.conv2_w);
    widen(dconv2_b, out.conv2_b);
    widen(dhead_w, out.head_w);
    out.head_b.assign(dhead_b.begin(), dhead_b.end());
    widen(dx, out.d_input);
}

}  // namespace

void ClassifierParams::validate() const {
    auto check = [](const std::vector<double>& v, std::size_t expect, const char* what) {
        if (v.size() != expect) throw SizeError(std::string("classifier: bad shape for ") + what);
        for (double x : v)
            if (!std::isfinite(x)) throw NumericError(std::string("classifier: non-finite ") + what);
    };
    check(conv1_w, static_cast<std::size_t>(kConv1Out) * kConv1Taps, "conv1 weights");
    check(conv1_b, kConv1Out, "conv1 bias");
    check(conv2_w, static_cast<std::size_t>(kConv2Out) * kConv1Out * kConv2Taps, "conv2 weights");
    check(conv2_b, kConv2Out, "conv2 bias");
    check(head_w, static_cast<std::size_t>(kClasses) * kConv2Out, "head weights");
    check(head_b, kClasses, "head bias");
}

std::size_t ClassifierParams::weight_count() const {
    return conv1_w.size() + conv1_b.size() + conv2_w.size() + conv2_b.size() + head_w.size() +
           head_b.size();
}

ClassifierParams init_classifier(std::uint64_t seed, Precision precision) {
    Rng rng(hash_seed({seed, 0x1217u}));
    ClassifierParams p;
    p.precision = precision;

    auto fill = [&rng](std::vector<double>& v, std::size_t count, int fan_in) {
        const double s = 1.0 / std::sqrt(static_cast<double>(fan_in));
        v.resize(count);
        for (auto& x : v) x = rng.uniform(-s, s);
    };
    fill(p.conv1_w, static_cast<std::size_t>(P::kConv1Out) * P::kConv1Taps, P::kConv1Taps);
    p.conv1_b.assign(P::kConv1Out, 0.0);
    fill(p.conv2_w, static_cast<std::size_t>(P::kConv2Out) * P::kConv1Out * P::kConv2Taps,
         P::kConv1Out * P::kConv2Taps);
    p.conv2_b.assign(P::kConv2Out, 0.0);
    fill(p.head_w, static_cast<std::size_t>(P::kClasses) * P::kConv2Out, P::kConv2Out);
    p.head_b.assign(P::kClasses, 0.0);
    return p;
}

ForwardResult forward(const ClassifierParams& params, const Waveform& w) {
    params.validate();
    if (w.samples.size() < static_cast<std::size_t>(P::kMinInputSamples))
        throw SizeError("forward: input shorter than the receptive field (" +
                        std::to_string(P::kMinInputSamples) + " samples)");

    ForwardResult res;
    ForwardTrace& tr = res.trace;
    tr.input = w.samples;
    tr.precision = params.precision;
    tr.params_revision = params.revision;
    tr.l1 = conv_out_len(w.samples.size(), P::kConv1Taps, P::kConv1Stride);
    tr.l2 = conv_out_len(tr.l1, P::kConv2Taps, P::kConv2Stride);

    if (params.precision == Precision::F64) {
        const Buffers<double> buf = to_buffers<double>(params);
        std::array<double, 2> logits{};
        run_forward<double>(buf, tr.input, tr.h1, tr.h2, tr.pooled, logits);
        tr.logits = logits;
    } else {
        const Buffers<float> buf = to_buffers<float>(params);
        std::vector<float> x(w.samples.begin(), w.samples.end());
        std::vector<float> h1, h2, pooled;
        std::array<float, 2> logits{};
        run_forward<float>(buf, x, h1, h2, pooled, logits);
        tr.h1.assign(h1.begin(), h1.end());
        tr.h2.assign(h2.begin(), h2.end());
        tr.pooled.assign(pooled.begin(), pooled.end());
        tr.logits = {static_cast<double>(logits[0]), static_cast<double>(logits[1])};
    }
    tr.probs = softmax2(tr.logits);
    res.logits = tr.logits;
    res.score_fake = tr.probs[static_cast<int>(Label::Fake)];
    return res;
}

double forward_score(const ClassifierParams& params, const Waveform& w) {
    return forward(params, w).score_fake;
}

double loss_from_probs(const std::array<double, 2>& probs, Label y) {
    const double p = probs[static_cast<int>(y)];
    return -std::log(std::max(p, 1e-300));
}

double loss(const ClassifierParams& params, const Waveform& w, Label y) {
    return loss_from_probs(forward(params, w).trace.probs, y);
}

void Gradients::init_zero() {
    conv1_w.assign(static_cast<std::size_t>(P::kConv1Out) * P::kConv1Taps, 0.0);
    conv1_b.assign(P::kConv1Out, 0.0);
    conv2_w.assign(static_cast<std::size_t>(P::kConv2Out) * P::kConv1Out * P::kConv2Taps, 0.0);
    conv2_b.assign(P::kConv2Out, 0.0);
    head_w.assign(static_cast<std::size_t>(P::kClasses) * P::kConv2Out, 0.0);
    head_b.assign(P::kClasses, 0.0);
    d_input.clear();
}

void Gradients::accumulate_params(const Gradients& other, double scale) {
    auto acc = [scale](std::vector<double>& dst, const std::vector<double>& src) {
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += scale * src[i];
    };
    acc(conv1_w, other.conv1_w);
    acc(conv1_b, other.conv1_b);
    acc(conv2_w, other.conv2_w);
    acc(conv2_b, other.conv2_b);
    acc(head_w, other.head_w);
    acc(head_b, other.head_b);
}

bool Gradients::params_finite() const {
    auto ok = [](const std::vector<double>& v) {
        for (double x : v)
            if (!std::isfinite(x)) return false;
        return true;
    };
    return ok(conv1_w) && ok(conv1_b) && ok(conv2_w) && ok(conv2_b) && ok(head_w) && ok(head_b);
}

Gradients backward(const ClassifierParams& params, const ForwardTrace& trace, Label y) {
    params.validate();
    if (trace.params_revision != params.revision)
        throw ContractError("backward: trace is stale (params changed since forward)");
    if (trace.precision != params.precision)
        throw ContractError("backward: trace precision does not match params");
    if (trace.input.empty() || trace.l2 == 0) throw ContractError("backward: empty trace");

    Gradients out;
    if (params.precision == Precision::F64) {
        const Buffers<double> buf = to_buffers<double>(params);
        run_backward<double>(buf, trace.input, trace.h1, trace.h2, trace.pooled, trace.probs, y, out);
    } else {
        const Buffers<float> buf = to_buffers<float>(params);
        std::vector<float> x(trace.input.begin(), trace.input.end());
        std::vector<float> h1(trace.h1.begin(), trace.h1.end());
        std::vector<float> h2(trace.h2.begin(), trace.h2.end());
        std::vector<float> pooled(trace.pooled.begin(), trace.pooled.end());
        run_backward<float>(buf, x, h1, h2, pooled, trace.probs, y, out);
    }
    return out;
}

void SgdState::init_zero() {
    conv1_w.assign(static_cast<std::size_t>(P::kConv1Out) * P::kConv1Taps, 0.0);
    conv1_b.assign(P::kConv1Out, 0.0);
    conv2_w.assign(static_cast<std::size_t>(P::kConv2Out) * P::kConv1Out * P::kConv2Taps, 0.0);
    conv2_b.assign(P::kConv2Out, 0.0);
    head_w.assign(static_cast<std::size_t>(P::kClasses) * P::kConv2Out, 0.0);
    head_b.assign(P::kClasses, 0.0);
}

void sgd_step(ClassifierParams& params, const Gradients& grads, double lr, double momentum,
              SgdState& velocity) {
    if (lr <= 0.0) throw DomainError("sgd_step: lr must be positive");
    if (momentum < 0.0 || momentum >= 1.0) throw DomainError("sgd_step: momentum must be in [0, 1)");
    if (!grads.params_finite()) throw NumericError("sgd_step: non-finite gradient");
    if (velocity.empty()) velocity.init_zero();

    auto update = [lr, momentum](std::vector<double>& theta, std::vector<double>& v,
                                 const std::vector<double>& g) {
        if (theta.size() != g.size() || v.size() != g.size())
            throw SizeError("sgd_step: gradient shape mismatch");
        for (std::size_t i = 0; i < theta.size(); ++i) {
            v[i] = momentum * v[i] - lr * g[i];
            theta[i] += v[i];
        }
    };
    update(params.conv1_w, velocity.conv1_w, grads.conv1_w);
    update(params.conv1_b, velocity.conv1_b, grads.conv1_b);
    update(params.conv2_w, velocity.conv2_w, grads.conv2_w);
    update(params.conv2_b, velocity.conv2_b, grads.conv2_b);
    update(params.head_w, velocity.head_w, grads.head_w);
    update(params.head_b, velocity.head_b, grads.head_b);
    ++params.revision;
}

}  // namespace fsat
