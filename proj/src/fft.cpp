#include "fsat/fft.hpp"

#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "fsat/errors.hpp"

namespace fsat {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

struct Pow2Plan {
    std::vector<std::size_t> bit_rev;
    std::vector<cdouble> twiddles;  // e^{-i*2*pi*k/n} for k < n/2
};

const Pow2Plan& pow2_plan(std::size_t n) {
    static std::mutex mu;
    static std::unordered_map<std::size_t, std::unique_ptr<Pow2Plan>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return *it->second;

    auto plan = std::make_unique<Pow2Plan>();
    plan->bit_rev.resize(n);
    std::size_t log2n = 0;
    while ((std::size_t{1} << log2n) < n) ++log2n;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t r = 0;
        for (std::size_t b = 0; b < log2n; ++b)
            if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (log2n - 1 - b);
        plan->bit_rev[i] = r;
    }
    plan->twiddles.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
        const double ang = -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
        plan->twiddles[k] = {std::cos(ang), std::sin(ang)};
    }
    const Pow2Plan& ref = *plan;
    cache.emplace(n, std::move(plan));
    return ref;
}

struct BluesteinPlan {
    std::size_t m = 0;               // padded power-of-two length
    std::vector<cdouble> chirp;      // e^{-i*pi*k^2/n}
    std::vector<cdouble> kernel_fft; // FFT of conj chirp, zero-padded & wrapped
};

const BluesteinPlan& bluestein_plan(std::size_t n) {
    static std::mutex mu;
    static std::unordered_map<std::size_t, std::unique_ptr<BluesteinPlan>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return *it->second;

    auto plan = std::make_unique<BluesteinPlan>();
    std::size_t m = 1;
    while (m < 2 * n - 1) m <<= 1;
    plan->m = m;
    plan->chirp.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        // k^2 mod 2n keeps the angle argument small and exact.
        const std::uint64_t k2 = (static_cast<std::uint64_t>(k) * k) % (2 * n);
        const double ang = -kPi * static_cast<double>(k2) / static_cast<double>(n);
        plan->chirp[k] = {std::cos(ang), std::sin(ang)};
    }
    std::vector<cdouble> b(m, cdouble{0.0, 0.0});
    b[0] = std::conj(plan->chirp[0]);
    for (std::size_t k = 1; k < n; ++k) {
        b[k] = std::conj(plan->chirp[k]);
        b[m - k] = std::conj(plan->chirp[k]);
    }
    fft_pow2(b, false);
    plan->kernel_fft = std::move(b);
    const BluesteinPlan& ref = *plan;
    cache.emplace(n, std::move(plan));
    return ref;
}

std::vector<cdouble> bluestein(const std::vector<cdouble>& x, bool inverse) {
    const std::size_t n = x.size();
    const BluesteinPlan& plan = bluestein_plan(n);
    std::vector<cdouble> a(plan.m, cdouble{0.0, 0.0});
    if (!inverse) {
        for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * plan.chirp[k];
    } else {
        // Inverse DFT via conjugation of the forward transform.
        for (std::size_t k = 0; k < n; ++k) a[k] = std::conj(x[k]) * plan.chirp[k];
    }
    fft_pow2(a, false);
    for (std::size_t k = 0; k < plan.m; ++k) a[k] *= plan.kernel_fft[k];
    fft_pow2(a, true);
    std::vector<cdouble> out(n);
    if (!inverse) {
        for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * plan.chirp[k];
    } else {
        const double scale = 1.0 / static_cast<double>(n);
        for (std::size_t k = 0; k < n; ++k) out[k] = std::conj(a[k] * plan.chirp[k]) * scale;
    }
    return out;
}

}  // namespace

void fft_pow2(std::vector<cdouble>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n <= 1) return;
    if (!is_pow2(n)) throw DomainError("fft_pow2: length must be a power of two");
    const Pow2Plan& plan = pow2_plan(n);

    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = plan.bit_rev[i];
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len >> 1;
        const std::size_t step = n / len;
        for (std::size_t base = 0; base < n; base += len) {
            for (std::size_t k = 0; k < half; ++k) {
                cdouble w = plan.twiddles[k * step];
                if (inverse) w = std::conj(w);
                const cdouble u = a[base + k];
                const cdouble t = a[base + k + half] * w;
                a[base + k] = u + t;
                a[base + k + half] = u - t;
            }
        }
    }
    if (inverse) {
        const double scale = 1.0 / static_cast<double>(n);
        for (auto& v : a) v *= scale;
    }
}

std::vector<cdouble> fft(const std::vector<cdouble>& a, bool inverse) {
    if (a.empty()) return {};
    if (is_pow2(a.size())) {
        std::vector<cdouble> out = a;
        fft_pow2(out, inverse);
        return out;
    }
    return bluestein(a, inverse);
}

std::vector<cdouble> rfft_onesided(const double* x, std::size_t n) {
    if (!is_pow2(n)) throw DomainError("rfft_onesided: length must be a power of two");
    std::vector<cdouble> buf(n);
    for (std::size_t i = 0; i < n; ++i) buf[i] = cdouble{x[i], 0.0};
    fft_pow2(buf, false);
    buf.resize(n / 2 + 1);
    return buf;
}

std::vector<double> irfft_onesided(const cdouble* bins, std::size_t n) {
    if (!is_pow2(n)) throw DomainError("irfft_onesided: length must be a power of two");
    std::vector<cdouble> full(n);
    full[0] = bins[0];
    full[n / 2] = bins[n / 2];
    for (std::size_t k = 1; k < n / 2; ++k) {
        full[k] = bins[k];
        full[n - k] = std::conj(bins[k]);
    }
    fft_pow2(full, true);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = full[i].real();
    return out;
}

}  // namespace fsat
