#include <doctest.h>

#include "fsat/resample.hpp"
#include "support/oracles.hpp"

using namespace fsat;

TEST_CASE("anti-aliased downsample keeps an in-band tone put") {
    const Waveform w = oracles::sine(1000.0, 16000, 16000);
    const Waveform down = resample_to(w, 8000, /*anti_alias=*/true);
    CHECK(down.sample_rate_hz == 8000);
    CHECK(down.samples.size() == 8000);
    CHECK(oracles::dominant_frequency_hz(down) == doctest::Approx(1000.0).epsilon(0.01));
}

TEST_CASE("raw downsample folds a 7 kHz tone to 1 kHz") {
    // 7000 Hz sampled at 4000 Hz folds about the 2000 Hz Nyquist twice:
    // |7000 - 2*4000| = 1000.
    const Waveform w = oracles::sine(7000.0, 16000, 16000);
    const Waveform down = resample_to(w, 4000, /*anti_alias=*/false);
    CHECK(oracles::dominant_frequency_hz(down) == doctest::Approx(1000.0).epsilon(0.01));
}

TEST_CASE("resampling to the same rate is the identity") {
    const Waveform w = oracles::random_waveform(5, 2000);
    const Waveform same = resample_to(w, 16000, true);
    REQUIRE(same.samples.size() == w.samples.size());
    for (std::size_t i = 0; i < w.samples.size(); ++i) CHECK(same.samples[i] == w.samples[i]);
}

TEST_CASE("output length follows round(len * target / source)") {
    const Waveform w = oracles::random_waveform(6, 1001);
    CHECK(resample_to(w, 8000, true).samples.size() == 501);  // round(1001/2) = 501
    CHECK(resample_to(w, 48000, true).samples.size() == 3003);
}

TEST_CASE("bad target rates are rejected") {
    const Waveform w = oracles::random_waveform(7, 100);
    CHECK_THROWS_AS(resample_to(w, 0, true), DomainError);
    CHECK_THROWS_AS(resample_to(w, -8000, false), DomainError);
}
