// tests/test_yin.cpp
//
// Copyright 2026 The ttseval Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include <doctest.h>

#include "test_util.hpp"
#include "ttseval/yin.hpp"

using namespace ttseval;
using ttseval::testing::Rng;

namespace {

constexpr int kRate = 22050;

// Brute-force difference function over the fixed overlap window.
std::vector<double> difference_oracle(const std::vector<double>& x, int max_lag) {
  const std::size_t window = x.size() - static_cast<std::size_t>(max_lag);
  std::vector<double> d(static_cast<std::size_t>(max_lag) + 1, 0.0);
  for (int tau = 0; tau <= max_lag; ++tau) {
    double acc = 0.0;
    for (std::size_t j = 0; j < window; ++j) {
      const double diff = x[j] - x[j + static_cast<std::size_t>(tau)];
      acc += diff * diff;
    }
    d[static_cast<std::size_t>(tau)] = acc;
  }
  return d;
}

}  // namespace

TEST_CASE("difference function is zero at lag zero") {
  Rng rng(0xC01);
  const auto frame = testing::white_noise(rng, 512);
  const auto d = yin::difference_function(frame, 100);
  CHECK(d[0] == 0.0);
  CHECK(d.size() == 101);
}

TEST_CASE("difference function vanishes at an exact integer period") {
  const int period = 50;
  std::vector<double> frame(1024);
  for (std::size_t n = 0; n < frame.size(); ++n) {
    frame[n] = std::sin(2.0 * std::numbers::pi * static_cast<double>(n) / period) +
               0.3 * std::sin(4.0 * std::numbers::pi * static_cast<double>(n) / period);
  }
  const auto d = yin::difference_function(frame, 200);
  double scale = 0.0;
  for (double v : d) scale = std::max(scale, v);
  CHECK(d[period] <= 1e-9 * scale);
}

TEST_CASE("difference function matches the double-loop oracle") {
  Rng rng(0xC02);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = static_cast<std::size_t>(rng.uniform_int(64, 2048));
    const int max_lag = rng.uniform_int(1, static_cast<int>(n) - 1);
    const auto frame = testing::white_noise(rng, n);

    const auto fast = yin::difference_function(frame, max_lag);
    const auto slow = difference_oracle(frame, max_lag);
    REQUIRE(fast.size() == slow.size());
    double scale = 0.0;
    for (double v : slow) scale = std::max(scale, v);
    for (std::size_t tau = 0; tau < slow.size(); ++tau) {
      CHECK(std::abs(fast[tau] - slow[tau]) <= 1e-9 * scale);
    }
  }
}

TEST_CASE("difference function rejects out-of-range lags") {
  std::vector<double> frame(64, 0.0);
  CHECK_THROWS_WITH_AS(yin::difference_function(frame, 64),
                       doctest::Contains("lag-out-of-range"), std::out_of_range);
  CHECK_THROWS_AS(yin::difference_function(frame, -1), std::out_of_range);
  CHECK_NOTHROW(yin::difference_function(frame, 63));
}

TEST_CASE("cmnd normalization") {
  SUBCASE("constant curve maps to all ones") {
    const std::vector<double> d{0.0, 2.5, 2.5, 2.5};
    const auto dp = yin::cmnd(d);
    for (double v : dp) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
  }

  SUBCASE("a zero stays zero") {
    const std::vector<double> d{0.0, 1.0, 0.0, 1.0};
    const auto dp = yin::cmnd(d);
    CHECK(dp[0] == 1.0);
    CHECK(dp[2] == 0.0);
  }

  SUBCASE("all-zero difference gives the all-ones curve") {
    const std::vector<double> d(8, 0.0);
    const auto dp = yin::cmnd(d);
    for (double v : dp) CHECK(v == 1.0);
  }

  SUBCASE("random curves match the formula re-evaluated directly") {
    Rng rng(0xC03);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> d(static_cast<std::size_t>(rng.uniform_int(2, 100)));
      d[0] = 0.0;
      for (std::size_t i = 1; i < d.size(); ++i) d[i] = rng.uniform(0.0, 10.0);
      const auto dp = yin::cmnd(d);
      double running = 0.0;
      for (std::size_t tau = 1; tau < d.size(); ++tau) {
        running += d[tau];
        const double expected = d[tau] * static_cast<double>(tau) / running;
        CHECK(dp[tau] == doctest::Approx(expected).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("detect_pitch finds a pure sine within one percent") {
  yin::YinParams params;
  const auto samples = testing::sine_wave(220.0, kRate, 2048);
  const yin::FrameResult r = yin::detect_pitch(samples, params, kRate);
  REQUIRE(r.voiced);
  CHECK(std::abs(r.pitch_hz - 220.0) / 220.0 < 0.01);
  CHECK(r.aperiodicity < params.harmonicity_threshold);
}

TEST_CASE("white noise frames are unvoiced") {
  yin::YinParams params;
  Rng rng(0xC04);
  int unvoiced = 0;
  const int trials = 120;
  for (int i = 0; i < trials; ++i) {
    const auto frame = testing::white_noise(rng, 2048);
    if (!yin::detect_pitch(frame, params, kRate).voiced) ++unvoiced;
  }
  CHECK(unvoiced >= trials * 95 / 100);
}

TEST_CASE("an all-zero frame is unvoiced") {
  yin::YinParams params;
  const std::vector<double> frame(2048, 0.0);
  const yin::FrameResult r = yin::detect_pitch(frame, params, kRate);
  CHECK_FALSE(r.voiced);
  CHECK(r.pitch_hz == 0.0);
  CHECK(r.aperiodicity == 1.0);
}

TEST_CASE("track marks a steady tone voiced throughout") {
  yin::YinParams params;
  const auto clip = testing::make_clip(testing::sine_wave(220.0, kRate, kRate));
  const yin::PitchTrack track = yin::track(clip, params);
  REQUIRE(track.pitch_hz.size() ==
          audio::frame_count(clip.samples.size(), params.frame));
  for (std::size_t t = 0; t < track.pitch_hz.size(); ++t) {
    REQUIRE(track.voiced[t]);
    CHECK(std::abs(track.pitch_hz[t] - 220.0) / 220.0 < 0.01);
  }
}

TEST_CASE("track marks silence unvoiced with the 0.0 sentinel") {
  yin::YinParams params;
  const auto clip = testing::make_clip(std::vector<double>(kRate / 2, 0.0));
  const yin::PitchTrack track = yin::track(clip, params);
  CHECK(track.pitch_hz.size() > 0);
  for (std::size_t t = 0; t < track.pitch_hz.size(); ++t) {
    CHECK_FALSE(track.voiced[t]);
    CHECK(track.pitch_hz[t] == 0.0);
  }
}

TEST_CASE("tone then silence gives a voiced prefix and unvoiced suffix") {
  yin::YinParams params;
  auto samples = testing::sine_wave(220.0, kRate, 11025);
  samples.resize(22050, 0.0);
  const yin::PitchTrack track = yin::track(testing::make_clip(samples), params);

  // Frames fully inside the tone / fully inside the silence; the boundary
  // frames mix both and are left unasserted.
  const std::size_t hop = 256, frame = 2048;
  for (std::size_t t = 0; t < track.pitch_hz.size(); ++t) {
    const std::size_t begin = t * hop;
    const std::size_t end = begin + frame;
    if (end <= 11025) {
      CHECK(track.voiced[t]);
    } else if (begin >= 11025) {
      CHECK_FALSE(track.voiced[t]);
    }
  }
}

TEST_CASE("scaling a frame by a power of two changes nothing") {
  yin::YinParams params;
  Rng rng(0xC05);
  auto frame = testing::sine_wave(137.0, kRate, 2048, 0.4);
  for (auto& s : frame) s += 0.01 * rng.gaussian();

  const yin::FrameResult base = yin::detect_pitch(frame, params, kRate);
  for (const double alpha : {0.25, 0.5, 2.0, 8.0}) {
    auto scaled = frame;
    for (auto& s : scaled) s *= alpha;
    const yin::FrameResult r = yin::detect_pitch(scaled, params, kRate);
    CHECK(r.voiced == base.voiced);
    CHECK(r.pitch_hz == base.pitch_hz);
    CHECK(r.aperiodicity == base.aperiodicity);
  }
}

TEST_CASE("pitch of a stationary tone is stable across frame offsets") {
  yin::YinParams params;
  const auto samples = testing::sine_wave(173.0, kRate, 8192);
  std::vector<double> estimates;
  for (std::size_t offset = 0; offset + 2048 <= samples.size(); offset += 97) {
    const std::span<const double> frame(samples.data() + offset, 2048);
    const yin::FrameResult r = yin::detect_pitch(frame, params, kRate);
    REQUIRE(r.voiced);
    estimates.push_back(r.pitch_hz);
  }
  const auto [lo, hi] = std::minmax_element(estimates.begin(), estimates.end());
  CHECK((*hi - *lo) / *lo < 0.005);
}

TEST_CASE("voiced pitch always lies inside the search band") {
  yin::YinParams params;
  Rng rng(0xC06);
  for (int trial = 0; trial < 40; ++trial) {
    const double freq = rng.uniform(55.0, 580.0);
    auto frame = testing::sine_wave(freq, kRate, 2048, 0.5);
    for (auto& s : frame) s += 0.05 * rng.gaussian();
    const yin::FrameResult r = yin::detect_pitch(frame, params, kRate);
    if (r.voiced) {
      CHECK(r.pitch_hz >= params.fmin_hz);
      CHECK(r.pitch_hz <= params.fmax_hz);
    }
  }
}

TEST_CASE("a tone whose octave is also in band resolves to the fundamental") {
  yin::YinParams params;  // band 50..600 holds both 150 and 300
  const auto frame = testing::sine_wave(150.0, kRate, 2048);
  const yin::FrameResult r = yin::detect_pitch(frame, params, kRate);
  REQUIRE(r.voiced);
  CHECK(std::abs(r.pitch_hz - 150.0) / 150.0 < 0.01);
}

TEST_CASE("yin params validation") {
  yin::YinParams params;
  CHECK_NOTHROW(params.validate(kRate));

  SUBCASE("fmin above fmax") {
    params.fmin_hz = 700.0;
    CHECK_THROWS_AS(params.validate(kRate), std::invalid_argument);
  }
  SUBCASE("fmax above nyquist") {
    params.fmax_hz = 12000.0;
    CHECK_THROWS_AS(params.validate(kRate), std::invalid_argument);
  }
  SUBCASE("frame shorter than two periods of fmin") {
    params.frame.frame_length = 512;
    params.frame.hop_length = 128;
    CHECK_THROWS_WITH_AS(params.validate(kRate),
                         doctest::Contains("frame too short"),
                         std::invalid_argument);
  }
  SUBCASE("threshold outside (0,1)") {
    params.harmonicity_threshold = 1.5;
    CHECK_THROWS_AS(params.validate(kRate), std::invalid_argument);
  }
}

TEST_CASE("truncate_to_shorter aligns pitch tracks") {
  yin::PitchTrack a, b;
  a.pitch_hz = {100, 110, 120, 130};
  a.voiced = {true, true, false, true};
  a.aperiodicity = {0.1, 0.1, 0.9, 0.1};
  b.pitch_hz = {100, 105};
  b.voiced = {true, false};
  b.aperiodicity = {0.1, 0.8};
  yin::truncate_to_shorter(a, b);
  CHECK(a.pitch_hz.size() == 2);
  CHECK(a.voiced.size() == 2);
  CHECK(b.pitch_hz.size() == 2);
  CHECK(a.pitch_hz[1] == 110);
}
