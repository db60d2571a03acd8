// tests/test_spectral.cpp
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

#include <cmath>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "test_util.hpp"
#include "ttseval/spectral.hpp"

using namespace ttseval;
using ttseval::testing::Rng;

namespace {

// Direct-summation DCT-II, kept deliberately naive: per-coefficient cosine
// evaluation with the scale applied at the end.
std::vector<double> dct2_oracle(const std::vector<double>& x, int order) {
  const std::size_t m_count = x.size();
  std::vector<double> out(static_cast<std::size_t>(order) + 1);
  for (int k = 0; k <= order; ++k) {
    double acc = 0.0;
    for (std::size_t m = 0; m < m_count; ++m) {
      acc += x[m] * std::cos(std::numbers::pi *
                             (2.0 * static_cast<double>(m) + 1.0) * k /
                             (2.0 * static_cast<double>(m_count)));
    }
    const double scale = k == 0 ? std::sqrt(1.0 / static_cast<double>(m_count))
                                : std::sqrt(2.0 / static_cast<double>(m_count));
    out[static_cast<std::size_t>(k)] = scale * acc;
  }
  return out;
}

spectral::MelSpectrogram mel_from_matrix(const Matrix& values) {
  spectral::MelSpectrogram mel;
  mel.values = values;
  mel.params.n_mels = static_cast<int>(values.cols());
  return mel;
}

audio::FrameSeries series_from_frame(const std::vector<double>& frame) {
  audio::FrameSeries series;
  series.params = audio::FrameParams{static_cast<int>(frame.size()),
                                     static_cast<int>(frame.size()),
                                     audio::WindowType::kRectangular};
  series.frames = Matrix::from_rows({frame});
  return series;
}

}  // namespace

TEST_CASE("stft magnitude of an all-zero frame is all zero") {
  const auto series = series_from_frame(std::vector<double>(256, 0.0));
  const Matrix mag = spectral::stft_magnitude(series, 256);
  REQUIRE(mag.rows() == 1);
  REQUIRE(mag.cols() == 129);
  for (std::size_t k = 0; k < mag.cols(); ++k) CHECK(mag(0, k) == 0.0);
}

TEST_CASE("stft concentrates an on-bin cosine at its bin") {
  const int n = 512;
  const int bin = 37;
  std::vector<double> frame(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    frame[static_cast<std::size_t>(i)] =
        std::cos(2.0 * std::numbers::pi * bin * i / n);
  }
  const Matrix mag = spectral::stft_magnitude(series_from_frame(frame), n);
  // Closed form: an on-bin cosine of amplitude 1 puts n/2 at the bin and
  // nothing anywhere else.
  const double peak = mag(0, static_cast<std::size_t>(bin));
  CHECK(peak == doctest::Approx(n / 2.0).epsilon(1e-12));
  for (std::size_t k = 0; k < mag.cols(); ++k) {
    if (k == static_cast<std::size_t>(bin)) continue;
    CHECK(mag(0, k) <= 1e-9 * peak);
  }
}

TEST_CASE("stft satisfies the Parseval identity on random frames") {
  Rng rng(0xB01);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1024;
    std::vector<double> frame(static_cast<std::size_t>(n));
    for (auto& v : frame) v = rng.uniform(-1.0, 1.0);

    const Matrix mag = spectral::stft_magnitude(series_from_frame(frame), n);
    double time_energy = 0.0;
    for (double v : frame) time_energy += v * v;
    // Real input: |X[n-k]| = |X[k]|, so the full-spectrum sum doubles the
    // interior bins.
    double freq_energy = mag(0, 0) * mag(0, 0);
    freq_energy += mag(0, mag.cols() - 1) * mag(0, mag.cols() - 1);
    for (std::size_t k = 1; k + 1 < mag.cols(); ++k) {
      freq_energy += 2.0 * mag(0, k) * mag(0, k);
    }
    CHECK(freq_energy / n == doctest::Approx(time_energy).epsilon(1e-9));
  }
}

TEST_CASE("stft zero-pads frames shorter than fft_size") {
  std::vector<double> frame(300, 0.25);
  audio::FrameSeries series;
  series.params = audio::FrameParams{300, 300, audio::WindowType::kRectangular};
  series.frames = Matrix::from_rows({frame});
  const Matrix mag = spectral::stft_magnitude(series, 512);
  CHECK(mag.cols() == 257);
  CHECK_THROWS_AS(spectral::stft_magnitude(series, 256), std::invalid_argument);
  CHECK_THROWS_AS(spectral::stft_magnitude(series, 300), std::invalid_argument);
}

TEST_CASE("mel filterbank with a single filter is one triangle") {
  spectral::SpectralParams params;
  params.n_mels = 1;
  params.fmin_hz = 100.0;
  params.fmax_hz = 4000.0;
  const spectral::MelFilterbank fb = spectral::build_mel_filterbank(params, 22050);
  REQUIRE(fb.center_freqs_hz.size() == 1);
  const double mid_mel =
      0.5 * (spectral::hz_to_mel(100.0) + spectral::hz_to_mel(4000.0));
  CHECK(fb.center_freqs_hz[0] ==
        doctest::Approx(spectral::mel_to_hz(mid_mel)).epsilon(1e-12));

  const double bin_hz = 22050.0 / 1024.0;
  for (std::size_t k = 0; k < fb.weights.cols(); ++k) {
    const double f = bin_hz * static_cast<double>(k);
    if (f <= 100.0 || f >= 4000.0) CHECK(fb.weights(0, k) == 0.0);
  }
}

TEST_CASE("mel filterbank centers strictly increase") {
  spectral::SpectralParams params;  // 40 mels, 0..8000 Hz
  const spectral::MelFilterbank fb = spectral::build_mel_filterbank(params, 22050);
  REQUIRE(fb.center_freqs_hz.size() == 40);
  for (std::size_t m = 1; m < fb.center_freqs_hz.size(); ++m) {
    CHECK(fb.center_freqs_hz[m] > fb.center_freqs_hz[m - 1]);
  }
}

TEST_CASE("every bin strictly inside the band has positive total weight") {
  spectral::SpectralParams params;
  const spectral::MelFilterbank fb = spectral::build_mel_filterbank(params, 22050);
  const double bin_hz = 22050.0 / 1024.0;
  for (std::size_t k = 0; k < fb.weights.cols(); ++k) {
    const double f = bin_hz * static_cast<double>(k);
    if (f <= params.fmin_hz || f >= params.fmax_hz) continue;
    double total = 0.0;
    for (std::size_t m = 0; m < fb.weights.rows(); ++m) total += fb.weights(m, k);
    CHECK(total > 0.0);
  }
}

TEST_CASE("mel filterbank rows are non-negative with contiguous support") {
  spectral::SpectralParams params;
  const spectral::MelFilterbank fb = spectral::build_mel_filterbank(params, 22050);
  for (std::size_t m = 0; m < fb.weights.rows(); ++m) {
    std::size_t first = fb.weights.cols(), last = 0;
    for (std::size_t k = 0; k < fb.weights.cols(); ++k) {
      CHECK(fb.weights(m, k) >= 0.0);
      if (fb.weights(m, k) > 0.0) {
        first = std::min(first, k);
        last = k;
      }
    }
    REQUIRE(first < fb.weights.cols());  // at least one positive weight
    for (std::size_t k = first; k <= last; ++k) CHECK(fb.weights(m, k) > 0.0);
  }
}

TEST_CASE("mel filterbank rejects bad bands") {
  spectral::SpectralParams params;
  params.fmax_hz = 12000.0;  // above the 11025 Hz Nyquist
  CHECK_THROWS_WITH_AS(spectral::build_mel_filterbank(params, 22050),
                       doctest::Contains("invalid-band"), std::invalid_argument);
  params.fmax_hz = 8000.0;
  params.fmin_hz = 8000.0;
  CHECK_THROWS_WITH_AS(spectral::build_mel_filterbank(params, 22050),
                       doctest::Contains("invalid-band"), std::invalid_argument);
}

TEST_CASE("mel spectrogram of silence sits at the log floor") {
  spectral::SpectralParams params;
  const auto clip = testing::make_clip(std::vector<double>(4096, 0.0));
  const spectral::MelSpectrogram mel = spectral::mel_spectrogram(clip, params);
  REQUIRE(mel.values.rows() == audio::frame_count(4096, params.frame));
  const double floor_log = std::log(params.log_floor);
  for (std::size_t t = 0; t < mel.values.rows(); ++t) {
    for (std::size_t m = 0; m < mel.values.cols(); ++m) {
      CHECK(mel.values(t, m) == floor_log);
    }
  }
}

TEST_CASE("doubling the waveform adds ln(4) to un-floored mel values") {
  spectral::SpectralParams params;
  Rng rng(0xB02);
  auto clip = testing::make_clip(testing::white_noise(rng, 4096, 0.2));
  auto loud = clip;
  for (double& s : loud.samples) s *= 2.0;

  const spectral::MelSpectrogram quiet_mel = spectral::mel_spectrogram(clip, params);
  const spectral::MelSpectrogram loud_mel = spectral::mel_spectrogram(loud, params);
  const double floor_log = std::log(params.log_floor);
  REQUIRE(quiet_mel.values.rows() == loud_mel.values.rows());
  std::size_t checked = 0;
  for (std::size_t t = 0; t < quiet_mel.values.rows(); ++t) {
    for (std::size_t m = 0; m < quiet_mel.values.cols(); ++m) {
      const double q = quiet_mel.values(t, m);
      if (q == floor_log || loud_mel.values(t, m) == floor_log) continue;
      CHECK(loud_mel.values(t, m) - q == doctest::Approx(std::log(4.0)).epsilon(1e-9));
      ++checked;
    }
  }
  CHECK(checked > 0);
}

TEST_CASE("mel spectrogram ignores samples past the last whole frame") {
  spectral::SpectralParams params;
  Rng rng(0xB03);
  // 3072 samples end exactly on a frame boundary; the next frame needs 256
  // more, so a 200-sample tail must change nothing.
  const auto base = testing::white_noise(rng, 3072, 0.3);
  auto longer = base;
  const auto tail = testing::white_noise(rng, 200, 0.9);
  longer.insert(longer.end(), tail.begin(), tail.end());

  const auto a = spectral::mel_spectrogram(testing::make_clip(base), params);
  const auto b = spectral::mel_spectrogram(testing::make_clip(longer), params);
  REQUIRE(a.values.rows() == b.values.rows());
  CHECK(a.values == b.values);
}

TEST_CASE("mfcc of a constant log-mel vector is energy-only") {
  Matrix values(3, 40, std::log(1e-10));
  const spectral::MfccSequence seq = spectral::mfcc(mel_from_matrix(values), 13);
  REQUIRE(seq.coeffs.rows() == 3);
  REQUIRE(seq.coeffs.cols() == 14);
  for (std::size_t t = 0; t < 3; ++t) {
    CHECK(std::abs(seq.coeffs(t, 0)) > 1.0);
    for (std::size_t k = 1; k < 14; ++k) {
      CHECK(std::abs(seq.coeffs(t, k)) < 1e-12);
    }
  }
}

TEST_CASE("mfcc is linear in the log-mel matrix") {
  Rng rng(0xB04);
  Matrix a(4, 20), b(4, 20), sum(4, 20);
  for (std::size_t t = 0; t < 4; ++t) {
    for (std::size_t m = 0; m < 20; ++m) {
      a(t, m) = rng.uniform(-5.0, 5.0);
      b(t, m) = rng.uniform(-5.0, 5.0);
      sum(t, m) = a(t, m) + b(t, m);
    }
  }
  const auto ca = spectral::mfcc(mel_from_matrix(a), 12);
  const auto cb = spectral::mfcc(mel_from_matrix(b), 12);
  const auto cs = spectral::mfcc(mel_from_matrix(sum), 12);
  for (std::size_t t = 0; t < 4; ++t) {
    for (std::size_t k = 0; k < 13; ++k) {
      CHECK(cs.coeffs(t, k) ==
            doctest::Approx(ca.coeffs(t, k) + cb.coeffs(t, k)).epsilon(1e-10));
    }
  }
}

TEST_CASE("mfcc matches the naive DCT-II oracle on random frames") {
  Rng rng(0xB05);
  for (int trial = 0; trial < 30; ++trial) {
    const int n_mels = rng.uniform_int(14, 64);
    std::vector<double> frame(static_cast<std::size_t>(n_mels));
    for (auto& v : frame) v = rng.uniform(-10.0, 10.0);

    Matrix values = Matrix::from_rows({frame});
    const auto seq = spectral::mfcc(mel_from_matrix(values), 13);
    const auto expected = dct2_oracle(frame, 13);
    for (std::size_t k = 0; k < 14; ++k) {
      CHECK(seq.coeffs(0, k) == doctest::Approx(expected[k]).epsilon(1e-10));
    }
  }
}

TEST_CASE("full-order orthonormal DCT-II preserves the Euclidean norm") {
  Rng rng(0xB06);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = rng.uniform_int(2, 48);
    std::vector<double> frame(static_cast<std::size_t>(n));
    double norm_sq = 0.0;
    for (auto& v : frame) {
      v = rng.uniform(-3.0, 3.0);
      norm_sq += v * v;
    }
    const auto seq = spectral::mfcc(mel_from_matrix(Matrix::from_rows({frame})), n - 1);
    double coeff_sq = 0.0;
    for (std::size_t k = 0; k < static_cast<std::size_t>(n); ++k) {
      coeff_sq += seq.coeffs(0, k) * seq.coeffs(0, k);
    }
    CHECK(coeff_sq == doctest::Approx(norm_sq).epsilon(1e-10));
  }
}

TEST_CASE("mfcc rejects orders the filterbank cannot support") {
  Matrix values(1, 10, 0.0);
  CHECK_THROWS_WITH_AS(spectral::mfcc(mel_from_matrix(values), 10),
                       doctest::Contains("order-too-large"),
                       std::invalid_argument);
  CHECK_NOTHROW(spectral::mfcc(mel_from_matrix(values), 9));
}

TEST_CASE("mel spectrogram frame count matches the framing formula") {
  spectral::SpectralParams params;
  Rng rng(0xB07);
  const auto clip = testing::make_clip(testing::white_noise(rng, 5000));
  const auto mel = spectral::mel_spectrogram(clip, params);
  CHECK(mel.values.rows() == audio::frame_count(5000, params.frame));
  CHECK(mel.values.cols() == 40);
}
