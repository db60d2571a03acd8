// ttseval/spectral.cpp
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

#include "ttseval/spectral.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "ttseval/fft.hpp"

namespace ttseval::spectral {

void SpectralParams::validate(int sample_rate_hz) const {
  frame.validate();
  if (!dsp::is_power_of_two(static_cast<std::size_t>(fft_size))) {
    throw std::invalid_argument("fft_size must be a power of two, got " +
                                std::to_string(fft_size));
  }
  if (fft_size < frame.frame_length) {
    throw std::invalid_argument("fft_size must be >= frame_length");
  }
  if (n_mels < 1) throw std::invalid_argument("n_mels must be >= 1");
  if (log_floor <= 0.0) throw std::invalid_argument("log_floor must be positive");
  const double nyquist = sample_rate_hz / 2.0;
  if (fmin_hz < 0.0 || fmin_hz >= fmax_hz || fmax_hz > nyquist) {
    throw std::invalid_argument(
        "invalid-band: need 0 <= fmin < fmax <= nyquist, got fmin " +
        std::to_string(fmin_hz) + " fmax " + std::to_string(fmax_hz) +
        " nyquist " + std::to_string(nyquist));
  }
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double mel_to_hz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

Matrix stft_magnitude(const audio::FrameSeries& frames, int fft_size) {
  if (!dsp::is_power_of_two(static_cast<std::size_t>(fft_size))) {
    throw std::invalid_argument("fft_size must be a power of two");
  }
  if (fft_size < frames.params.frame_length) {
    throw std::invalid_argument("fft_size must be >= frame_length");
  }
  const std::size_t n = static_cast<std::size_t>(fft_size);
  const std::size_t n_bins = n / 2 + 1;
  Matrix mag(frames.frames.rows(), n_bins);
  std::vector<std::complex<double>> buf(n);
  for (std::size_t t = 0; t < frames.frames.rows(); ++t) {
    std::span<const double> frame = frames.frames.row(t);
    for (std::size_t j = 0; j < frame.size(); ++j) buf[j] = frame[j];
    for (std::size_t j = frame.size(); j < n; ++j) buf[j] = 0.0;
    dsp::fft_inplace(buf);
    for (std::size_t k = 0; k < n_bins; ++k) mag(t, k) = std::abs(buf[k]);
  }
  return mag;
}

MelFilterbank build_mel_filterbank(const SpectralParams& params,
                                   int sample_rate_hz) {
  params.validate(sample_rate_hz);
  const int n_mels = params.n_mels;
  const std::size_t n_bins = static_cast<std::size_t>(params.fft_size) / 2 + 1;

  // n_mels + 2 edge points, uniform in mel, back-converted to Hz. Filter m
  // rises over (edge[m], edge[m+1]) and falls over (edge[m+1], edge[m+2]).
  const double mel_min = hz_to_mel(params.fmin_hz);
  const double mel_max = hz_to_mel(params.fmax_hz);
  std::vector<double> edges_hz(static_cast<std::size_t>(n_mels) + 2);
  for (std::size_t i = 0; i < edges_hz.size(); ++i) {
    const double mel =
        mel_min + (mel_max - mel_min) * static_cast<double>(i) /
                      static_cast<double>(n_mels + 1);
    edges_hz[i] = mel_to_hz(mel);
  }

  MelFilterbank fb;
  fb.weights = Matrix(static_cast<std::size_t>(n_mels), n_bins);
  fb.center_freqs_hz.assign(edges_hz.begin() + 1, edges_hz.end() - 1);

  const double bin_hz = static_cast<double>(sample_rate_hz) / params.fft_size;
  for (int m = 0; m < n_mels; ++m) {
    const double left = edges_hz[static_cast<std::size_t>(m)];
    const double center = edges_hz[static_cast<std::size_t>(m) + 1];
    const double right = edges_hz[static_cast<std::size_t>(m) + 2];
    bool any_positive = false;
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double f = bin_hz * static_cast<double>(k);
      const double up = (f - left) / (center - left);
      const double down = (right - f) / (right - center);
      const double w = std::max(0.0, std::min(up, down));
      fb.weights(static_cast<std::size_t>(m), k) = w;
      any_positive = any_positive || w > 0.0;
    }
    if (!any_positive) {
      throw std::invalid_argument(
          "invalid-band: mel filter " + std::to_string(m) +
          " covers no FFT bin; lower n_mels or raise fft_size");
    }
  }
  return fb;
}

MelSpectrogram mel_spectrogram(const audio::AudioClip& clip,
                               const SpectralParams& params) {
  const MelFilterbank fb = build_mel_filterbank(params, clip.sample_rate_hz);
  const audio::FrameSeries frames = audio::frame_signal(clip, params.frame);
  const Matrix mag = stft_magnitude(frames, params.fft_size);

  MelSpectrogram mel;
  mel.params = params;
  mel.values = Matrix(mag.rows(), static_cast<std::size_t>(params.n_mels));
  std::vector<double> power(mag.cols());
  for (std::size_t t = 0; t < mag.rows(); ++t) {
    for (std::size_t k = 0; k < mag.cols(); ++k) {
      power[k] = mag(t, k) * mag(t, k);
    }
    for (std::size_t m = 0; m < fb.weights.rows(); ++m) {
      double energy = 0.0;
      std::span<const double> w = fb.weights.row(m);
      for (std::size_t k = 0; k < power.size(); ++k) energy += w[k] * power[k];
      mel.values(t, m) = std::log(std::max(energy, params.log_floor));
    }
  }
  return mel;
}

MfccSequence mfcc(const MelSpectrogram& mel, int order) {
  const std::size_t n_mels = mel.values.cols();
  if (order < 0 || static_cast<std::size_t>(order) + 1 > n_mels) {
    throw std::invalid_argument("order-too-large: order " +
                                std::to_string(order) + " needs n_mels >= " +
                                std::to_string(order + 1) + ", have " +
                                std::to_string(n_mels));
  }
  const std::size_t n_coeffs = static_cast<std::size_t>(order) + 1;

  // Orthonormal DCT-II basis: basis[k][m] = s_k cos(pi (2m+1) k / (2 M)),
  // s_0 = sqrt(1/M), s_k = sqrt(2/M).
  Matrix basis(n_coeffs, n_mels);
  const double m_count = static_cast<double>(n_mels);
  for (std::size_t k = 0; k < n_coeffs; ++k) {
    const double scale =
        k == 0 ? std::sqrt(1.0 / m_count) : std::sqrt(2.0 / m_count);
    for (std::size_t m = 0; m < n_mels; ++m) {
      basis(k, m) = scale * std::cos(std::numbers::pi *
                                     (2.0 * static_cast<double>(m) + 1.0) *
                                     static_cast<double>(k) / (2.0 * m_count));
    }
  }

  MfccSequence seq;
  seq.order = order;
  seq.coeffs = Matrix(mel.values.rows(), n_coeffs);
  for (std::size_t t = 0; t < mel.values.rows(); ++t) {
    std::span<const double> v = mel.values.row(t);
    for (std::size_t k = 0; k < n_coeffs; ++k) {
      double acc = 0.0;
      std::span<const double> b = basis.row(k);
      for (std::size_t m = 0; m < n_mels; ++m) acc += b[m] * v[m];
      seq.coeffs(t, k) = acc;
    }
  }
  return seq;
}

void truncate_to_shorter(MfccSequence& a, MfccSequence& b) {
  audio::truncate_to_shorter(a.coeffs, b.coeffs);
}

}  // namespace ttseval::spectral
