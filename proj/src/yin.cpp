// ttseval/yin.cpp
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

#include "ttseval/yin.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "ttseval/fft.hpp"

namespace ttseval::yin {

namespace {

struct LagBand {
  int min_lag = 0;
  int max_lag = 0;
};

LagBand lag_band(const YinParams& params, int sample_rate_hz) {
  LagBand band;
  band.min_lag = std::max(
      1, static_cast<int>(std::ceil(sample_rate_hz / params.fmax_hz)));
  band.max_lag = static_cast<int>(std::floor(sample_rate_hz / params.fmin_hz));
  return band;
}

}  // namespace

void YinParams::validate(int sample_rate_hz) const {
  frame.validate();
  if (sample_rate_hz <= 0) {
    throw std::invalid_argument("sample rate must be positive");
  }
  if (fmin_hz <= 0.0 || fmin_hz >= fmax_hz ||
      fmax_hz > sample_rate_hz / 2.0) {
    throw std::invalid_argument(
        "pitch band must satisfy 0 < fmin < fmax <= sample_rate/2");
  }
  if (harmonicity_threshold <= 0.0 || harmonicity_threshold >= 1.0) {
    throw std::invalid_argument("harmonicity_threshold must be in (0,1)");
  }
  const LagBand band = lag_band(*this, sample_rate_hz);
  if (2 * band.max_lag > frame.frame_length) {
    throw std::invalid_argument(
        "frame too short: needs at least two periods of fmin (" +
        std::to_string(2 * band.max_lag) + " samples, frame is " +
        std::to_string(frame.frame_length) + ")");
  }
}

// Evaluated through the expansion
//   d(tau) = sum_j x_j^2 + sum_j x_{j+tau}^2 - 2 sum_j x_j x_{j+tau}
// with the cross term computed as an FFT correlation and the energy terms
// as prefix sums, which keeps long frames cheap. d(0) is exactly 0 and
// small negative rounding residues are clamped away.
std::vector<double> difference_function(std::span<const double> frame,
                                        int max_lag) {
  const std::size_t n = frame.size();
  if (max_lag < 0 || static_cast<std::size_t>(max_lag) >= n) {
    throw std::out_of_range("lag-out-of-range: max_lag " +
                            std::to_string(max_lag) + " for frame of " +
                            std::to_string(n) + " samples");
  }
  const std::size_t lags = static_cast<std::size_t>(max_lag);
  const std::size_t window = n - lags;  // fixed overlap length

  // Prefix sums of squared samples for the sliding energy term.
  std::vector<double> sq_prefix(n + 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    sq_prefix[j + 1] = sq_prefix[j] + frame[j] * frame[j];
  }
  const double head_energy = sq_prefix[window];

  // Correlation c(tau) = sum_{j<window} x_j x_{j+tau} for tau = 0..max_lag.
  const std::size_t fft_size = dsp::next_power_of_two(n);
  std::vector<std::complex<double>> head(fft_size, 0.0);
  std::vector<std::complex<double>> whole(fft_size, 0.0);
  for (std::size_t j = 0; j < window; ++j) head[j] = frame[j];
  for (std::size_t j = 0; j < n; ++j) whole[j] = frame[j];
  dsp::fft_inplace(head);
  dsp::fft_inplace(whole);
  for (std::size_t k = 0; k < fft_size; ++k) {
    head[k] = std::conj(head[k]) * whole[k];
  }
  dsp::fft_inplace(head, /*inverse=*/true);

  std::vector<double> d(lags + 1);
  d[0] = 0.0;
  for (std::size_t tau = 1; tau <= lags; ++tau) {
    const double shifted_energy = sq_prefix[tau + window] - sq_prefix[tau];
    const double cross = head[tau].real();
    d[tau] = std::max(0.0, head_energy + shifted_energy - 2.0 * cross);
  }
  return d;
}

std::vector<double> cmnd(std::span<const double> d) {
  std::vector<double> out(d.size());
  if (d.empty()) return out;
  out[0] = 1.0;
  double running = 0.0;
  for (std::size_t tau = 1; tau < d.size(); ++tau) {
    running += d[tau];
    out[tau] = running > 0.0
                   ? d[tau] * static_cast<double>(tau) / running
                   : 1.0;
  }
  return out;
}

FrameResult detect_pitch(std::span<const double> frame, const YinParams& params,
                         int sample_rate_hz) {
  if (frame.empty()) return FrameResult{};
  if (params.fmin_hz <= 0.0 || params.fmin_hz >= params.fmax_hz ||
      params.fmax_hz > sample_rate_hz / 2.0) {
    throw std::invalid_argument(
        "pitch band must satisfy 0 < fmin < fmax <= sample_rate/2");
  }
  const LagBand band = lag_band(params, sample_rate_hz);
  if (2 * band.max_lag > static_cast<int>(frame.size())) {
    throw std::invalid_argument("frame too short for fmin search lag");
  }
  if (band.min_lag > band.max_lag) return FrameResult{};  // band holds no lag

  const std::vector<double> d = difference_function(frame, band.max_lag);
  const std::vector<double> dp = cmnd(d);

  FrameResult result;
  int chosen = -1;
  double band_min = dp[static_cast<std::size_t>(band.min_lag)];
  for (int tau = band.min_lag; tau <= band.max_lag; ++tau) {
    const double value = dp[static_cast<std::size_t>(tau)];
    band_min = std::min(band_min, value);
    if (value < params.harmonicity_threshold) {
      chosen = tau;
      break;
    }
  }
  if (chosen < 0) {
    result.aperiodicity = band_min;
    return result;  // unvoiced
  }

  // Descend to the local minimum of the dip that crossed the threshold.
  while (chosen + 1 <= band.max_lag &&
         dp[static_cast<std::size_t>(chosen) + 1] <
             dp[static_cast<std::size_t>(chosen)]) {
    ++chosen;
  }

  double lag = static_cast<double>(chosen);
  double value = dp[static_cast<std::size_t>(chosen)];
  if (chosen - 1 >= 0 && chosen + 1 <= band.max_lag) {
    const double left = dp[static_cast<std::size_t>(chosen) - 1];
    const double right = dp[static_cast<std::size_t>(chosen) + 1];
    const double denom = left - 2.0 * value + right;
    if (denom > 0.0) {
      const double delta = 0.5 * (left - right) / denom;
      const double refined = static_cast<double>(chosen) + delta;
      // Keep the integer lag when interpolation escapes the search band.
      if (refined >= sample_rate_hz / params.fmax_hz &&
          refined <= sample_rate_hz / params.fmin_hz) {
        lag = refined;
        value = std::max(0.0, value - 0.25 * (left - right) * delta);
      }
    }
  }

  result.voiced = true;
  result.pitch_hz = static_cast<double>(sample_rate_hz) / lag;
  result.aperiodicity = value;
  return result;
}

PitchTrack track(const audio::AudioClip& clip, const YinParams& params) {
  params.validate(clip.sample_rate_hz);
  audio::FrameParams framing = params.frame;
  framing.window = audio::WindowType::kRectangular;
  const audio::FrameSeries frames = audio::frame_signal(clip, framing);

  PitchTrack out;
  out.params = params;
  const std::size_t t_count = frames.frames.rows();
  out.pitch_hz.resize(t_count, 0.0);
  out.voiced.resize(t_count, false);
  out.aperiodicity.resize(t_count, 1.0);
  for (std::size_t t = 0; t < t_count; ++t) {
    const FrameResult r =
        detect_pitch(frames.frames.row(t), params, clip.sample_rate_hz);
    out.pitch_hz[t] = r.voiced ? r.pitch_hz : 0.0;
    out.voiced[t] = r.voiced;
    out.aperiodicity[t] = r.aperiodicity;
  }
  return out;
}

void truncate_to_shorter(PitchTrack& a, PitchTrack& b) {
  const std::size_t n = std::min(a.pitch_hz.size(), b.pitch_hz.size());
  a.pitch_hz.resize(n);
  b.pitch_hz.resize(n);
  a.voiced.resize(n);
  b.voiced.resize(n);
  a.aperiodicity.resize(n, 1.0);
  b.aperiodicity.resize(n, 1.0);
}

}  // namespace ttseval::yin
