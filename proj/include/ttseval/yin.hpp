// ttseval/yin.hpp
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

#ifndef TTSEVAL_YIN_HPP_
#define TTSEVAL_YIN_HPP_

#include <span>
#include <vector>

#include "ttseval/audio_io.hpp"

namespace ttseval::yin {

// YIN pitch detector configuration. The defaults target speech sampled at
// 22050 Hz: a 50-600 Hz search band, a 2048-sample analysis frame (several
// periods of the lowest pitch), and the 256-sample hop shared with the
// spectral front-end so pitch and cepstral streams stay frame-aligned.
struct YinParams {
  double fmin_hz = 50.0;
  double fmax_hz = 600.0;
  double harmonicity_threshold = 0.15;
  audio::FrameParams frame{2048, 256, audio::WindowType::kRectangular};

  // Requires fmin < fmax <= sample_rate/2 and a frame long enough to hold
  // two full periods of fmin.
  void validate(int sample_rate_hz) const;
};

// Per-frame pitch estimates. pitch_hz[t] is meaningful only where voiced[t];
// unvoiced frames carry the 0.0 sentinel. aperiodicity[t] is the normalized
// difference value at the selected lag (closer to 0 = more periodic), or the
// band minimum when no lag crossed the threshold.
struct PitchTrack {
  std::vector<double> pitch_hz;
  std::vector<bool> voiced;
  std::vector<double> aperiodicity;
  YinParams params;
};

struct FrameResult {
  bool voiced = false;
  double pitch_hz = 0.0;
  double aperiodicity = 1.0;
};

// d(tau) = sum_j (x_j - x_{j+tau})^2 for tau = 0..max_lag, each lag summed
// over the same fixed overlap window of frame_length - max_lag samples.
// Requires 0 <= max_lag < frame length.
std::vector<double> difference_function(std::span<const double> frame,
                                        int max_lag);

// Cumulative-mean-normalized difference: d'(0) = 1 and
// d'(tau) = d(tau) * tau / sum_{j=1..tau} d(j), with d'(tau) = 1 wherever
// the running sum is zero (e.g. on all-zero frames).
std::vector<double> cmnd(std::span<const double> d);

// One YIN decision: scan the lag band [sr/fmax, sr/fmin] for the first
// threshold crossing of d', descend to the local minimum, and refine the lag
// by parabolic interpolation. No crossing means unvoiced.
FrameResult detect_pitch(std::span<const double> frame, const YinParams& params,
                         int sample_rate_hz);

// detect_pitch applied per frame. Frames are always taken rectangular; the
// window field of params.frame is ignored.
PitchTrack track(const audio::AudioClip& clip, const YinParams& params);

void truncate_to_shorter(PitchTrack& a, PitchTrack& b);

}  // namespace ttseval::yin

#endif  // TTSEVAL_YIN_HPP_
