// ttseval/spectral.hpp
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

#ifndef TTSEVAL_SPECTRAL_HPP_
#define TTSEVAL_SPECTRAL_HPP_

#include <vector>

#include "ttseval/audio_io.hpp"
#include "ttseval/matrix.hpp"

namespace ttseval::spectral {

// Extraction parameters for the log-mel / MFCC front-end. Both sides of a
// reference/generated comparison must share one SpectralParams value;
// cepstral distances across mismatched front-ends are meaningless.
struct SpectralParams {
  int fft_size = 1024;  // power of two, >= frame_length
  audio::FrameParams frame{1024, 256, audio::WindowType::kHann};
  int n_mels = 40;
  double fmin_hz = 0.0;
  double fmax_hz = 8000.0;
  double log_floor = 1e-10;  // clamp under the natural log

  void validate(int sample_rate_hz) const;
};

// Triangular filters with centers uniformly spaced on the mel scale
// mel(f) = 2595 * log10(1 + f/700).
struct MelFilterbank {
  Matrix weights;  // n_mels x (fft_size/2 + 1), non-negative
  std::vector<double> center_freqs_hz;
};

struct MelSpectrogram {
  Matrix values;  // T x n_mels natural-log energies, >= ln(log_floor)
  SpectralParams params;
};

// Per-frame cepstral coefficients, orders 0..K. Row t holds frame t;
// column k holds coefficient k. Coefficient 0 carries overall energy and
// is excluded from cepstral distances.
struct MfccSequence {
  Matrix coeffs;  // T x (K+1)
  int order = 0;  // K
};

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Row t = |DFT(zero-padded frame t)| over bins 0..fft_size/2.
Matrix stft_magnitude(const audio::FrameSeries& frames, int fft_size);

MelFilterbank build_mel_filterbank(const SpectralParams& params,
                                   int sample_rate_hz);

// values[t][m] = ln(max(filterbank . power_spectrum_t, log_floor))
MelSpectrogram mel_spectrogram(const audio::AudioClip& clip,
                               const SpectralParams& params);

// Orthonormal DCT-II of each log-mel row, coefficients 0..order retained.
// Requires order + 1 <= n_mels.
MfccSequence mfcc(const MelSpectrogram& mel, int order);

void truncate_to_shorter(MfccSequence& a, MfccSequence& b);

}  // namespace ttseval::spectral

#endif  // TTSEVAL_SPECTRAL_HPP_
