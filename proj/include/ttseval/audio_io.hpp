// ttseval/audio_io.hpp
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

#ifndef TTSEVAL_AUDIO_IO_HPP_
#define TTSEVAL_AUDIO_IO_HPP_

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ttseval/matrix.hpp"

namespace ttseval::audio {

// Decoded mono waveform. Samples are 16-bit values normalized by 1/32768,
// so every sample lies in [-1.0, 32767/32768].
struct AudioClip {
  std::vector<double> samples;
  int sample_rate_hz = 0;
};

enum class WindowType { kHann, kRectangular };

struct FrameParams {
  int frame_length = 1024;
  int hop_length = 256;
  WindowType window = WindowType::kHann;

  // Throws std::invalid_argument unless 0 < hop_length <= frame_length.
  void validate() const;
};

// T x frame_length matrix of windowed samples. Frame t covers input samples
// [t*hop, t*hop + frame_length); trailing samples that do not fill a whole
// frame are dropped.
struct FrameSeries {
  Matrix frames;
  FrameParams params;
  int origin_sample_rate_hz = 0;
};

// floor((num_samples - frame_length) / hop) + 1, or 0 for short inputs.
std::size_t frame_count(std::size_t num_samples, const FrameParams& params);

std::vector<double> make_window(WindowType type, int length);

// Decodes a RIFF/WAVE container holding mono 16-bit PCM. Extensible-format
// files wrapping PCM16 mono are accepted. Everything else is rejected:
//   malformed container        -> std::runtime_error  ("malformed-container")
//   non-PCM or non-16-bit      -> std::runtime_error  ("unsupported-encoding")
//   more than one channel      -> std::runtime_error  ("multichannel-audio")
// There is deliberately no downmix or resampling path; a converted input
// would not be comparable against its reference.
AudioClip decode_wav(std::span<const std::byte> bytes);

// Minimal PCM16 mono writer, the inverse of decode_wav. Samples are scaled
// by 32768, rounded to nearest, and clamped to the int16 range.
std::vector<std::byte> encode_wav_pcm16(const AudioClip& clip);

AudioClip load_wav(const std::string& path);
void save_wav(const std::string& path, const AudioClip& clip);

FrameSeries frame_signal(const AudioClip& clip, const FrameParams& params);

// Truncates both sequences to the length of the shorter one, keeping
// prefixes. Per-frame metric inputs must be aligned this way before any
// reference/generated comparison.
template <typename T>
void truncate_to_shorter(std::vector<T>& a, std::vector<T>& b) {
  const std::size_t n = std::min(a.size(), b.size());
  a.resize(n);
  b.resize(n);
}

void truncate_to_shorter(Matrix& a, Matrix& b);

}  // namespace ttseval::audio

#endif  // TTSEVAL_AUDIO_IO_HPP_
