// ttseval/audio_io.cpp
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

#include "ttseval/audio_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace ttseval::audio {

namespace {

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

[[noreturn]] void malformed(const std::string& what) {
  throw std::runtime_error("malformed-container: " + what);
}

std::uint16_t read_u16(std::span<const std::byte> b, std::size_t off) {
  return static_cast<std::uint16_t>(std::to_integer<unsigned>(b[off]) |
                                    (std::to_integer<unsigned>(b[off + 1]) << 8));
}

std::uint32_t read_u32(std::span<const std::byte> b, std::size_t off) {
  return std::to_integer<std::uint32_t>(b[off]) |
         (std::to_integer<std::uint32_t>(b[off + 1]) << 8) |
         (std::to_integer<std::uint32_t>(b[off + 2]) << 16) |
         (std::to_integer<std::uint32_t>(b[off + 3]) << 24);
}

bool tag_is(std::span<const std::byte> b, std::size_t off, const char* tag) {
  return std::memcmp(b.data() + off, tag, 4) == 0;
}

struct FmtChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits_per_sample = 0;
};

FmtChunk parse_fmt(std::span<const std::byte> chunk) {
  if (chunk.size() < 16) malformed("fmt chunk too small");
  FmtChunk fmt;
  fmt.format = read_u16(chunk, 0);
  fmt.channels = read_u16(chunk, 2);
  fmt.sample_rate = read_u32(chunk, 4);
  fmt.bits_per_sample = read_u16(chunk, 14);
  if (fmt.format == kFormatExtensible) {
    // WAVE_FORMAT_EXTENSIBLE: the real format code is the first 16 bits of
    // the SubFormat GUID.
    if (chunk.size() < 26) malformed("extensible fmt chunk too small");
    const std::uint16_t cb_size = read_u16(chunk, 16);
    if (cb_size < 22 || chunk.size() < 18 + static_cast<std::size_t>(cb_size)) {
      malformed("extensible fmt extension truncated");
    }
    fmt.format = read_u16(chunk, 24);
  }
  return fmt;
}

}  // namespace

void FrameParams::validate() const {
  if (frame_length < 1) {
    throw std::invalid_argument("frame_length must be >= 1, got " +
                                std::to_string(frame_length));
  }
  if (hop_length < 1 || hop_length > frame_length) {
    throw std::invalid_argument("hop_length must satisfy 0 < hop <= frame_length, got hop " +
                                std::to_string(hop_length) + " frame " +
                                std::to_string(frame_length));
  }
}

std::size_t frame_count(std::size_t num_samples, const FrameParams& params) {
  params.validate();
  const std::size_t frame = static_cast<std::size_t>(params.frame_length);
  if (num_samples < frame) return 0;
  return (num_samples - frame) / static_cast<std::size_t>(params.hop_length) + 1;
}

std::vector<double> make_window(WindowType type, int length) {
  if (length < 1) throw std::invalid_argument("window length must be >= 1");
  std::vector<double> w(static_cast<std::size_t>(length), 1.0);
  if (type == WindowType::kHann && length > 1) {
    for (int n = 0; n < length; ++n) {
      w[static_cast<std::size_t>(n)] =
          0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * n / (length - 1));
    }
  }
  return w;
}

AudioClip decode_wav(std::span<const std::byte> bytes) {
  if (bytes.size() < 12) malformed("shorter than a RIFF header");
  if (!tag_is(bytes, 0, "RIFF") || !tag_is(bytes, 8, "WAVE")) {
    malformed("missing RIFF/WAVE signature");
  }

  bool have_fmt = false;
  bool have_data = false;
  FmtChunk fmt;
  std::size_t data_offset = 0;
  std::size_t data_size = 0;

  std::size_t off = 12;
  while (off + 8 <= bytes.size()) {
    const std::size_t chunk_size = read_u32(bytes, off + 4);
    const std::size_t payload = off + 8;
    if (payload + chunk_size > bytes.size()) malformed("chunk overruns file");
    if (tag_is(bytes, off, "fmt ")) {
      fmt = parse_fmt(bytes.subspan(payload, chunk_size));
      have_fmt = true;
    } else if (tag_is(bytes, off, "data")) {
      data_offset = payload;
      data_size = chunk_size;
      have_data = true;
    }
    // Chunks are word-aligned: odd sizes carry one pad byte.
    off = payload + chunk_size + (chunk_size & 1);
  }

  if (!have_fmt) malformed("missing fmt chunk");
  if (!have_data) malformed("missing data chunk");
  if (fmt.format != kFormatPcm) {
    throw std::runtime_error("unsupported-encoding: format code " +
                             std::to_string(fmt.format) + " (PCM required)");
  }
  if (fmt.bits_per_sample != 16) {
    throw std::runtime_error("unsupported-encoding: " +
                             std::to_string(fmt.bits_per_sample) +
                             "-bit samples (16-bit required)");
  }
  if (fmt.channels != 1) {
    throw std::runtime_error("multichannel-audio: " +
                             std::to_string(fmt.channels) +
                             " channels (mono required, no downmix)");
  }
  if (fmt.sample_rate == 0) malformed("zero sample rate");
  if (data_size % 2 != 0) malformed("odd PCM16 data size");

  AudioClip clip;
  clip.sample_rate_hz = static_cast<int>(fmt.sample_rate);
  const std::size_t n = data_size / 2;
  clip.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint16_t raw = read_u16(bytes, data_offset + 2 * i);
    const std::int16_t value = static_cast<std::int16_t>(raw);
    clip.samples[i] = static_cast<double>(value) / 32768.0;
  }
  return clip;
}

std::vector<std::byte> encode_wav_pcm16(const AudioClip& clip) {
  if (clip.sample_rate_hz <= 0) {
    throw std::invalid_argument("sample_rate_hz must be positive");
  }
  const std::size_t n = clip.samples.size();
  const std::uint32_t data_size = static_cast<std::uint32_t>(n * 2);
  std::vector<std::byte> out(44 + n * 2);

  auto put_u16 = [&](std::size_t off, std::uint16_t v) {
    out[off] = static_cast<std::byte>(v & 0xFF);
    out[off + 1] = static_cast<std::byte>((v >> 8) & 0xFF);
  };
  auto put_u32 = [&](std::size_t off, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) {
      out[off + static_cast<std::size_t>(i)] =
          static_cast<std::byte>((v >> (8 * i)) & 0xFF);
    }
  };
  auto put_tag = [&](std::size_t off, const char* tag) {
    std::memcpy(out.data() + off, tag, 4);
  };

  const std::uint32_t rate = static_cast<std::uint32_t>(clip.sample_rate_hz);
  put_tag(0, "RIFF");
  put_u32(4, 36 + data_size);
  put_tag(8, "WAVE");
  put_tag(12, "fmt ");
  put_u32(16, 16);
  put_u16(20, kFormatPcm);
  put_u16(22, 1);          // mono
  put_u32(24, rate);
  put_u32(28, rate * 2);   // byte rate
  put_u16(32, 2);          // block align
  put_u16(34, 16);         // bits per sample
  put_tag(36, "data");
  put_u32(40, data_size);

  for (std::size_t i = 0; i < n; ++i) {
    double scaled = std::round(clip.samples[i] * 32768.0);
    scaled = std::min(32767.0, std::max(-32768.0, scaled));
    const std::int16_t value = static_cast<std::int16_t>(scaled);
    put_u16(44 + 2 * i, static_cast<std::uint16_t>(value));
  }
  return out;
}

AudioClip load_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("file-not-found: " + path);
  std::vector<char> raw((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
  return decode_wav(std::as_bytes(std::span<const char>(raw)));
}

void save_wav(const std::string& path, const AudioClip& clip) {
  const std::vector<std::byte> bytes = encode_wav_pcm16(clip);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for " + path);
}

FrameSeries frame_signal(const AudioClip& clip, const FrameParams& params) {
  params.validate();
  const std::size_t t_count = frame_count(clip.samples.size(), params);
  const std::size_t frame = static_cast<std::size_t>(params.frame_length);
  const std::size_t hop = static_cast<std::size_t>(params.hop_length);
  const std::vector<double> window = make_window(params.window, params.frame_length);

  FrameSeries series;
  series.params = params;
  series.origin_sample_rate_hz = clip.sample_rate_hz;
  series.frames = Matrix(t_count, frame);
  for (std::size_t t = 0; t < t_count; ++t) {
    const double* src = clip.samples.data() + t * hop;
    std::span<double> dst = series.frames.row(t);
    for (std::size_t j = 0; j < frame; ++j) dst[j] = src[j] * window[j];
  }
  return series;
}

void truncate_to_shorter(Matrix& a, Matrix& b) {
  const std::size_t n = std::min(a.rows(), b.rows());
  a.truncate_rows(n);
  b.truncate_rows(n);
}

}  // namespace ttseval::audio
