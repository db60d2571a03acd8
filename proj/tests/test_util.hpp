// tests/test_util.hpp
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

#ifndef TTSEVAL_TESTS_TEST_UTIL_HPP_
#define TTSEVAL_TESTS_TEST_UTIL_HPP_

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "ttseval/audio_io.hpp"

namespace ttseval::testing {

// Seeded generator with hand-rolled distributions so every platform draws
// the same sequences.
struct Rng {
  explicit Rng(std::uint64_t seed) : gen(seed) {}

  double uniform() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int lo, int hi) {  // inclusive bounds
    return lo + static_cast<int>(gen() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  bool coin(double p = 0.5) { return uniform() < p; }

  double gaussian() {
    // Box-Muller; fine for test data.
    const double u1 = std::max(uniform(), 1e-300);
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  std::mt19937_64 gen;
};

inline std::vector<double> sine_wave(double freq_hz, int sample_rate_hz,
                                     std::size_t num_samples,
                                     double amplitude = 0.5,
                                     double phase = 0.0) {
  std::vector<double> samples(num_samples);
  for (std::size_t n = 0; n < num_samples; ++n) {
    samples[n] = amplitude * std::sin(2.0 * std::numbers::pi * freq_hz *
                                          static_cast<double>(n) /
                                          static_cast<double>(sample_rate_hz) +
                                      phase);
  }
  return samples;
}

inline std::vector<double> white_noise(Rng& rng, std::size_t num_samples,
                                       double amplitude = 0.5) {
  std::vector<double> samples(num_samples);
  for (double& s : samples) s = amplitude * (2.0 * rng.uniform() - 1.0);
  return samples;
}

inline audio::AudioClip make_clip(std::vector<double> samples,
                                  int sample_rate_hz = 22050) {
  audio::AudioClip clip;
  clip.samples = std::move(samples);
  clip.sample_rate_hz = sample_rate_hz;
  return clip;
}

// Unique scratch directory, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("ttseval_" + tag + "_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter.fetch_add(1)));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace ttseval::testing

#endif  // TTSEVAL_TESTS_TEST_UTIL_HPP_
