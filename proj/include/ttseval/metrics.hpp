// ttseval/metrics.hpp
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

#ifndef TTSEVAL_METRICS_HPP_
#define TTSEVAL_METRICS_HPP_

#include <cstddef>
#include <optional>
#include <string>

#include <json.hpp>

#include "ttseval/audio_io.hpp"
#include "ttseval/diagnostics.hpp"
#include "ttseval/spectral.hpp"
#include "ttseval/yin.hpp"

namespace ttseval::metrics {

// Pitch comparison band: a generated frame counts as a gross pitch error
// when both frames are voiced and |p - p_hat| > rel_threshold * p, with p
// the reference pitch. The reference is always the base of the relative
// band, so argument order is (reference, generated) everywhere.
struct GpeConfig {
  double rel_threshold = 0.2;
};

// Conventional dB scaling for cepstral distortion, 10 * sqrt(2) / ln(10).
// Off by default: the plain MCD definition used here carries no constant.
extern const double kMcdDbFactor;

// Everything evaluate_pair needs. The spectral and pitch front-ends must
// share one hop so frame index t names the same instant in both streams.
struct EvalConfig {
  spectral::SpectralParams spectral;
  int mcd_order = 13;
  bool mcd_db_scale = false;
  yin::YinParams yin;
  GpeConfig gpe;
  double tail_silence_db = -50.0;

  void validate() const;
};

nlohmann::json config_to_json(const EvalConfig& config);
// Starts from defaults; only keys present in the document override.
EvalConfig config_from_json(const nlohmann::json& doc);
EvalConfig load_config(const std::string& path);

// One evaluated reference/generated pair. gpe is empty when the pair has no
// frame voiced in both signals; serializing reports it as null with an
// explicit reason rather than a fake perfect 0.
struct MetricReport {
  std::size_t frames_compared = 0;  // common pitch-frame count T
  double mcd_13 = 0.0;
  std::optional<double> gpe;
  double ffe = 0.0;
  double vde = 0.0;
  std::size_t voiced_both = 0;
  std::size_t pitch_error_frames = 0;
  std::size_t voicing_mismatch_frames = 0;
  diagnostics::TailReport tail;
  std::optional<diagnostics::AlignmentDiagnostics> alignment;
  nlohmann::json config_echo;
};

nlohmann::json report_to_json(const MetricReport& report);

// Indicator counts shared by GPE, VDE, and FFE, taken over the common
// prefix of the two tracks. The pitch-error and voicing-mismatch frame sets
// are disjoint by construction (a pitch error requires both frames voiced).
struct PitchErrorCounts {
  std::size_t frames = 0;
  std::size_t voiced_both = 0;
  std::size_t pitch_errors = 0;
  std::size_t voicing_mismatches = 0;
};

PitchErrorCounts count_pitch_errors(const yin::PitchTrack& ref,
                                    const yin::PitchTrack& gen,
                                    const GpeConfig& cfg);

// (1/T) sum_t sqrt(sum_{k=1..K} (c_{t,k} - chat_{t,k})^2) over the common
// prefix; coefficient 0 (overall energy) is excluded. Both sequences must
// carry the same order and K may not exceed it. Throws on empty overlap.
double mcd(const spectral::MfccSequence& ref, const spectral::MfccSequence& gen,
           int order);

// Gross pitch errors over frames voiced in both tracks; empty when no such
// frame exists (an unvoiced pair has no pitch to compare).
std::optional<double> gpe(const yin::PitchTrack& ref, const yin::PitchTrack& gen,
                          const GpeConfig& cfg);

// Fraction of frames whose voicing decisions differ.
double vde(const yin::PitchTrack& ref, const yin::PitchTrack& gen);

// Fraction of frames with either a gross pitch error or a voicing mismatch.
double ffe(const yin::PitchTrack& ref, const yin::PitchTrack& gen,
           const GpeConfig& cfg);

// Full pipeline for one pair: MFCC and pitch streams extracted at a shared
// frame rate, truncated to the shorter signal, and compared. Requires equal
// sample rates and at least one overlapping frame in both streams.
MetricReport evaluate_pair(const audio::AudioClip& ref,
                           const audio::AudioClip& gen,
                           const EvalConfig& config);

}  // namespace ttseval::metrics

#endif  // TTSEVAL_METRICS_HPP_
