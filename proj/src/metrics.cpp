// ttseval/metrics.cpp
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

#include "ttseval/metrics.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace ttseval::metrics {

const double kMcdDbFactor = 10.0 * std::sqrt(2.0) / std::log(10.0);

void EvalConfig::validate() const {
  if (mcd_order < 1) throw std::invalid_argument("mcd order must be >= 1");
  if (gpe.rel_threshold <= 0.0) {
    throw std::invalid_argument("gpe rel_threshold must be positive");
  }
  if (spectral.frame.hop_length != yin.frame.hop_length) {
    throw std::invalid_argument(
        "invalid-config: spectral hop " +
        std::to_string(spectral.frame.hop_length) + " != pitch hop " +
        std::to_string(yin.frame.hop_length) +
        "; a shared hop keeps the metric streams frame-aligned");
  }
}

namespace {

std::string window_name(audio::WindowType w) {
  return w == audio::WindowType::kHann ? "hann" : "rectangular";
}

audio::WindowType window_from_name(const std::string& name) {
  if (name == "hann") return audio::WindowType::kHann;
  if (name == "rectangular") return audio::WindowType::kRectangular;
  throw std::invalid_argument("unknown window '" + name +
                              "' (expected hann or rectangular)");
}

}  // namespace

nlohmann::json config_to_json(const EvalConfig& c) {
  return nlohmann::json{
      {"spectral",
       {{"fft_size", c.spectral.fft_size},
        {"frame_length", c.spectral.frame.frame_length},
        {"hop_length", c.spectral.frame.hop_length},
        {"window", window_name(c.spectral.frame.window)},
        {"n_mels", c.spectral.n_mels},
        {"fmin_hz", c.spectral.fmin_hz},
        {"fmax_hz", c.spectral.fmax_hz},
        {"log_floor", c.spectral.log_floor}}},
      {"mcd", {{"order", c.mcd_order}, {"db_scale", c.mcd_db_scale}}},
      {"yin",
       {{"fmin_hz", c.yin.fmin_hz},
        {"fmax_hz", c.yin.fmax_hz},
        {"harmonicity_threshold", c.yin.harmonicity_threshold},
        {"frame_length", c.yin.frame.frame_length},
        {"hop_length", c.yin.frame.hop_length}}},
      {"gpe", {{"rel_threshold", c.gpe.rel_threshold}}},
      {"tail", {{"silence_db_threshold", c.tail_silence_db}}}};
}

EvalConfig config_from_json(const nlohmann::json& doc) {
  EvalConfig c;
  if (doc.contains("spectral")) {
    const auto& s = doc.at("spectral");
    c.spectral.fft_size = s.value("fft_size", c.spectral.fft_size);
    c.spectral.frame.frame_length =
        s.value("frame_length", c.spectral.frame.frame_length);
    c.spectral.frame.hop_length =
        s.value("hop_length", c.spectral.frame.hop_length);
    if (s.contains("window")) {
      c.spectral.frame.window = window_from_name(s.at("window").get<std::string>());
    }
    c.spectral.n_mels = s.value("n_mels", c.spectral.n_mels);
    c.spectral.fmin_hz = s.value("fmin_hz", c.spectral.fmin_hz);
    c.spectral.fmax_hz = s.value("fmax_hz", c.spectral.fmax_hz);
    c.spectral.log_floor = s.value("log_floor", c.spectral.log_floor);
  }
  if (doc.contains("mcd")) {
    const auto& m = doc.at("mcd");
    c.mcd_order = m.value("order", c.mcd_order);
    c.mcd_db_scale = m.value("db_scale", c.mcd_db_scale);
  }
  if (doc.contains("yin")) {
    const auto& y = doc.at("yin");
    c.yin.fmin_hz = y.value("fmin_hz", c.yin.fmin_hz);
    c.yin.fmax_hz = y.value("fmax_hz", c.yin.fmax_hz);
    c.yin.harmonicity_threshold =
        y.value("harmonicity_threshold", c.yin.harmonicity_threshold);
    c.yin.frame.frame_length = y.value("frame_length", c.yin.frame.frame_length);
    c.yin.frame.hop_length = y.value("hop_length", c.yin.frame.hop_length);
  }
  if (doc.contains("gpe")) {
    c.gpe.rel_threshold = doc.at("gpe").value("rel_threshold", c.gpe.rel_threshold);
  }
  if (doc.contains("tail")) {
    c.tail_silence_db =
        doc.at("tail").value("silence_db_threshold", c.tail_silence_db);
  }
  c.validate();
  return c;
}

EvalConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("bad config " + path + ": " + e.what());
  }
  return config_from_json(doc);
}

nlohmann::json report_to_json(const MetricReport& r) {
  nlohmann::json doc;
  doc["frames_compared"] = r.frames_compared;
  doc["mcd_13"] = r.mcd_13;
  if (r.gpe.has_value()) {
    doc["gpe"] = *r.gpe;
  } else {
    doc["gpe"] = nullptr;
    doc["gpe_undefined_reason"] = "no_overlapping_voiced_frames";
  }
  doc["ffe"] = r.ffe;
  doc["vde"] = r.vde;
  doc["voiced_both"] = r.voiced_both;
  doc["pitch_error_frames"] = r.pitch_error_frames;
  doc["voicing_mismatch_frames"] = r.voicing_mismatch_frames;
  doc["tail"] = {{"overrun_ratio", r.tail.overrun_ratio},
                 {"trailing_active_sec", r.tail.trailing_active_sec},
                 {"defined_by", "toolkit"}};
  if (r.alignment.has_value()) {
    doc["alignment"] = {{"diagonality", r.alignment->diagonality},
                        {"mean_entropy", r.alignment->mean_entropy},
                        {"monotonicity", r.alignment->monotonicity},
                        {"focus_rate", r.alignment->focus_rate},
                        {"defined_by", "toolkit"}};
  }
  doc["config"] = r.config_echo;
  return doc;
}

PitchErrorCounts count_pitch_errors(const yin::PitchTrack& ref,
                                    const yin::PitchTrack& gen,
                                    const GpeConfig& cfg) {
  if (ref.pitch_hz.size() != ref.voiced.size() ||
      gen.pitch_hz.size() != gen.voiced.size()) {
    throw std::invalid_argument("pitch track arrays disagree in length");
  }
  PitchErrorCounts counts;
  counts.frames = std::min(ref.pitch_hz.size(), gen.pitch_hz.size());
  for (std::size_t t = 0; t < counts.frames; ++t) {
    const bool both = ref.voiced[t] && gen.voiced[t];
    if (both) {
      ++counts.voiced_both;
      if (std::abs(ref.pitch_hz[t] - gen.pitch_hz[t]) >
          cfg.rel_threshold * ref.pitch_hz[t]) {
        ++counts.pitch_errors;
      }
    }
    if (ref.voiced[t] != gen.voiced[t]) ++counts.voicing_mismatches;
  }
  return counts;
}

double mcd(const spectral::MfccSequence& ref, const spectral::MfccSequence& gen,
           int order) {
  if (ref.order != gen.order) {
    throw std::invalid_argument("order-mismatch: sequences carry orders " +
                                std::to_string(ref.order) + " and " +
                                std::to_string(gen.order));
  }
  if (order < 1 || order > ref.order) {
    throw std::invalid_argument("order-mismatch: requested order " +
                                std::to_string(order) +
                                " outside the sequences' order " +
                                std::to_string(ref.order));
  }
  const std::size_t frames = std::min(ref.coeffs.rows(), gen.coeffs.rows());
  if (frames == 0) {
    throw std::invalid_argument("empty-overlap: no frames to compare");
  }
  double total = 0.0;
  for (std::size_t t = 0; t < frames; ++t) {
    std::span<const double> a = ref.coeffs.row(t);
    std::span<const double> b = gen.coeffs.row(t);
    double sq = 0.0;
    for (int k = 1; k <= order; ++k) {  // coefficient 0 is energy: skipped
      const double d = a[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k)];
      sq += d * d;
    }
    total += std::sqrt(sq);
  }
  return total / static_cast<double>(frames);
}

std::optional<double> gpe(const yin::PitchTrack& ref, const yin::PitchTrack& gen,
                          const GpeConfig& cfg) {
  const PitchErrorCounts counts = count_pitch_errors(ref, gen, cfg);
  if (counts.voiced_both == 0) return std::nullopt;
  return static_cast<double>(counts.pitch_errors) /
         static_cast<double>(counts.voiced_both);
}

double vde(const yin::PitchTrack& ref, const yin::PitchTrack& gen) {
  const PitchErrorCounts counts = count_pitch_errors(ref, gen, GpeConfig{});
  if (counts.frames == 0) {
    throw std::invalid_argument("empty-overlap: no frames to compare");
  }
  return static_cast<double>(counts.voicing_mismatches) /
         static_cast<double>(counts.frames);
}

double ffe(const yin::PitchTrack& ref, const yin::PitchTrack& gen,
           const GpeConfig& cfg) {
  const PitchErrorCounts counts = count_pitch_errors(ref, gen, cfg);
  if (counts.frames == 0) {
    throw std::invalid_argument("empty-overlap: no frames to compare");
  }
  return static_cast<double>(counts.pitch_errors + counts.voicing_mismatches) /
         static_cast<double>(counts.frames);
}

MetricReport evaluate_pair(const audio::AudioClip& ref,
                           const audio::AudioClip& gen,
                           const EvalConfig& config) {
  config.validate();
  if (ref.sample_rate_hz != gen.sample_rate_hz) {
    throw std::invalid_argument("sample-rate-mismatch: reference " +
                                std::to_string(ref.sample_rate_hz) +
                                " Hz vs generated " +
                                std::to_string(gen.sample_rate_hz) + " Hz");
  }

  const spectral::MfccSequence ref_mfcc =
      spectral::mfcc(spectral::mel_spectrogram(ref, config.spectral), config.mcd_order);
  const spectral::MfccSequence gen_mfcc =
      spectral::mfcc(spectral::mel_spectrogram(gen, config.spectral), config.mcd_order);
  const yin::PitchTrack ref_pitch = yin::track(ref, config.yin);
  const yin::PitchTrack gen_pitch = yin::track(gen, config.yin);

  const PitchErrorCounts counts =
      count_pitch_errors(ref_pitch, gen_pitch, config.gpe);
  const std::size_t mfcc_frames =
      std::min(ref_mfcc.coeffs.rows(), gen_mfcc.coeffs.rows());
  if (counts.frames == 0 || mfcc_frames == 0) {
    throw std::invalid_argument(
        "empty-overlap: clips are shorter than one analysis frame");
  }

  MetricReport report;
  report.frames_compared = counts.frames;
  report.mcd_13 = mcd(ref_mfcc, gen_mfcc, config.mcd_order);
  if (config.mcd_db_scale) report.mcd_13 *= kMcdDbFactor;
  if (counts.voiced_both > 0) {
    report.gpe = static_cast<double>(counts.pitch_errors) /
                 static_cast<double>(counts.voiced_both);
  }
  report.vde = static_cast<double>(counts.voicing_mismatches) /
               static_cast<double>(counts.frames);
  report.ffe =
      static_cast<double>(counts.pitch_errors + counts.voicing_mismatches) /
      static_cast<double>(counts.frames);
  report.voiced_both = counts.voiced_both;
  report.pitch_error_frames = counts.pitch_errors;
  report.voicing_mismatch_frames = counts.voicing_mismatches;
  report.tail = diagnostics::tail_report(ref, gen, config.tail_silence_db,
                                         config.spectral.frame);
  report.config_echo = config_to_json(config);
  return report;
}

}  // namespace ttseval::metrics
