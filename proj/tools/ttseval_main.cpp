// tools/ttseval_main.cpp
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
//
// Batch evaluation harness for comparing synthesized speech against
// reference recordings: cepstral distortion, pitch/voicing error rates,
// attention alignment diagnostics, and checkpoint learning curves.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "ttseval/diagnostics.hpp"
#include "ttseval/harness.hpp"
#include "ttseval/metrics.hpp"
#include "ttseval/yin.hpp"

namespace {

using ttseval::harness::format_double;

ttseval::metrics::EvalConfig make_config(const std::string& config_path) {
  if (config_path.empty()) return ttseval::metrics::EvalConfig{};
  return ttseval::metrics::load_config(config_path);
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

int default_jobs() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

int run_evaluate(const std::string& ref_path, const std::string& gen_path,
                 const std::string& attn_path, const std::string& config_path,
                 bool as_csv) {
  const ttseval::metrics::EvalConfig config = make_config(config_path);
  const ttseval::audio::AudioClip ref = ttseval::audio::load_wav(ref_path);
  const ttseval::audio::AudioClip gen = ttseval::audio::load_wav(gen_path);
  ttseval::metrics::MetricReport report =
      ttseval::metrics::evaluate_pair(ref, gen, config);
  if (!attn_path.empty()) {
    report.alignment = ttseval::diagnostics::analyze_alignment(
        ttseval::diagnostics::load_attention_csv(attn_path));
  }
  if (as_csv) {
    ttseval::harness::PairResult result;
    result.id = std::filesystem::path(gen_path).stem().string();
    result.report = std::move(report);
    std::cout << ttseval::harness::batch_csv({result});
  } else {
    std::cout << ttseval::metrics::report_to_json(report).dump(2) << '\n';
  }
  return 0;
}

int run_batch(const std::string& manifest_path, const std::string& out_path,
              int jobs, const std::string& config_path) {
  const ttseval::metrics::EvalConfig config = make_config(config_path);
  const std::vector<ttseval::harness::ManifestEntry> entries =
      ttseval::harness::load_manifest(manifest_path);
  const std::vector<ttseval::harness::PairResult> results =
      ttseval::harness::batch_evaluate(entries, config, jobs);
  write_text_file(out_path, ttseval::harness::batch_csv(results));

  std::size_t failed = 0;
  for (const auto& r : results) {
    if (!r.ok()) {
      ++failed;
      std::cerr << "entry '" << r.id << "' failed: " << r.error << '\n';
    }
  }
  std::cerr << results.size() - failed << "/" << results.size()
            << " pairs evaluated -> " << out_path << '\n';
  return failed == 0 ? 0 : 2;
}

int run_curves(const std::string& manifest_path, const std::string& out_path,
               const std::string& config_path) {
  const ttseval::metrics::EvalConfig config = make_config(config_path);
  const std::vector<ttseval::harness::ManifestEntry> entries =
      ttseval::harness::load_manifest(manifest_path);
  for (const auto& entry : entries) {
    if (!entry.step.has_value()) {
      throw std::runtime_error("missing-step-field: entry '" + entry.id +
                               "' has no training step");
    }
  }
  const std::vector<ttseval::harness::PairResult> results =
      ttseval::harness::batch_evaluate(entries, config, default_jobs());
  write_text_file(out_path, ttseval::harness::curves_csv(
                                ttseval::harness::aggregate_curves(entries, results)));

  std::size_t failed = 0;
  for (const auto& r : results) {
    if (!r.ok()) {
      ++failed;
      std::cerr << "entry '" << r.id << "' failed: " << r.error << '\n';
    }
  }
  std::cerr << "curves over " << results.size() - failed << "/"
            << results.size() << " pairs -> " << out_path << '\n';
  return failed == 0 ? 0 : 2;
}

int run_pitch(const std::string& in_path, const std::string& out_path,
              const std::string& config_path) {
  const ttseval::metrics::EvalConfig config = make_config(config_path);
  const ttseval::audio::AudioClip clip = ttseval::audio::load_wav(in_path);
  const ttseval::yin::PitchTrack pitch = ttseval::yin::track(clip, config.yin);

  std::string csv = "frame_index,time_sec,voiced,pitch_hz,aperiodicity\n";
  const double hop_sec = static_cast<double>(config.yin.frame.hop_length) /
                         static_cast<double>(clip.sample_rate_hz);
  for (std::size_t t = 0; t < pitch.pitch_hz.size(); ++t) {
    csv += std::to_string(t);
    csv += ',' + format_double(static_cast<double>(t) * hop_sec);
    csv += pitch.voiced[t] ? ",1," : ",0,";
    csv += format_double(pitch.pitch_hz[t]);
    csv += ',' + format_double(pitch.aperiodicity[t]);
    csv += '\n';
  }
  write_text_file(out_path, csv);
  std::cerr << pitch.pitch_hz.size() << " frames -> " << out_path << '\n';
  return 0;
}

int run_attn(const std::string& in_path, bool as_json) {
  const ttseval::diagnostics::AttentionMatrix attn =
      ttseval::diagnostics::load_attention_csv(in_path);
  const ttseval::diagnostics::AlignmentDiagnostics d =
      ttseval::diagnostics::analyze_alignment(attn);
  if (as_json) {
    nlohmann::json doc = {{"diagonality", d.diagonality},
                          {"mean_entropy", d.mean_entropy},
                          {"monotonicity", d.monotonicity},
                          {"focus_rate", d.focus_rate},
                          {"decoder_steps", attn.weights.rows()},
                          {"source_steps", attn.weights.cols()},
                          {"defined_by", "toolkit"}};
    std::cout << doc.dump(2) << '\n';
  } else {
    std::cout << "decoder_steps " << attn.weights.rows() << '\n'
              << "source_steps " << attn.weights.cols() << '\n'
              << "diagonality " << format_double(d.diagonality) << '\n'
              << "mean_entropy " << format_double(d.mean_entropy) << '\n'
              << "monotonicity " << format_double(d.monotonicity) << '\n'
              << "focus_rate " << format_double(d.focus_rate) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ttseval: objective evaluation of synthesized speech"};
  app.require_subcommand(1);

  std::string ref_path, gen_path, attn_path, config_path;
  bool as_json = false, as_csv = false;
  CLI::App* evaluate = app.add_subcommand("evaluate", "Evaluate one ref/gen pair");
  evaluate->add_option("--ref", ref_path, "Reference WAV")->required();
  evaluate->add_option("--gen", gen_path, "Generated WAV")->required();
  evaluate->add_option("--attn", attn_path, "Attention matrix CSV");
  evaluate->add_option("--config", config_path, "Config JSON");
  CLI::Option* json_flag = evaluate->add_flag("--json", as_json, "JSON output (default)");
  evaluate->add_flag("--csv", as_csv, "CSV output")->excludes(json_flag);

  std::string manifest_path, out_path;
  int jobs = default_jobs();
  CLI::App* batch = app.add_subcommand("batch", "Evaluate a JSONL manifest");
  batch->add_option("--manifest", manifest_path, "Manifest (JSON Lines)")->required();
  batch->add_option("--out", out_path, "Output CSV")->required();
  batch->add_option("--jobs", jobs, "Parallel pair evaluations")
      ->check(CLI::PositiveNumber);
  batch->add_option("--config", config_path, "Config JSON");

  CLI::App* curves = app.add_subcommand(
      "curves", "Per-training-step metric means from a manifest with steps");
  curves->add_option("--manifest", manifest_path, "Manifest (JSON Lines)")->required();
  curves->add_option("--out", out_path, "Output CSV")->required();
  curves->add_option("--config", config_path, "Config JSON");

  std::string in_path;
  CLI::App* pitch = app.add_subcommand("pitch", "Dump a YIN pitch track as CSV");
  pitch->add_option("--in", in_path, "Input WAV")->required();
  pitch->add_option("--out", out_path, "Output CSV")->required();
  pitch->add_option("--config", config_path, "Config JSON");

  CLI::App* attn = app.add_subcommand("attn", "Score an attention matrix CSV");
  attn->add_option("--in", in_path, "Attention matrix CSV")->required();
  attn->add_flag("--json", as_json, "JSON output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (evaluate->parsed()) {
      return run_evaluate(ref_path, gen_path, attn_path, config_path, as_csv);
    }
    if (batch->parsed()) {
      return run_batch(manifest_path, out_path, jobs, config_path);
    }
    if (curves->parsed()) {
      return run_curves(manifest_path, out_path, config_path);
    }
    if (pitch->parsed()) {
      return run_pitch(in_path, out_path, config_path);
    }
    if (attn->parsed()) {
      return run_attn(in_path, as_json);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
