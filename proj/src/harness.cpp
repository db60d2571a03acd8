// ttseval/harness.cpp
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

#include "ttseval/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include <json.hpp>

namespace ttseval::harness {

std::vector<ManifestEntry> load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest " + path);

  std::vector<ManifestEntry> entries;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw std::runtime_error("manifest parse error at line " +
                               std::to_string(line_no) + ": " + e.what());
    }
    ManifestEntry entry;
    for (const char* field : {"id", "ref_path", "gen_path"}) {
      if (!doc.contains(field)) {
        throw std::runtime_error("missing-required-field: '" +
                                 std::string(field) + "' at line " +
                                 std::to_string(line_no));
      }
    }
    entry.id = doc.at("id").get<std::string>();
    if (entry.id.empty()) {
      throw std::runtime_error("missing-required-field: empty id at line " +
                               std::to_string(line_no));
    }
    entry.ref_path = doc.at("ref_path").get<std::string>();
    entry.gen_path = doc.at("gen_path").get<std::string>();
    if (doc.contains("attn_path") && !doc.at("attn_path").is_null()) {
      entry.attn_path = doc.at("attn_path").get<std::string>();
    }
    if (doc.contains("step") && !doc.at("step").is_null()) {
      const std::int64_t step = doc.at("step").get<std::int64_t>();
      if (step < 0) {
        throw std::runtime_error("step must be non-negative at line " +
                                 std::to_string(line_no));
      }
      entry.step = step;
    }
    if (!seen_ids.insert(entry.id).second) {
      throw std::runtime_error("duplicate-id: '" + entry.id + "' at line " +
                               std::to_string(line_no));
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

namespace {

PairResult evaluate_entry(const ManifestEntry& entry,
                          const metrics::EvalConfig& config) {
  PairResult result;
  result.id = entry.id;
  try {
    const audio::AudioClip ref = audio::load_wav(entry.ref_path);
    const audio::AudioClip gen = audio::load_wav(entry.gen_path);
    metrics::MetricReport report = metrics::evaluate_pair(ref, gen, config);
    if (entry.attn_path.has_value()) {
      const diagnostics::AttentionMatrix attn =
          diagnostics::load_attention_csv(*entry.attn_path);
      report.alignment = diagnostics::analyze_alignment(attn);
    }
    result.report = std::move(report);
  } catch (const std::exception& e) {
    result.error = e.what();
  }
  return result;
}

}  // namespace

std::vector<PairResult> batch_evaluate(const std::vector<ManifestEntry>& entries,
                                       const metrics::EvalConfig& config,
                                       int parallelism) {
  if (parallelism < 1) {
    throw std::invalid_argument("parallelism must be >= 1");
  }
  config.validate();

  std::vector<PairResult> results(entries.size());
  if (entries.empty()) return results;

  const int workers =
      std::min<int>(parallelism, static_cast<int>(entries.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      results[i] = evaluate_entry(entries[i], config);
    }
    return results;
  }

  // Each worker claims the next unclaimed index; slot i always holds entry
  // i's outcome, so completion order never shows in the output.
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (std::size_t i = next.fetch_add(1); i < entries.size();
           i = next.fetch_add(1)) {
        results[i] = evaluate_entry(entries[i], config);
      }
    });
  }
  for (std::thread& t : pool) t.join();
  return results;
}

std::vector<LearningCurvePoint> aggregate_curves(
    const std::vector<ManifestEntry>& entries,
    const std::vector<PairResult>& results) {
  if (entries.size() != results.size()) {
    throw std::invalid_argument("entries and results disagree in length");
  }
  struct Accumulator {
    std::size_t n_pairs = 0;
    std::size_t n_gpe_defined = 0;
    double mcd_sum = 0.0;
    double gpe_sum = 0.0;
    double ffe_sum = 0.0;
  };
  std::map<std::int64_t, Accumulator> by_step;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (!entries[i].step.has_value()) {
      throw std::invalid_argument("missing-step-field: entry '" +
                                  entries[i].id + "' has no training step");
    }
    if (!results[i].ok()) continue;
    Accumulator& acc = by_step[*entries[i].step];
    const metrics::MetricReport& r = *results[i].report;
    ++acc.n_pairs;
    acc.mcd_sum += r.mcd_13;
    acc.ffe_sum += r.ffe;
    if (r.gpe.has_value()) {
      ++acc.n_gpe_defined;
      acc.gpe_sum += *r.gpe;
    }
  }

  std::vector<LearningCurvePoint> points;
  points.reserve(by_step.size());
  for (const auto& [step, acc] : by_step) {
    LearningCurvePoint p;
    p.step = step;
    p.n_pairs = acc.n_pairs;
    p.n_gpe_defined = acc.n_gpe_defined;
    if (acc.n_pairs > 0) {
      p.mcd_13 = acc.mcd_sum / static_cast<double>(acc.n_pairs);
      p.ffe = acc.ffe_sum / static_cast<double>(acc.n_pairs);
    }
    if (acc.n_gpe_defined > 0) {
      p.gpe = acc.gpe_sum / static_cast<double>(acc.n_gpe_defined);
    }
    points.push_back(p);
  }
  return points;  // std::map already sorted the steps
}

std::vector<LearningCurvePoint> build_curves(
    const std::vector<ManifestEntry>& entries, const metrics::EvalConfig& config,
    int parallelism) {
  for (const ManifestEntry& entry : entries) {
    if (!entry.step.has_value()) {
      throw std::invalid_argument("missing-step-field: entry '" + entry.id +
                                  "' has no training step");
    }
  }
  return aggregate_curves(entries, batch_evaluate(entries, config, parallelism));
}

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  return buf;
}

namespace {

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string quoted = "\"";
  for (char c : field) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

}  // namespace

std::string batch_csv(const std::vector<PairResult>& results) {
  std::string out =
      "id,frames,mcd13,gpe,ffe,vde,diagonality,entropy,monotonicity,"
      "overrun_ratio,trailing_active_sec,error\n";
  for (const PairResult& r : results) {
    out += csv_escape(r.id);
    if (r.ok()) {
      const metrics::MetricReport& m = *r.report;
      out += ',' + std::to_string(m.frames_compared);
      out += ',' + format_double(m.mcd_13);
      out += ',';
      if (m.gpe.has_value()) out += format_double(*m.gpe);
      out += ',' + format_double(m.ffe);
      out += ',' + format_double(m.vde);
      if (m.alignment.has_value()) {
        out += ',' + format_double(m.alignment->diagonality);
        out += ',' + format_double(m.alignment->mean_entropy);
        out += ',' + format_double(m.alignment->monotonicity);
      } else {
        out += ",,,";
      }
      out += ',' + format_double(m.tail.overrun_ratio);
      out += ',' + format_double(m.tail.trailing_active_sec);
      out += ',';
    } else {
      out += ",,,,,,,,,,," + csv_escape(r.error);
    }
    out += '\n';
  }
  return out;
}

std::string curves_csv(const std::vector<LearningCurvePoint>& points) {
  std::string out =
      "# per-step means are unweighted arithmetic means over pairs; "
      "the gpe mean skips pairs with undefined gpe\n"
      "step,n_pairs,n_gpe_defined,mcd13,gpe,ffe\n";
  for (const LearningCurvePoint& p : points) {
    out += std::to_string(p.step);
    out += ',' + std::to_string(p.n_pairs);
    out += ',' + std::to_string(p.n_gpe_defined);
    out += ',' + format_double(p.mcd_13);
    out += ',';
    if (p.gpe.has_value()) out += format_double(*p.gpe);
    out += ',' + format_double(p.ffe);
    out += '\n';
  }
  return out;
}

}  // namespace ttseval::harness
