// ttseval/harness.hpp
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

#ifndef TTSEVAL_HARNESS_HPP_
#define TTSEVAL_HARNESS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ttseval/metrics.hpp"

namespace ttseval::harness {

// Manifests are JSON Lines: one object per line with "id", "ref_path",
// "gen_path", optional "attn_path", and optional non-negative "step"
// (training step, for learning curves). Blank lines are skipped.
struct ManifestEntry {
  std::string id;
  std::string ref_path;
  std::string gen_path;
  std::optional<std::string> attn_path;
  std::optional<std::int64_t> step;
};

std::vector<ManifestEntry> load_manifest(const std::string& path);

// One manifest entry's outcome. error is empty on success; a failed entry
// keeps its slot so output rows always line up with the manifest.
struct PairResult {
  std::string id;
  std::optional<metrics::MetricReport> report;
  std::string error;

  bool ok() const { return error.empty(); }
};

// Evaluates every entry, up to `parallelism` pairs at a time. Results come
// back in manifest order no matter how the work interleaves, and per-entry
// failures (missing file, rate mismatch, corrupt attention dump) are
// recorded without aborting the rest of the batch.
std::vector<PairResult> batch_evaluate(const std::vector<ManifestEntry>& entries,
                                       const metrics::EvalConfig& config,
                                       int parallelism);

// Per-step means over the pairs evaluated at that step.
struct LearningCurvePoint {
  std::int64_t step = 0;
  std::size_t n_pairs = 0;        // pairs that evaluated successfully
  std::size_t n_gpe_defined = 0;  // pairs whose GPE was defined
  double mcd_13 = 0.0;
  std::optional<double> gpe;  // mean over defined values only
  double ffe = 0.0;
};

// Groups manifest entries by training step and averages each metric,
// sorted by step. Every entry must carry a step. The GPE mean skips pairs
// with undefined GPE; a step where every pair is undefined reports an
// empty mean.
std::vector<LearningCurvePoint> build_curves(
    const std::vector<ManifestEntry>& entries, const metrics::EvalConfig& config,
    int parallelism = 1);

// Aggregation half of build_curves, for callers that already ran the batch.
std::vector<LearningCurvePoint> aggregate_curves(
    const std::vector<ManifestEntry>& entries,
    const std::vector<PairResult>& results);

// CSV renderings. Batch columns, in order: id, frames, mcd13, gpe, ffe,
// vde, diagonality, entropy, monotonicity, overrun_ratio,
// trailing_active_sec, error. Undefined GPE and absent alignment scores
// serialize as empty fields. Output is a pure function of its inputs, so
// reruns at any parallelism are byte-identical.
std::string batch_csv(const std::vector<PairResult>& results);
std::string curves_csv(const std::vector<LearningCurvePoint>& points);

// Shared numeric formatting for CSV fields (9 significant digits).
std::string format_double(double value);

}  // namespace ttseval::harness

#endif  // TTSEVAL_HARNESS_HPP_
