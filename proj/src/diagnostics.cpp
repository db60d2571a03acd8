// ttseval/diagnostics.cpp
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

#include "ttseval/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

namespace ttseval::diagnostics {

namespace {

constexpr double kRowSumTolerance = 1e-4;

// Validates shape/values and returns row-renormalized weights.
Matrix normalized_rows(const Matrix& weights) {
  if (weights.empty()) {
    throw std::invalid_argument("malformed-matrix: empty attention matrix");
  }
  Matrix out = weights;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    double sum = 0.0;
    for (double v : out.row(r)) {
      if (!std::isfinite(v) || v < 0.0) {
        throw std::invalid_argument(
            "malformed-matrix: negative or non-finite weight in row " +
            std::to_string(r));
      }
      sum += v;
    }
    if (sum <= 0.0) {
      throw std::invalid_argument("malformed-matrix: row " + std::to_string(r) +
                                  " has zero mass");
    }
    for (double& v : out.row(r)) v /= sum;
  }
  return out;
}

std::size_t row_argmax(std::span<const double> row) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < row.size(); ++i) {
    if (row[i] > row[best]) best = i;  // strict: ties keep the lowest index
  }
  return best;
}

}  // namespace

double diagonality_score(const AttentionMatrix& attn) {
  const Matrix w = normalized_rows(attn.weights);
  const std::size_t t_dec = w.rows();
  const std::size_t t_src = w.cols();
  double total = 0.0;
  for (std::size_t t = 0; t < t_dec; ++t) {
    double centroid = 0.0;
    std::span<const double> row = w.row(t);
    for (std::size_t i = 0; i < t_src; ++i) {
      centroid += row[i] * static_cast<double>(i);
    }
    const double ideal =
        t_dec > 1 ? static_cast<double>(t) * static_cast<double>(t_src - 1) /
                        static_cast<double>(t_dec - 1)
                  : 0.0;
    total += std::abs(centroid - ideal) / static_cast<double>(t_src);
  }
  return 1.0 - total / static_cast<double>(t_dec);
}

double attention_entropy(const AttentionMatrix& attn) {
  const Matrix w = normalized_rows(attn.weights);
  double total = 0.0;
  for (std::size_t t = 0; t < w.rows(); ++t) {
    double entropy = 0.0;
    for (double v : w.row(t)) {
      if (v > 0.0) entropy -= v * std::log(v);
    }
    total += entropy;
  }
  return total / static_cast<double>(w.rows());
}

double monotonicity(const AttentionMatrix& attn) {
  const Matrix w = normalized_rows(attn.weights);
  if (w.rows() < 2) {
    throw std::invalid_argument("too-few-rows: monotonicity needs >= 2 rows");
  }
  std::size_t non_decreasing = 0;
  std::size_t prev = row_argmax(w.row(0));
  for (std::size_t t = 1; t < w.rows(); ++t) {
    const std::size_t cur = row_argmax(w.row(t));
    if (cur >= prev) ++non_decreasing;
    prev = cur;
  }
  return static_cast<double>(non_decreasing) / static_cast<double>(w.rows() - 1);
}

double focus_rate(const AttentionMatrix& attn) {
  const Matrix w = normalized_rows(attn.weights);
  double total = 0.0;
  for (std::size_t t = 0; t < w.rows(); ++t) {
    std::span<const double> row = w.row(t);
    total += row[row_argmax(row)];
  }
  return total / static_cast<double>(w.rows());
}

AlignmentDiagnostics analyze_alignment(const AttentionMatrix& attn) {
  AlignmentDiagnostics d;
  d.diagonality = diagonality_score(attn);
  d.mean_entropy = attention_entropy(attn);
  d.monotonicity = attn.weights.rows() >= 2 ? monotonicity(attn) : 1.0;
  d.focus_rate = focus_rate(attn);
  return d;
}

AttentionMatrix load_attention_csv(const std::string& path) {
  Matrix m = read_matrix_csv(path);
  if (m.empty()) {
    throw std::runtime_error("malformed-matrix: " + path +
                             " holds no attention rows");
  }
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double sum = 0.0;
    for (double v : m.row(r)) {
      if (!std::isfinite(v) || v < 0.0) {
        throw std::runtime_error("malformed-matrix: negative or non-finite "
                                 "weight in row " +
                                 std::to_string(r) + " of " + path);
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kRowSumTolerance) {
      throw std::runtime_error(
          "malformed-matrix: row " + std::to_string(r) + " of " + path +
          " sums to " + std::to_string(sum) +
          ", outside 1 +/- 0.0001; not an attention dump?");
    }
    for (double& v : m.row(r)) v /= sum;
  }
  return AttentionMatrix{std::move(m)};
}

void save_attention_csv(const std::string& path, const AttentionMatrix& attn) {
  write_matrix_csv(path, attn.weights);
}

TailReport tail_report(const audio::AudioClip& ref, const audio::AudioClip& gen,
                       double silence_db_threshold,
                       const audio::FrameParams& frame) {
  if (ref.sample_rate_hz != gen.sample_rate_hz) {
    throw std::invalid_argument("sample-rate-mismatch: " +
                                std::to_string(ref.sample_rate_hz) + " vs " +
                                std::to_string(gen.sample_rate_hz));
  }
  frame.validate();
  const std::size_t t_ref = audio::frame_count(ref.samples.size(), frame);
  const std::size_t t_gen = audio::frame_count(gen.samples.size(), frame);

  TailReport report;
  const std::size_t denom = std::max<std::size_t>(t_ref, 1);
  report.overrun_ratio =
      t_gen > t_ref
          ? static_cast<double>(t_gen - t_ref) / static_cast<double>(denom)
          : 0.0;

  // The tail is everything the generated clip holds past the reference's
  // last sample, measured in hop-sized RMS blocks so reference content never
  // bleeds into the babble estimate. A non-empty final partial block counts
  // with the RMS of the samples it actually has.
  const std::size_t hop = static_cast<std::size_t>(frame.hop_length);
  std::size_t active = 0;
  for (std::size_t begin = ref.samples.size(); begin < gen.samples.size();
       begin += hop) {
    const std::size_t end = std::min(begin + hop, gen.samples.size());
    double energy = 0.0;
    for (std::size_t j = begin; j < end; ++j) {
      energy += gen.samples[j] * gen.samples[j];
    }
    const double rms = std::sqrt(energy / static_cast<double>(end - begin));
    if (rms > 0.0 && 20.0 * std::log10(rms) > silence_db_threshold) ++active;
  }
  report.trailing_active_sec = static_cast<double>(active * hop) /
                               static_cast<double>(gen.sample_rate_hz);
  return report;
}

}  // namespace ttseval::diagnostics
