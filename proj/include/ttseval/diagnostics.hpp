// ttseval/diagnostics.hpp
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

#ifndef TTSEVAL_DIAGNOSTICS_HPP_
#define TTSEVAL_DIAGNOSTICS_HPP_

#include <string>

#include "ttseval/audio_io.hpp"
#include "ttseval/matrix.hpp"

namespace ttseval::diagnostics {

// Decoder-step x source-step attention weights. Rows are expected to be
// (close to) probability vectors; every scoring function renormalizes rows
// before computing, so rows scaled by a positive constant score identically.
struct AttentionMatrix {
  Matrix weights;
};

// Toolkit-defined alignment quality scores. These quantify how diagonal,
// peaked, and monotone an alignment is; they are this toolkit's definitions,
// not standardized measures, and are labeled as such in serialized reports.
struct AlignmentDiagnostics {
  double diagonality = 0.0;   // [0,1], 1 = centroids on the ideal diagonal
  double mean_entropy = 0.0;  // nats, mean row entropy, <= ln(T_src)
  double monotonicity = 0.0;  // [0,1], fraction of non-decreasing argmax steps
  double focus_rate = 0.0;    // [0,1], mean max row weight
};

// End-of-utterance overrun measurements: how far the generated clip runs
// past the reference and how much of that tail is non-silent.
struct TailReport {
  double overrun_ratio = 0.0;        // max(0, T_gen - T_ref) / max(T_ref, 1)
  double trailing_active_sec = 0.0;  // duration of non-silent tail frames
};

// 1 - mean over decoder rows of |centroid - ideal| / T_src, where the
// centroid is the weight-weighted mean source index and ideal row t is
// t*(T_src-1)/(T_dec-1) (0 for single-row matrices).
double diagonality_score(const AttentionMatrix& attn);

// Mean over rows of -sum w ln w, with 0 ln 0 = 0, after row renormalization.
double attention_entropy(const AttentionMatrix& attn);

// Fraction of consecutive row pairs whose argmax does not decrease. Ties
// within a row resolve to the lowest index. Requires at least two rows.
double monotonicity(const AttentionMatrix& attn);

// Mean over rows of the maximum renormalized weight.
double focus_rate(const AttentionMatrix& attn);

// All four scores in one pass. Single-row matrices report monotonicity 1.0
// (there is no consecutive pair to violate it).
AlignmentDiagnostics analyze_alignment(const AttentionMatrix& attn);

// Attention matrix file format: plain CSV of reals, one row per decoder
// step, uniform column count, no header. Rows must sum to 1 within 1e-4 and
// are renormalized exactly on load; anything further off is rejected as a
// corrupt dump.
AttentionMatrix load_attention_csv(const std::string& path);
void save_attention_csv(const std::string& path, const AttentionMatrix& attn);

// Frame counts for overrun_ratio use `frame`. trailing_active_sec chops the
// generated samples past the reference's end into hop-sized RMS blocks and
// sums one hop of duration for every block above silence_db_threshold
// (dBFS). Both clips must share one sample rate.
TailReport tail_report(const audio::AudioClip& ref, const audio::AudioClip& gen,
                       double silence_db_threshold,
                       const audio::FrameParams& frame);

}  // namespace ttseval::diagnostics

#endif  // TTSEVAL_DIAGNOSTICS_HPP_
