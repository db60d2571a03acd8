// ttseval/attention.hpp
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

#ifndef TTSEVAL_ATTENTION_HPP_
#define TTSEVAL_ATTENTION_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ttseval/matrix.hpp"

namespace ttseval::attention {

// Forward-only location-sensitive attention. This is a numerical reference
// for inspecting alignment behavior, not a trainable layer: parameters are
// supplied externally (seeded at random or loaded from a CSV bundle) and no
// gradients exist anywhere.
//
// Scoring is additive: e_i = v . tanh(W_q q + W_k k_i + W_f loc_i), where
// loc_i are convolved features of the previous and cumulative alignment
// weights at source step i.
struct AttentionParams {
  int query_dim = 0;
  int key_dim = 0;
  int attn_dim = 0;
  int location_filters = 0;
  int location_kernel = 0;  // odd

  Matrix query_proj;     // attn_dim x query_dim
  Matrix key_proj;       // attn_dim x key_dim
  Matrix location_proj;  // attn_dim x location_filters
  // One row per filter: location_kernel taps for the previous-weights
  // channel followed by location_kernel taps for the cumulative channel.
  Matrix location_conv;
  std::vector<double> score_vector;  // attn_dim

  void validate() const;
};

// The "location" signal: what the head attended to one step ago and in
// total so far. Starts all-zero for a fresh decode.
struct AttentionState {
  std::vector<double> cumulative_weights;
  std::vector<double> prev_weights;
};

AttentionState initial_state(std::size_t source_len);

struct StepResult {
  std::vector<double> context;
  std::vector<double> weights;  // probability vector over source steps
  AttentionState state;
};

// Context of the two heads concatenated encoder-half first.
struct DualContext {
  std::vector<double> context;
  std::vector<double> enc_weights;
  std::vector<double> aux_weights;
};

struct DualStepResult {
  DualContext context;
  AttentionState enc_state;
  AttentionState aux_state;
};

// Same-length 1-D convolution (zero padded) of the stacked
// [prev_weights; cumulative_weights] signal; row i holds the
// location_filters features for source step i.
Matrix location_features(const AttentionState& state,
                         const AttentionParams& params);

std::vector<double> softmax(std::span<const double> energies);

// One decoder step of a single head. keys and values have one row per
// source step; the state must match the source length.
StepResult attention_step(std::span<const double> query, const Matrix& keys,
                          const Matrix& values, const AttentionState& state,
                          const AttentionParams& params);

// Two independent heads over the encoder stream and an auxiliary text
// feature stream (e.g. a pre-trained language model's token states), each
// with its own parameters and state. The two context vectors are
// concatenated encoder-first.
DualStepResult dual_attention_step(
    std::span<const double> query, const Matrix& enc_keys,
    const Matrix& enc_values, const Matrix& aux_keys, const Matrix& aux_values,
    const AttentionState& enc_state, const AttentionState& aux_state,
    const AttentionParams& enc_params, const AttentionParams& aux_params);

// True iff the stop probability strictly exceeds 0.5. Probabilities outside
// [0,1] are rejected.
bool stop_decision(double stop_prob);

// Uniform values in [-0.5, 0.5] from a fixed-sequence generator, so a seed
// names the same parameters on every platform.
AttentionParams random_params(int query_dim, int key_dim, int attn_dim,
                              int location_filters, int location_kernel,
                              std::uint64_t seed);

// Parameter bundle on disk: a JSON manifest naming each matrix, its shape,
// and its CSV file (paths relative to the manifest). save_params writes the
// CSVs next to the manifest.
AttentionParams load_params(const std::string& manifest_path);
void save_params(const AttentionParams& params,
                 const std::string& manifest_path);

}  // namespace ttseval::attention

#endif  // TTSEVAL_ATTENTION_HPP_
