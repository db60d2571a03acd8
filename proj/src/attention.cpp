// ttseval/attention.cpp
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

#include "ttseval/attention.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include <json.hpp>

namespace ttseval::attention {

namespace {

void check_shape(const Matrix& m, std::size_t rows, std::size_t cols,
                 const char* name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw std::invalid_argument(
        std::string("dimension-mismatch: ") + name + " is " +
        std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
        ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
  }
}

std::vector<double> mat_vec(const Matrix& m, std::span<const double> v) {
  std::vector<double> out(m.rows(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    double acc = 0.0;
    std::span<const double> row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) acc += row[c] * v[c];
    out[r] = acc;
  }
  return out;
}

}  // namespace

void AttentionParams::validate() const {
  if (query_dim < 1 || key_dim < 1 || attn_dim < 1 || location_filters < 1) {
    throw std::invalid_argument("all attention dimensions must be >= 1");
  }
  if (location_kernel < 1 || location_kernel % 2 == 0) {
    throw std::invalid_argument("location_kernel must be odd and >= 1, got " +
                                std::to_string(location_kernel));
  }
  const std::size_t a = static_cast<std::size_t>(attn_dim);
  check_shape(query_proj, a, static_cast<std::size_t>(query_dim), "query_proj");
  check_shape(key_proj, a, static_cast<std::size_t>(key_dim), "key_proj");
  check_shape(location_proj, a, static_cast<std::size_t>(location_filters),
              "location_proj");
  check_shape(location_conv, static_cast<std::size_t>(location_filters),
              2 * static_cast<std::size_t>(location_kernel), "location_conv");
  if (score_vector.size() != a) {
    throw std::invalid_argument("dimension-mismatch: score_vector has " +
                                std::to_string(score_vector.size()) +
                                " entries, expected " + std::to_string(a));
  }
}

AttentionState initial_state(std::size_t source_len) {
  AttentionState s;
  s.cumulative_weights.assign(source_len, 0.0);
  s.prev_weights.assign(source_len, 0.0);
  return s;
}

Matrix location_features(const AttentionState& state,
                         const AttentionParams& params) {
  params.validate();
  const std::size_t t_src = state.prev_weights.size();
  if (state.cumulative_weights.size() != t_src) {
    throw std::invalid_argument(
        "dimension-mismatch: state channels differ in length");
  }
  const int kernel = params.location_kernel;
  const int half = kernel / 2;
  Matrix features(t_src, static_cast<std::size_t>(params.location_filters));
  for (std::size_t i = 0; i < t_src; ++i) {
    for (int f = 0; f < params.location_filters; ++f) {
      std::span<const double> taps =
          params.location_conv.row(static_cast<std::size_t>(f));
      double acc = 0.0;
      for (int k = 0; k < kernel; ++k) {
        const std::ptrdiff_t j =
            static_cast<std::ptrdiff_t>(i) + k - half;  // zero padded
        if (j < 0 || j >= static_cast<std::ptrdiff_t>(t_src)) continue;
        const std::size_t src = static_cast<std::size_t>(j);
        acc += taps[static_cast<std::size_t>(k)] * state.prev_weights[src];
        acc += taps[static_cast<std::size_t>(kernel + k)] *
               state.cumulative_weights[src];
      }
      features(i, static_cast<std::size_t>(f)) = acc;
    }
  }
  return features;
}

std::vector<double> softmax(std::span<const double> energies) {
  if (energies.empty()) {
    throw std::invalid_argument("empty-source: softmax over zero energies");
  }
  const double peak = *std::max_element(energies.begin(), energies.end());
  std::vector<double> out(energies.size());
  double total = 0.0;
  for (std::size_t i = 0; i < energies.size(); ++i) {
    out[i] = std::exp(energies[i] - peak);
    total += out[i];
  }
  for (double& w : out) w /= total;
  return out;
}

StepResult attention_step(std::span<const double> query, const Matrix& keys,
                          const Matrix& values, const AttentionState& state,
                          const AttentionParams& params) {
  params.validate();
  const std::size_t t_src = keys.rows();
  if (t_src == 0) {
    throw std::invalid_argument("empty-source: no source steps to attend to");
  }
  if (values.rows() != t_src) {
    throw std::invalid_argument("dimension-mismatch: keys have " +
                                std::to_string(t_src) + " rows, values " +
                                std::to_string(values.rows()));
  }
  if (query.size() != static_cast<std::size_t>(params.query_dim)) {
    throw std::invalid_argument("dimension-mismatch: query has " +
                                std::to_string(query.size()) +
                                " entries, expected " +
                                std::to_string(params.query_dim));
  }
  if (keys.cols() != static_cast<std::size_t>(params.key_dim)) {
    throw std::invalid_argument("dimension-mismatch: keys have " +
                                std::to_string(keys.cols()) +
                                " columns, expected " +
                                std::to_string(params.key_dim));
  }
  if (state.prev_weights.size() != t_src ||
      state.cumulative_weights.size() != t_src) {
    throw std::invalid_argument(
        "dimension-mismatch: state length does not match source length");
  }

  const Matrix loc = location_features(state, params);
  const std::vector<double> projected_query = mat_vec(params.query_proj, query);

  std::vector<double> energies(t_src);
  const std::size_t attn_dim = static_cast<std::size_t>(params.attn_dim);
  for (std::size_t i = 0; i < t_src; ++i) {
    const std::vector<double> projected_key = mat_vec(params.key_proj, keys.row(i));
    const std::vector<double> projected_loc =
        mat_vec(params.location_proj, loc.row(i));
    double e = 0.0;
    for (std::size_t a = 0; a < attn_dim; ++a) {
      e += params.score_vector[a] *
           std::tanh(projected_query[a] + projected_key[a] + projected_loc[a]);
    }
    energies[i] = e;
  }

  StepResult result;
  result.weights = softmax(energies);
  result.context.assign(values.cols(), 0.0);
  for (std::size_t i = 0; i < t_src; ++i) {
    std::span<const double> value = values.row(i);
    for (std::size_t c = 0; c < value.size(); ++c) {
      result.context[c] += result.weights[i] * value[c];
    }
  }
  result.state = state;
  for (std::size_t i = 0; i < t_src; ++i) {
    result.state.cumulative_weights[i] += result.weights[i];
  }
  result.state.prev_weights = result.weights;
  return result;
}

DualStepResult dual_attention_step(
    std::span<const double> query, const Matrix& enc_keys,
    const Matrix& enc_values, const Matrix& aux_keys, const Matrix& aux_values,
    const AttentionState& enc_state, const AttentionState& aux_state,
    const AttentionParams& enc_params, const AttentionParams& aux_params) {
  StepResult enc = attention_step(query, enc_keys, enc_values, enc_state, enc_params);
  StepResult aux = attention_step(query, aux_keys, aux_values, aux_state, aux_params);

  DualStepResult result;
  result.context.context = std::move(enc.context);
  result.context.context.insert(result.context.context.end(),
                                aux.context.begin(), aux.context.end());
  result.context.enc_weights = std::move(enc.weights);
  result.context.aux_weights = std::move(aux.weights);
  result.enc_state = std::move(enc.state);
  result.aux_state = std::move(aux.state);
  return result;
}

bool stop_decision(double stop_prob) {
  if (!(stop_prob >= 0.0 && stop_prob <= 1.0)) {
    throw std::domain_error("stop probability must lie in [0,1], got " +
                            std::to_string(stop_prob));
  }
  return stop_prob > 0.5;
}

namespace {

// 53-bit uniform in [0,1) straight from the generator's output stream;
// std::uniform_real_distribution is not portable across standard libraries.
double next_uniform(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

Matrix random_matrix(std::size_t rows, std::size_t cols,
                     std::mt19937_64& gen) {
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      m(r, c) = next_uniform(gen) - 0.5;
    }
  }
  return m;
}

}  // namespace

AttentionParams random_params(int query_dim, int key_dim, int attn_dim,
                              int location_filters, int location_kernel,
                              std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  AttentionParams p;
  p.query_dim = query_dim;
  p.key_dim = key_dim;
  p.attn_dim = attn_dim;
  p.location_filters = location_filters;
  p.location_kernel = location_kernel;
  const std::size_t a = static_cast<std::size_t>(attn_dim);
  p.query_proj = random_matrix(a, static_cast<std::size_t>(query_dim), gen);
  p.key_proj = random_matrix(a, static_cast<std::size_t>(key_dim), gen);
  p.location_proj =
      random_matrix(a, static_cast<std::size_t>(location_filters), gen);
  p.location_conv = random_matrix(static_cast<std::size_t>(location_filters),
                                  2 * static_cast<std::size_t>(location_kernel), gen);
  p.score_vector.resize(a);
  for (double& v : p.score_vector) v = next_uniform(gen) - 0.5;
  p.validate();
  return p;
}

namespace {

const char* const kMatrixNames[] = {"query_proj", "key_proj", "location_proj",
                                    "location_conv", "score_vector"};

Matrix load_bundle_matrix(const nlohmann::json& manifest,
                          const std::filesystem::path& dir,
                          const std::string& name) {
  const auto& matrices = manifest.at("matrices");
  if (!matrices.contains(name)) {
    throw std::runtime_error("parameter bundle is missing matrix '" + name + "'");
  }
  const auto& entry = matrices.at(name);
  const std::string file = entry.at("file").get<std::string>();
  Matrix m = read_matrix_csv((dir / file).string());
  const std::size_t rows = entry.at("rows").get<std::size_t>();
  const std::size_t cols = entry.at("cols").get<std::size_t>();
  if (m.rows() != rows || m.cols() != cols) {
    throw std::runtime_error("matrix '" + name + "' in " + file + " is " +
                             std::to_string(m.rows()) + "x" +
                             std::to_string(m.cols()) +
                             " but the manifest declares " +
                             std::to_string(rows) + "x" + std::to_string(cols));
  }
  return m;
}

}  // namespace

AttentionParams load_params(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw std::runtime_error("cannot open " + manifest_path);
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error("bad parameter manifest " + manifest_path + ": " +
                             e.what());
  }

  const std::filesystem::path dir =
      std::filesystem::path(manifest_path).parent_path();
  AttentionParams p;
  try {
    p.query_dim = manifest.at("query_dim").get<int>();
    p.key_dim = manifest.at("key_dim").get<int>();
    p.attn_dim = manifest.at("attn_dim").get<int>();
    p.location_filters = manifest.at("location_filters").get<int>();
    p.location_kernel = manifest.at("location_kernel").get<int>();
    p.query_proj = load_bundle_matrix(manifest, dir, "query_proj");
    p.key_proj = load_bundle_matrix(manifest, dir, "key_proj");
    p.location_proj = load_bundle_matrix(manifest, dir, "location_proj");
    p.location_conv = load_bundle_matrix(manifest, dir, "location_conv");
    const Matrix score = load_bundle_matrix(manifest, dir, "score_vector");
    if (score.rows() != 1) {
      throw std::runtime_error("score_vector must be a single CSV row");
    }
    p.score_vector.assign(score.row(0).begin(), score.row(0).end());
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("bad parameter manifest " + manifest_path + ": " +
                             e.what());
  }
  p.validate();
  return p;
}

void save_params(const AttentionParams& params,
                 const std::string& manifest_path) {
  params.validate();
  const std::filesystem::path dir =
      std::filesystem::path(manifest_path).parent_path();

  Matrix score(1, params.score_vector.size());
  for (std::size_t i = 0; i < params.score_vector.size(); ++i) {
    score(0, i) = params.score_vector[i];
  }
  const Matrix* matrices[] = {&params.query_proj, &params.key_proj,
                              &params.location_proj, &params.location_conv,
                              &score};

  nlohmann::json manifest;
  manifest["query_dim"] = params.query_dim;
  manifest["key_dim"] = params.key_dim;
  manifest["attn_dim"] = params.attn_dim;
  manifest["location_filters"] = params.location_filters;
  manifest["location_kernel"] = params.location_kernel;
  manifest["matrices"] = nlohmann::json::object();
  for (std::size_t i = 0; i < std::size(kMatrixNames); ++i) {
    const std::string name = kMatrixNames[i];
    const std::string file = name + ".csv";
    write_matrix_csv((dir / file).string(), *matrices[i]);
    manifest["matrices"][name] = {{"file", file},
                                  {"rows", matrices[i]->rows()},
                                  {"cols", matrices[i]->cols()}};
  }

  std::ofstream out(manifest_path);
  if (!out) throw std::runtime_error("cannot write " + manifest_path);
  out << manifest.dump(2) << '\n';
}

}  // namespace ttseval::attention
