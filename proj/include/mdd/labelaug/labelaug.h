// Copyright 2026 The mdd Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mdd/numcore/matrix.h"

namespace mdd {

enum class SmoothingKind { kUniform, kUnigram, kCbow, kInterpolated };

// A probability vector over the attention output vocabulary, used as the
// target of the label-smoothing KL penalty.
struct SmoothingDistribution {
  std::vector<double> probs;
  SmoothingKind kind = SmoothingKind::kUniform;
  double beta = 0.0;  // meaningful for kInterpolated only

  int size() const { return static_cast<int>(probs.size()); }
  // ConfigError unless entries are >= 0 and sum to 1 within 1e-9.
  void Validate() const;
  std::string Describe() const;
};

SmoothingDistribution UniformDistribution(int vocab_size);

inline constexpr double kUnigramAddK = 0.01;

// Relative frequencies with add-k smoothing over every symbol:
//   p_i = (count_i + k) / (N + k * I).
// Empty transcripts (no tokens at all) -> ConfigError.
SmoothingDistribution UnigramDistribution(const std::vector<std::vector<int>>& transcripts,
                                          int vocab_size, double add_k = kUnigramAddK);

struct CbowConfig {
  int window = 2;
  int dim = 16;
  int epochs = 30;
  double learning_rate = 0.05;
  std::uint64_t seed = 1;
  // Symbols never used as context (start-of-sequence, blank).
  std::vector<int> excluded_context;
};

struct PhoneEmbeddings {
  Matrix vectors;  // vocab_size x dim, one row per symbol
  CbowConfig config;
};

// Continuous bag of words with a full softmax output layer: the mean of the
// window's input vectors predicts the center symbol. SGD with learning rate
// decaying linearly to 1e-4 of its start value. Sentence order is reshuffled
// each epoch from the seed. ConfigError if dim < 2, window < 1, or no
// transcript is longer than the window.
PhoneEmbeddings TrainCbow(const std::vector<std::vector<int>>& transcripts, int vocab_size,
                          const CbowConfig& config);

// u[j] = cos(v_j, v_i). Zero-norm row -> NumericError.
std::vector<double> SimilarityProfile(const PhoneEmbeddings& emb, int i);

// Softmax across the vocabulary of the Euclidean norms ||u_i|| of every
// symbol's similarity profile: one global distribution.
SmoothingDistribution CbowDistribution(const PhoneEmbeddings& emb);

// beta * d_cbow + (1 - beta) * d_uni. Size mismatch -> ShapeError; beta
// outside [0,1] -> ConfigError.
SmoothingDistribution InterpolateDistributions(const SmoothingDistribution& d_cbow,
                                               const SmoothingDistribution& d_uni, double beta);

struct KlPenaltyResult {
  double value = 0.0;
  RowVector grad;  // d value / d predicted_log
};

// KL(target || exp(predicted_log)) = sum_i t_i (log t_i - predicted_log_i),
// with gradient -t. The caller chains it through its own softmax. A target
// with a zero entry -> ConfigError; size mismatch -> ShapeError.
KlPenaltyResult KlPenalty(const SmoothingDistribution& target, const RowVector& predicted_log);

// Text records "<symbol> <value>" (one per line, vocabulary order) with a
// header line naming the kind. Decoding validates symbols, order, and
// normalization (ParseError / SchemaError).
std::string EncodeDistribution(const SmoothingDistribution& dist,
                               const std::vector<std::string>& symbols);
SmoothingDistribution DecodeDistribution(const std::string& text,
                                         const std::vector<std::string>& symbols);

std::string EncodeEmbeddings(const PhoneEmbeddings& emb, const std::vector<std::string>& symbols);
PhoneEmbeddings DecodeEmbeddings(const std::string& text, const std::vector<std::string>& symbols);

}  // namespace mdd
