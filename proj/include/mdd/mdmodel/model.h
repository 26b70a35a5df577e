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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mdd/corpus/spec_augment.h"
#include "mdd/labelaug/labelaug.h"
#include "mdd/mdmodel/vocab.h"
#include "mdd/numcore/layers.h"
#include "mdd/numcore/matrix.h"
#include "mdd/numcore/optimizer.h"
#include "mdd/numcore/params.h"

namespace mdd {

struct ModelConfig {
  int feature_dim = 16;
  bool use_input_augmentation = false;
  int ppg_dim = kNumBasePhones;
  int encoder_hidden = 64;   // per direction
  int decoder_hidden = 64;
  int attention_dim = 32;
  int embedding_dim = 16;
  int downsample = 4;
  int ctc_vocab = kCtcVocabSize;
  int att_vocab = kAttVocabSize;
  double lambda_train = 0.3;
  double lambda_decode = 0.3;
  double alpha = 0.1;
  int beam = 4;

  // ConfigError on out-of-range values or vocabulary sizes that disagree
  // with the phone inventory.
  void Validate() const;
  int encoder_input_dim() const {
    return feature_dim + (use_input_augmentation ? ppg_dim : 0);
  }
  int encoder_output_dim() const { return 2 * encoder_hidden; }
  bool operator==(const ModelConfig&) const = default;
};

// key=value lines, doubles at full precision.
std::string EncodeModelConfig(const ModelConfig& config);
ModelConfig DecodeModelConfig(const std::string& text);

int DownsampledLength(int num_frames, int downsample);

// One training or decoding input. `ppg` must be present iff the model uses
// input augmentation.
struct MdExample {
  std::string id;
  Matrix features;            // T x F
  std::optional<Matrix> ppg;  // T x P
  std::vector<int> target;    // phone ids, no specials
};

struct TeacherForcedOutput {
  Matrix log_probs;  // (L+1) x V_att; the last row predicts eos
  Matrix attention;  // (L+1) x T'
};

struct ObjectiveTerms {
  double total = 0.0;
  double ctc = 0.0;  // batch mean of -log P_CTC
  double att = 0.0;  // batch mean of the summed attention NLL
  double kl = 0.0;   // batch mean of the per-step averaged KL
};

struct Hypothesis {
  std::vector<int> symbols;
  double att_log_prob = 0.0;
  double ctc_log_prob = 0.0;
  double combined = 0.0;
};

// lambda * ctc + (1 - lambda) * att, with the vanishing term dropped at the
// endpoints so that an infeasible CTC score does not poison lambda = 0.
double CombineScores(double ctc_log_prob, double att_log_prob, double lambda);

// Stable sort by combined score, best first.
void RankHypotheses(std::vector<Hypothesis>& hyps);

// Shared BiGRU encoder over stacked frames, a CTC head, and a
// single-cell decoder with additive attention.
class MdModel {
 public:
  explicit MdModel(const ModelConfig& config);

  const ModelConfig& config() const { return config_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  // Uniform +-1/sqrt(fan_in) initialization from `seed`.
  void Init(std::uint64_t seed);

  // [features | ppg] per frame, validated. Missing ppg under augmentation ->
  // ConfigError; ppg without augmentation -> ConfigError; shape mismatches
  // -> ShapeError.
  Matrix EncoderInput(const Matrix& features, const Matrix* ppg) const;

  // T' x 2H with T' = ceil(T / downsample).
  Matrix Encode(const Matrix& features, const Matrix* ppg) const;

  // T' x V_ctc log distributions.
  Matrix CtcLogProbs(const Matrix& encoded) const;

  // Empty reference -> ShapeError.
  TeacherForcedOutput DecodeTeacherForced(const Matrix& encoded,
                                          const std::vector<int>& reference) const;

  // Batch mean of lambda * CTC + (1 - lambda) * ATT + alpha * KL. When
  // `with_grad`, gradients of that mean are written into params() (after
  // zeroing). alpha > 0 requires a smoothing distribution of size V_att.
  // Non-finite loss -> NumericError.
  ObjectiveTerms Objective(const std::vector<const MdExample*>& batch, double lambda,
                           const SmoothingDistribution* smoothing, double alpha, bool with_grad);

  // Attention beam search to eos (at most 2 T' symbols), then each finished
  // hypothesis is rescored with the CTC label probability. Returns the
  // n-best list ranked by combined score; front() is the best.
  std::vector<Hypothesis> BeamSearch(const Matrix& features, const Matrix* ppg, double lambda,
                                     int beam) const;
  Hypothesis Decode(const MdExample& example) const;

  // Argmax attention decoding with the same length cap.
  std::vector<int> GreedyDecode(const Matrix& features, const Matrix* ppg) const;

 private:
  struct StepCache;
  RowVector DecoderStep(const Matrix& encoded, const Matrix& keys, const RowVector& s_prev,
                        int y_prev, StepCache* cache, RowVector* s_out) const;
  double UtteranceObjective(const MdExample& ex, double lambda, const SmoothingDistribution* smoothing,
                            double alpha, double weight, bool with_grad, ObjectiveTerms* terms);

  ModelConfig config_;
  ParamStore params_;
  RecurrentLayer encoder_;
  LinearLayer ctc_out_;
  int embedding_ = -1;
  int att_wk_ = -1;
  int att_wq_ = -1;
  int att_b_ = -1;
  int att_v_ = -1;
  GruCell decoder_;
  LinearLayer att_out_;
};

struct TrainConfig {
  int max_epochs = 30;
  int patience = 5;
  int batch_size = 8;
  AdamConfig adam{2e-3, 0.9, 0.999, 1e-8, 5.0};
  // The learning rate is multiplied by lr_decay once every decay_after
  // epochs without a dev improvement; lr_decay = 1 disables decay.
  double lr_decay = 0.5;
  int decay_after = 2;
  bool spec_augment = false;
  SpecAugmentPolicy spec_policy = DefaultSpecAugmentPolicy();
  std::uint64_t seed = 1;
  void Validate() const;
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double dev_att_nll = 0.0;  // per target token, teacher forced
};

struct TrainingMetadata {
  int epoch = 0;             // best epoch (1-based)
  int epochs_run = 0;
  double dev_metric = 0.0;   // dev attention NLL per token at the best epoch
  std::uint64_t seed = 0;
  bool operator==(const TrainingMetadata&) const = default;
};

// Mean attention NLL per target token (eos included) under teacher forcing.
double DevAttentionNll(const MdModel& model, const std::vector<MdExample>& dev);

// Epoch loop with a per-epoch seeded shuffle and optional SpecAugment on the
// features, early stopping on dev attention NLL. Returns the best model,
// with parameters rounded to float32. Empty train or dev -> ConfigError;
// a non-finite loss -> NumericError naming the epoch.
MdModel TrainMdModel(const ModelConfig& model_config, const TrainConfig& train_config,
                     const std::vector<MdExample>& train, const std::vector<MdExample>& dev,
                     const SmoothingDistribution* smoothing, TrainingMetadata* metadata,
                     const std::function<void(const EpochLog&)>& on_epoch = {});

}  // namespace mdd
