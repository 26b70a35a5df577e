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
#include <utility>
#include <vector>

#include "mdd/corpus/corpus.h"
#include "mdd/numcore/layers.h"
#include "mdd/numcore/matrix.h"
#include "mdd/numcore/params.h"

namespace mdd {

// ---- Frame classifier -------------------------------------------------------

struct FrameClassifierConfig {
  int feature_dim = 16;
  int hidden = 64;
  int epochs = 8;
  int batch_size = 64;
  double learning_rate = 3e-3;
  std::uint64_t seed = 1;
};

// Two tanh hidden layers over single standardized frames, softmax over the
// 48 base phones. Stands in for the pretrained hybrid acoustic model.
class FrameClassifier {
 public:
  explicit FrameClassifier(const FrameClassifierConfig& config);

  const FrameClassifierConfig& config() const { return config_; }
  ParamStore& params() { return params_; }
  const ParamStore& params() const { return params_; }

  // Per-frame log posteriors, T x 48.
  Matrix LogPosteriors(const Matrix& features) const;

  // Cross-entropy on (frames, labels) mini-batch; fills gradients and
  // returns the mean loss.
  double LossAndGrad(const Matrix& frames, const std::vector<int>& labels);

  std::string Encode() const;
  static FrameClassifier Decode(const std::string& bytes, const std::string& what);

 private:
  friend FrameClassifier TrainFrameClassifier(const std::vector<const Utterance*>&,
                                              const FrameClassifierConfig&);
  Matrix Standardize(const Matrix& features) const;

  FrameClassifierConfig config_;
  ParamStore params_;
  LinearLayer l1_, l2_, out_;
  RowVector mean_;
  RowVector inv_std_;
};

// Trains on every frame of `utterances` against its frame label
// (distorted frames carry their base phone). Deterministic given the seed;
// parameters are rounded to float32 on return. ConfigError if there are no
// labeled frames or a label count differs from the frame count.
FrameClassifier TrainFrameClassifier(const std::vector<const Utterance*>& utterances,
                                     const FrameClassifierConfig& config);

// ---- Posteriorgrams ---------------------------------------------------------

// T x 48 per-frame phone posteriors (rows sum to 1).
using Posteriorgram = Matrix;

// ShapeError if the feature width differs from the classifier's.
Posteriorgram ExtractPpg(const FrameClassifier& classifier, const Matrix& features);

// Frame accuracy of argmax(ppg) against frame labels.
double FrameAccuracy(const FrameClassifier& classifier,
                     const std::vector<const Utterance*>& utterances);

// ---- Forced alignment -------------------------------------------------------

struct Segmentation {
  // Per canonical phone: [start, end) frames. Contiguous, covering [0, T).
  std::vector<std::pair<int, int>> segments;
  double score = 0.0;  // sum of log posteriors along the path
};

// Throws SchemaError if `seg` is not a monotone contiguous cover of [0, T)
// with one nonempty segment per phone.
void ValidateSegmentation(const Segmentation& seg, int num_frames, int num_phones);

// Viterbi over (frame, phone position): every frame is assigned to one
// canonical phone, positions advance by at most one per frame. Maximizes
// sum_t log ppg[t, phone(t)]. Among equal-scoring paths the one with the
// earliest boundaries (lexicographically) wins. L > T -> InfeasibleTarget.
Segmentation ForcedAlign(const Posteriorgram& ppg, const std::vector<int>& canonical);

// ---- Goodness of pronunciation ----------------------------------------------

// Per canonical phone with segment frames S:
//   GOP = (1/|S|) sum_{t in S} (log ppg[t, canonical] - log max_q ppg[t, q])
// Always <= 0.
std::vector<double> GopScores(const Posteriorgram& ppg, const Segmentation& seg,
                              const std::vector<int>& canonical);

// The phone with the largest summed log posterior over each segment; the
// GOP baseline's stand-in for a diagnosed phone.
std::vector<int> SegmentArgmax(const Posteriorgram& ppg, const Segmentation& seg);

// true = mispronounced, iff score < threshold.
std::vector<bool> GopDetect(const std::vector<double>& scores, double threshold);

struct GopSample {
  double score = 0.0;
  bool mispronounced = false;  // human verdict
};

struct Calibration {
  double threshold = 0.0;
  double f1 = 0.0;
};

// Sweeps candidate thresholds over the sorted distinct dev scores (midpoints
// between neighbors, plus one below the minimum and one above the maximum)
// and returns the one maximizing MD F1; ties go to the smaller threshold.
// Empty dev set -> ConfigError.
Calibration CalibrateThreshold(const std::vector<GopSample>& dev);

}  // namespace mdd
