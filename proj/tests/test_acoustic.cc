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

#include <cmath>

#include "doctest.h"
#include "mdd/acoustic/acoustic.h"
#include "mdd/corpus/corpus.h"
#include "mdd/corpus/inventory.h"
#include "mdd/errors.h"
#include "mdd/rng.h"
#include "oracles.h"
#include "test_util.h"

namespace mdd {
namespace {

Matrix RandomPpg(Rng& rng, int t_len, int v) { return test::RandomLogProbs(rng, t_len, v).array().exp().matrix(); }

// A posteriorgram that puts `peak` mass on the labeled phone of each frame.
Matrix PeakedPpg(const std::vector<int>& frame_phone, int v, double peak) {
  Matrix p = Matrix::Constant(static_cast<int>(frame_phone.size()), v, (1.0 - peak) / (v - 1));
  for (std::size_t t = 0; t < frame_phone.size(); ++t) p(static_cast<int>(t), frame_phone[t]) = peak;
  return p;
}

TEST_CASE("forced alignment matches exhaustive search") {
  Rng rng(31);
  for (int i = 0; i < 200; ++i) {
    const int t_len = rng.UniformInt(1, 8);
    const int l_len = rng.UniformInt(1, std::min(3, t_len));
    const int v = rng.UniformInt(2, 5);
    const Matrix ppg = RandomPpg(rng, t_len, v);
    std::vector<int> phones;
    for (int k = 0; k < l_len; ++k) phones.push_back(rng.UniformInt(0, v - 1));
    const Segmentation seg = ForcedAlign(ppg, phones);
    const oracle::ExhaustiveAlignment ref = oracle::ExhaustiveForcedAlign(ppg, phones);
    CHECK_NOTHROW(ValidateSegmentation(seg, t_len, l_len));
    CHECK(seg.score == doctest::Approx(ref.score).epsilon(1e-12));
    CHECK(seg.segments == ref.segments);
  }
}

TEST_CASE("forced alignment rejects impossible inputs") {
  Rng rng(2);
  const Matrix ppg = RandomPpg(rng, 2, 4);
  CHECK_THROWS_AS(ForcedAlign(ppg, {0, 1, 2}), InfeasibleTarget);
  CHECK_THROWS_AS(ForcedAlign(ppg, {}), InfeasibleTarget);
  CHECK_THROWS_AS(ForcedAlign(ppg, {7}), ShapeError);
}

TEST_CASE("segmentation validation") {
  Segmentation s;
  s.segments = {{0, 2}, {2, 5}};
  CHECK_NOTHROW(ValidateSegmentation(s, 5, 2));
  CHECK_THROWS_AS(ValidateSegmentation(s, 6, 2), SchemaError);
  CHECK_THROWS_AS(ValidateSegmentation(s, 5, 3), SchemaError);
  s.segments = {{0, 2}, {3, 5}};
  CHECK_THROWS_AS(ValidateSegmentation(s, 5, 2), SchemaError);
  s.segments = {{0, 0}, {0, 5}};
  CHECK_THROWS_AS(ValidateSegmentation(s, 5, 2), SchemaError);
}

TEST_CASE("GOP is never positive and is zero where the canonical phone is the argmax") {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const int t_len = rng.UniformInt(3, 12);
    const Matrix ppg = RandomPpg(rng, t_len, 6);
    std::vector<int> phones;
    for (int k = 0; k < rng.UniformInt(1, 3); ++k) phones.push_back(rng.UniformInt(0, 5));
    const Segmentation seg = ForcedAlign(ppg, phones);
    for (double g : GopScores(ppg, seg, phones)) CHECK(g <= 0.0);
  }
  const std::vector<int> frames = {2, 2, 2, 4, 4};
  const Matrix ppg = PeakedPpg(frames, 6, 0.9);
  const Segmentation seg = ForcedAlign(ppg, {2, 4});
  CHECK(seg.segments == std::vector<std::pair<int, int>>{{0, 3}, {3, 5}});
  for (double g : GopScores(ppg, seg, {2, 4})) CHECK(g == 0.0);
  CHECK(SegmentArgmax(ppg, seg) == std::vector<int>{2, 4});
  // Scoring the wrong canonical phone gives a strictly negative score.
  CHECK(GopScores(ppg, seg, {2, 1})[1] < 0.0);
}

TEST_CASE("detection is score below threshold") {
  CHECK(GopDetect({-3.0, -1.0, 0.0}, -1.0) == std::vector<bool>{true, false, false});
}

TEST_CASE("a separable dev set calibrates to F1 = 1") {
  std::vector<GopSample> dev;
  for (int i = 0; i < 20; ++i) dev.push_back({-5.0 - 0.1 * i, true});
  for (int i = 0; i < 30; ++i) dev.push_back({-0.5 + 0.01 * i, false});
  const Calibration c = CalibrateThreshold(dev);
  CHECK(c.f1 == doctest::Approx(1.0));
  CHECK(c.threshold > -5.0);
  CHECK(c.threshold < -0.5);
  std::vector<double> scores;
  for (const auto& s : dev) scores.push_back(s.score);
  const auto flags = GopDetect(scores, c.threshold);
  for (std::size_t i = 0; i < dev.size(); ++i) CHECK(flags[i] == dev[i].mispronounced);
  CHECK_THROWS_AS(CalibrateThreshold({}), ConfigError);
  // No positives: nothing can be gained, F1 stays 0.
  CHECK(CalibrateThreshold({{-1.0, false}, {-2.0, false}}).f1 == 0.0);
}

TEST_CASE("frame classifier learns, is deterministic, and round-trips") {
  const PhoneInventory& inv = BuildInventory();
  CorpusConfig cc = DefaultCorpusConfig(inv);
  cc.counts = {30, 4, 4};
  cc.seed = 12;
  const Corpus corpus = GenerateCorpus(inv, cc);
  const auto train = corpus.Select(Split::kTrain);
  FrameClassifierConfig fc;
  fc.feature_dim = cc.feature_dim;
  fc.hidden = 32;
  fc.epochs = 3;
  const FrameClassifier a = TrainFrameClassifier(train, fc);
  const FrameClassifier b = TrainFrameClassifier(train, fc);
  CHECK(a.Encode() == b.Encode());
  // Chance is 1/48.
  CHECK(FrameAccuracy(a, train) > 0.3);
  const Matrix& feats = train.front()->features;
  const Posteriorgram ppg = ExtractPpg(a, feats);
  CHECK(ppg.rows() == feats.rows());
  CHECK(ppg.cols() == kNumBasePhones);
  for (Eigen::Index t = 0; t < ppg.rows(); ++t) CHECK(std::abs(ppg.row(t).sum() - 1.0) < 1e-9);
  const FrameClassifier back = FrameClassifier::Decode(a.Encode(), "am");
  CHECK(back.LogPosteriors(feats) == a.LogPosteriors(feats));
  CHECK_THROWS_AS(ExtractPpg(a, Matrix::Zero(4, cc.feature_dim + 1)), ShapeError);
  CHECK_THROWS_AS(FrameClassifier::Decode("junk", "am"), ParseError);
}

}  // namespace
}  // namespace mdd
