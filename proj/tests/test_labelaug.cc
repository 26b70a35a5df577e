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
#include <numeric>

#include "doctest.h"
#include "mdd/errors.h"
#include "mdd/labelaug/labelaug.h"
#include "mdd/numcore/layers.h"
#include "mdd/rng.h"
#include "oracles.h"
#include "test_util.h"

namespace mdd {
namespace {

double Sum(const SmoothingDistribution& d) { return std::accumulate(d.probs.begin(), d.probs.end(), 0.0); }

std::vector<std::vector<int>> ToyTranscripts(std::uint64_t seed, int vocab, int n) {
  Rng rng(seed);
  std::vector<std::vector<int>> out;
  for (int i = 0; i < n; ++i) {
    std::vector<int> s;
    const int len = rng.UniformInt(4, 9);
    int cur = rng.UniformInt(0, vocab - 1);
    for (int k = 0; k < len; ++k) {
      s.push_back(cur);
      // A simple bigram structure so that contexts are informative.
      cur = (cur + 1 + rng.UniformInt(0, 1)) % vocab;
    }
    out.push_back(s);
  }
  return out;
}

std::vector<double> RandomDistribution(Rng& rng, int n) {
  std::vector<double> p(n);
  double z = 0.0;
  for (auto& x : p) z += (x = std::exp(rng.Normal(0.0, 2.0)));
  for (auto& x : p) x /= z;
  return p;
}

TEST_CASE("unigram distribution is add-k smoothed relative frequency") {
  const std::vector<std::vector<int>> t = {{0, 1, 1}, {1, 2}};
  const SmoothingDistribution d = UnigramDistribution(t, 4, 0.01);
  CHECK(d.kind == SmoothingKind::kUnigram);
  CHECK(d.probs[1] == doctest::Approx((3 + 0.01) / (5 + 0.04)));
  CHECK(d.probs[3] == doctest::Approx(0.01 / 5.04));
  CHECK(std::abs(Sum(d) - 1.0) < 1e-9);
  CHECK_THROWS_AS(UnigramDistribution({{}, {}}, 4), ConfigError);
}

TEST_CASE("uniform, CBOW and interpolated distributions sum to one") {
  const auto t = ToyTranscripts(4, 12, 80);
  CbowConfig cfg;
  cfg.dim = 8;
  cfg.epochs = 10;
  const PhoneEmbeddings emb = TrainCbow(t, 12, cfg);
  const SmoothingDistribution d_uni = UnigramDistribution(t, 12);
  const SmoothingDistribution d_cbow = CbowDistribution(emb);
  CHECK(std::abs(Sum(UniformDistribution(12)) - 1.0) < 1e-9);
  CHECK(std::abs(Sum(d_uni) - 1.0) < 1e-9);
  CHECK(std::abs(Sum(d_cbow) - 1.0) < 1e-9);
  for (double beta : {0.0, 0.1, 0.5, 0.9, 1.0}) {
    const SmoothingDistribution mixed = InterpolateDistributions(d_cbow, d_uni, beta);
    CHECK(std::abs(Sum(mixed) - 1.0) < 1e-9);
    CHECK_NOTHROW(mixed.Validate());
  }
}

TEST_CASE("interpolation endpoints are exact") {
  const auto t = ToyTranscripts(5, 10, 60);
  CbowConfig cfg;
  cfg.dim = 6;
  cfg.epochs = 5;
  const SmoothingDistribution d_cbow = CbowDistribution(TrainCbow(t, 10, cfg));
  const SmoothingDistribution d_uni = UnigramDistribution(t, 10);
  CHECK(InterpolateDistributions(d_cbow, d_uni, 0.0).probs == d_uni.probs);
  CHECK(InterpolateDistributions(d_cbow, d_uni, 1.0).probs == d_cbow.probs);
  CHECK_THROWS_AS(InterpolateDistributions(d_cbow, d_uni, 1.5), ConfigError);
  SmoothingDistribution half;
  half.probs = {0.5, 0.5};
  SmoothingDistribution skewed;
  skewed.probs = {0.8, 0.2};
  const SmoothingDistribution mixed = InterpolateDistributions(half, skewed, 0.1);
  CHECK(mixed.probs[0] == doctest::Approx(0.77).epsilon(1e-12));
  CHECK(mixed.probs[1] == doctest::Approx(0.23).epsilon(1e-12));
  CHECK(mixed.kind == SmoothingKind::kInterpolated);
  CHECK_THROWS_AS(InterpolateDistributions(d_cbow, UniformDistribution(11), 0.5), ShapeError);
}

TEST_CASE("identical embeddings give a uniform CBOW distribution") {
  PhoneEmbeddings emb;
  emb.vectors = Matrix::Constant(7, 5, 0.3);
  const SmoothingDistribution d = CbowDistribution(emb);
  for (double p : d.probs) CHECK(p == doctest::Approx(1.0 / 7).epsilon(1e-12));
  // The mapping is a softmax over profile norms: permuting rows permutes it.
  Rng rng(8);
  emb.vectors = test::RandomMatrix(rng, 5, 4);
  const SmoothingDistribution a = CbowDistribution(emb);
  emb.vectors.row(0).swap(emb.vectors.row(3));
  const SmoothingDistribution b = CbowDistribution(emb);
  CHECK(a.probs[0] == doctest::Approx(b.probs[3]).epsilon(1e-12));
  CHECK(a.probs[3] == doctest::Approx(b.probs[0]).epsilon(1e-12));
}

TEST_CASE("similarity profile is the row of cosines") {
  PhoneEmbeddings emb;
  emb.vectors.resize(3, 2);
  emb.vectors << 1, 0, 0, 2, 1, 1;
  const auto u = SimilarityProfile(emb, 0);
  CHECK(u[0] == doctest::Approx(1.0));
  CHECK(u[1] == doctest::Approx(0.0));
  CHECK(u[2] == doctest::Approx(1.0 / std::sqrt(2.0)));
  emb.vectors.row(1).setZero();
  CHECK_THROWS_AS(SimilarityProfile(emb, 1), NumericError);
}

TEST_CASE("KL is zero on equal distributions and nonnegative on 1000 random pairs") {
  Rng rng(77);
  for (int i = 0; i < 1000; ++i) {
    const int n = rng.UniformInt(2, 12);
    SmoothingDistribution p;
    p.probs = RandomDistribution(rng, n);
    const std::vector<double> q = RandomDistribution(rng, n);
    RowVector log_q(n);
    RowVector log_p(n);
    for (int k = 0; k < n; ++k) {
      log_q[k] = std::log(q[k]);
      log_p[k] = std::log(p.probs[k]);
    }
    const double kl = KlPenalty(p, log_q).value;
    CHECK(kl >= -1e-12);
    CHECK(kl == doctest::Approx(oracle::KlDivergence(p.probs, q)).epsilon(1e-9));
    CHECK(std::abs(KlPenalty(p, log_p).value) < 1e-12);
  }
}

TEST_CASE("KL gradient through softmax matches central differences") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    SmoothingDistribution t;
    t.probs = RandomDistribution(rng, 6);
    Matrix logits = test::RandomMatrix(rng, 1, 6);
    auto loss = [&] { return KlPenalty(t, LogSoftmaxRows(logits).row(0)).value; };
    const Matrix lp = LogSoftmaxRows(logits);
    const KlPenaltyResult r = KlPenalty(t, lp.row(0));
    const Matrix analytic = LogSoftmaxBackward(lp, r.grad);
    CHECK(oracle::MaxRelativeError(analytic, oracle::NumericGradient(loss, logits)) < 1e-4);
  }
  SmoothingDistribution nearly_one_hot;
  nearly_one_hot.probs = {1.0 - 1e-6, 1e-6};
  RowVector uniform_log = RowVector::Constant(2, std::log(0.5));
  CHECK(std::abs(KlPenalty(nearly_one_hot, uniform_log).value - std::log(2.0)) < 1e-4);
  SmoothingDistribution zero;
  zero.probs = {0.0, 1.0};
  CHECK_THROWS_AS(KlPenalty(zero, RowVector::Zero(2)), ConfigError);
}

TEST_CASE("CBOW training is deterministic and learns context structure") {
  const auto t = ToyTranscripts(9, 10, 120);
  CbowConfig cfg;
  cfg.dim = 8;
  cfg.epochs = 15;
  const PhoneEmbeddings a = TrainCbow(t, 10, cfg);
  const PhoneEmbeddings b = TrainCbow(t, 10, cfg);
  CHECK(a.vectors == b.vectors);
  cfg.seed = 2;
  CHECK(TrainCbow(t, 10, cfg).vectors != a.vectors);
  CHECK_THROWS_AS(TrainCbow({{1, 2}}, 10, cfg), ConfigError);
  cfg.dim = 1;
  CHECK_THROWS_AS(TrainCbow(t, 10, cfg), ConfigError);
}

TEST_CASE("distributions and embeddings round-trip through text") {
  const auto t = ToyTranscripts(3, 4, 30);
  const std::vector<std::string> symbols = {"a", "b", "c", "d"};
  const SmoothingDistribution d = UnigramDistribution(t, 4);
  const SmoothingDistribution back = DecodeDistribution(EncodeDistribution(d, symbols), symbols);
  CHECK(back.probs == d.probs);
  CHECK(back.kind == d.kind);
  CHECK_THROWS(DecodeDistribution(EncodeDistribution(d, symbols), {"a", "b", "x", "d"}));
  CbowConfig cfg;
  cfg.dim = 3;
  cfg.epochs = 2;
  const PhoneEmbeddings e = TrainCbow(t, 4, cfg);
  CHECK(DecodeEmbeddings(EncodeEmbeddings(e, symbols), symbols).vectors == e.vectors);
}

}  // namespace
}  // namespace mdd
