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
#include "mdd/ctc/ctc.h"
#include "mdd/errors.h"
#include "mdd/numcore/layers.h"
#include "mdd/rng.h"
#include "oracles.h"
#include "test_util.h"

namespace mdd {
namespace {

// A random target over non-blank symbols of length <= max_len that fits T.
std::vector<int> RandomTarget(Rng& rng, int v, int blank, int t_len, bool force_repeat) {
  std::vector<int> target;
  const int len = rng.UniformInt(0, std::min(t_len, 3));
  for (int i = 0; i < len; ++i) {
    int s = rng.UniformInt(0, v - 2);
    if (s >= blank) ++s;
    if (force_repeat && i > 0) s = target.back();
    target.push_back(s);
  }
  while (CtcMinFrames(target) > t_len) target.pop_back();
  return target;
}

TEST_CASE("CTC loss equals brute-force path enumeration") {
  Rng rng(2024);
  int instances = 0;
  int with_repeats = 0;
  int empty = 0;
  for (int i = 0; i < 150; ++i) {
    const int t_len = rng.UniformInt(1, 6);
    const int v = rng.UniformInt(2, 4);
    const int blank = rng.UniformInt(0, v - 1);
    const Matrix lp = test::RandomLogProbs(rng, t_len, v);
    const auto target = RandomTarget(rng, v, blank, t_len, i % 4 == 0);
    const double brute = oracle::BruteForceCtcLogProb(lp, target, blank);
    const CtcResult r = CtcForwardBackward(lp, target, blank);
    CHECK(std::abs(-r.loss - brute) < 1e-9);
    CHECK(CtcLabelLogProb(lp, target, blank) == doctest::Approx(brute).epsilon(1e-12));
    ++instances;
    empty += target.empty();
    for (std::size_t k = 1; k < target.size(); ++k) {
      if (target[k] == target[k - 1]) {
        ++with_repeats;
        break;
      }
    }
  }
  CHECK(instances >= 100);
  CHECK(with_repeats > 0);
  CHECK(empty > 0);
}

TEST_CASE("empty target scores the all-blank path") {
  Rng rng(1);
  const Matrix lp = test::RandomLogProbs(rng, 4, 3);
  const CtcResult r = CtcForwardBackward(lp, {}, 0);
  CHECK(r.loss == doctest::Approx(-lp.col(0).sum()).epsilon(1e-12));
}

TEST_CASE("infeasible targets raise and score -infinity") {
  Rng rng(2);
  const Matrix lp = test::RandomLogProbs(rng, 3, 3);
  // [1, 1] needs a separating blank: 3 frames suffice, 2 do not.
  CHECK_NOTHROW(CtcForwardBackward(lp, {1, 1}, 0));
  const Matrix short_lp = lp.topRows(2);
  CHECK_THROWS_AS(CtcForwardBackward(short_lp, {1, 1}, 0), InfeasibleTarget);
  CHECK(std::isinf(CtcLabelLogProb(short_lp, {1, 1}, 0)));
  CHECK(std::isinf(oracle::BruteForceCtcLogProb(short_lp, {1, 1}, 0)));
  CHECK(CtcMinFrames({1, 1}) == 3);
  CHECK(CtcMinFrames({1, 2, 2, 2}) == 6);
}

TEST_CASE("CTC input contract is enforced") {
  Rng rng(3);
  const Matrix lp = test::RandomLogProbs(rng, 4, 3);
  CHECK_THROWS_AS(CtcForwardBackward(lp, {0}, 0), ConfigError);   // blank in target
  CHECK_THROWS_AS(CtcForwardBackward(lp, {3}, 0), ConfigError);   // out of range
  CHECK_THROWS_AS(CtcForwardBackward(lp, {1}, 5), ConfigError);   // bad blank
  Matrix unnormalized = lp;
  unnormalized(0, 0) += 0.5;
  CHECK_THROWS_AS(CtcForwardBackward(unnormalized, {1}, 0), NumericError);
}

TEST_CASE("CTC gradient through log-softmax matches central differences") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Rng rng(seed);
    const int t_len = 5;
    const int v = 4;
    Matrix logits = test::RandomMatrix(rng, t_len, v);
    const std::vector<int> target = {1, 2, 2};
    auto loss = [&] { return CtcForwardBackward(LogSoftmaxRows(logits), target, 0).loss; };
    const Matrix lp = LogSoftmaxRows(logits);
    const CtcResult r = CtcForwardBackward(lp, target, 0);
    const Matrix analytic = LogSoftmaxBackward(lp, r.grad);
    CHECK(oracle::MaxRelativeError(analytic, oracle::NumericGradient(loss, logits)) < 1e-4);
    // Through log-softmax the gradient is softmax minus occupancy, rows sum to 0.
    for (int t = 0; t < t_len; ++t) CHECK(std::abs(analytic.row(t).sum()) < 1e-9);
  }
}

TEST_CASE("greedy decoding merges repeats and drops blanks") {
  Matrix lp = Matrix::Constant(6, 3, std::log(0.1));
  const int path[6] = {1, 1, 0, 1, 2, 2};
  for (int t = 0; t < 6; ++t) lp(t, path[t]) = std::log(0.8);
  CHECK(CtcGreedyDecode(lp, 0) == std::vector<int>{1, 1, 2});
}

}  // namespace
}  // namespace mdd
