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

#include <vector>

#include "mdd/numcore/matrix.h"

namespace mdd {

// Minimum frames needed to emit `target`: one per label plus a separating
// blank between each pair of equal neighbors.
int CtcMinFrames(const std::vector<int>& target);

struct CtcResult {
  double loss = 0.0;  // -log P(target | X)
  // d loss / d log_probs (T x V). Each row is minus the label occupancy
  // posterior; chained through a log-softmax it becomes softmax - occupancy.
  Matrix grad;
};

// Forward-backward in log space. `log_probs` is T x V with rows that are log
// distributions (|logsumexp(row)| <= 1e-6, else NumericError). `target` must
// not contain `blank` and every id must be < V (ConfigError). An infeasible
// target throws InfeasibleTarget.
CtcResult CtcForwardBackward(const Matrix& log_probs, const std::vector<int>& target, int blank);

// log P(target | X) from the same forward pass CtcForwardBackward uses, so
// it equals -loss exactly. Infeasible targets score -infinity.
double CtcLabelLogProb(const Matrix& log_probs, const std::vector<int>& target, int blank);

// Per-frame argmax, merge repeats, drop blanks.
std::vector<int> CtcGreedyDecode(const Matrix& log_probs, int blank);

}  // namespace mdd
