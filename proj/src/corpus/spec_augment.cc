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

#include "mdd/corpus/spec_augment.h"

#include <algorithm>

#include "mdd/errors.h"
#include "mdd/rng.h"

namespace mdd {

Matrix SpecAugment(const Matrix& features, const SpecAugmentPolicy& policy,
                   std::uint64_t seed) {
  if (policy.n_freq_masks < 0 || policy.max_freq_width < 0 || policy.n_time_masks < 0 ||
      policy.max_time_width < 0) {
    throw ConfigError("SpecAugment policy fields must be nonnegative");
  }
  Matrix out = features;
  if (policy.IsIdentity() || features.size() == 0) return out;
  Rng rng(seed);
  const int n_frames = static_cast<int>(features.rows());
  const int n_chan = static_cast<int>(features.cols());

  for (int m = 0; m < policy.n_freq_masks; ++m) {
    const int width = std::min(rng.UniformInt(0, policy.max_freq_width), n_chan);
    const int start = rng.UniformInt(0, n_chan - width);
    if (width > 0) out.middleCols(start, width).setZero();
  }
  for (int m = 0; m < policy.n_time_masks; ++m) {
    const int width = std::min(rng.UniformInt(0, policy.max_time_width), n_frames);
    const int start = rng.UniformInt(0, n_frames - width);
    if (width > 0) out.middleRows(start, width).setZero();
  }
  return out;
}

}  // namespace mdd
