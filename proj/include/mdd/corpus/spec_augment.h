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

#include "mdd/numcore/matrix.h"

namespace mdd {

struct SpecAugmentPolicy {
  int n_freq_masks = 0;
  int max_freq_width = 0;
  int n_time_masks = 0;
  int max_time_width = 0;

  bool IsIdentity() const {
    return (n_freq_masks == 0 || max_freq_width == 0) &&
           (n_time_masks == 0 || max_time_width == 0);
  }
};

// Two bands of up to 2 channels and two spans of up to 5 frames.
inline SpecAugmentPolicy DefaultSpecAugmentPolicy() { return {2, 2, 2, 5}; }

// Zeroes n_freq_masks contiguous channel bands and n_time_masks contiguous
// frame spans. Each width is drawn uniformly from [0, max] and clamped to the
// matrix extent, its start uniformly among the valid offsets. Cells outside
// the masks are copied unchanged. Deterministic in (features, policy, seed).
Matrix SpecAugment(const Matrix& features, const SpecAugmentPolicy& policy,
                   std::uint64_t seed);

}  // namespace mdd
