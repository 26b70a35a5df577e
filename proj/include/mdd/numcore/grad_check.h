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

#include <functional>
#include <string>

#include "mdd/numcore/params.h"

namespace mdd {

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::string worst_parameter;
  int worst_index = -1;
  double analytic = 0.0;
  double numeric = 0.0;
  int coordinates_checked = 0;
};

struct GradCheckOptions {
  double epsilon = 1e-5;
  // Denominator floor: error = |a - n| / max(|a|, |n|, floor).
  double floor = 1e-4;
  // Check at most this many coordinates per tensor, evenly strided; <= 0
  // checks all of them.
  int max_coords_per_param = 0;
};

// `f` must be pure in the parameter values and, when called, write the
// analytic gradient into the store (the checker zeroes gradients first).
// Central differences per coordinate; reports the worst one.
// epsilon <= 0 -> ConfigError; non-finite f -> NumericError.
GradCheckResult GradCheck(const std::function<double(ParamStore&)>& f, ParamStore& params,
                          const GradCheckOptions& options = {});

}  // namespace mdd
