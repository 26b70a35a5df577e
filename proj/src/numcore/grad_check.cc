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

#include "mdd/numcore/grad_check.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "mdd/errors.h"

namespace mdd {

GradCheckResult GradCheck(const std::function<double(ParamStore&)>& f, ParamStore& params,
                          const GradCheckOptions& options) {
  if (!(options.epsilon > 0.0)) throw ConfigError("grad_check epsilon must be positive");
  auto eval = [&]() {
    params.ZeroGrad();
    const double v = f(params);
    if (!std::isfinite(v)) throw NumericError("grad_check: function value is not finite");
    return v;
  };
  eval();
  std::vector<Matrix> analytic;
  for (const auto& p : params.params()) analytic.push_back(p.grad);

  GradCheckResult result;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Matrix& value = params.params()[pi].value;
    const Eigen::Index n = value.size();
    Eigen::Index stride = 1;
    if (options.max_coords_per_param > 0 && n > options.max_coords_per_param) {
      stride = (n + options.max_coords_per_param - 1) / options.max_coords_per_param;
    }
    for (Eigen::Index k = 0; k < n; k += stride) {
      const double saved = value.data()[k];
      value.data()[k] = saved + options.epsilon;
      const double up = eval();
      value.data()[k] = saved - options.epsilon;
      const double down = eval();
      value.data()[k] = saved;
      const double numeric = (up - down) / (2.0 * options.epsilon);
      const double a = analytic[pi].data()[k];
      const double denom = std::max({std::abs(a), std::abs(numeric), options.floor});
      const double err = std::abs(a - numeric) / denom;
      ++result.coordinates_checked;
      if (err > result.max_relative_error || result.worst_index < 0) {
        result.max_relative_error = err;
        result.worst_parameter = params.params()[pi].name;
        result.worst_index = static_cast<int>(k);
        result.analytic = a;
        result.numeric = numeric;
      }
    }
  }
  // Leave the analytic gradient in place for the caller.
  params.ZeroGrad();
  f(params);
  return result;
}

}  // namespace mdd
