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

#include "mdd/numcore/optimizer.h"

#include <cmath>

#include "mdd/errors.h"

namespace mdd {

void AdamOptimizer::Step(ParamStore& params) {
  for (const auto& p : params.params()) {
    if (!p.grad.allFinite()) {
      throw NumericError("non-finite gradient in parameter " + p.name);
    }
  }
  if (m_.size() != params.size()) {
    m_.clear();
    v_.clear();
    for (const auto& p : params.params()) {
      m_.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
      v_.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
    }
  }
  double scale = 1.0;
  if (config_.clip_norm > 0.0) {
    const double norm = params.GradNorm();
    if (norm > config_.clip_norm) scale = config_.clip_norm / norm;
  }
  ++step_;
  const double t = static_cast<double>(step_);
  const double c1 = 1.0 - std::pow(config_.beta1, t);
  const double c2 = 1.0 - std::pow(config_.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Parameter& p = params.params()[i];
    const Matrix g = p.grad * scale;
    m_[i] = config_.beta1 * m_[i] + (1.0 - config_.beta1) * g;
    v_[i] = config_.beta2 * v_[i] + (1.0 - config_.beta2) * g.cwiseProduct(g);
    p.value.array() -= config_.learning_rate * (m_[i].array() / c1) /
                       ((v_[i].array() / c2).sqrt() + config_.epsilon);
  }
  ++params.step;
}

}  // namespace mdd
