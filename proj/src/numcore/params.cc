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

#include "mdd/numcore/params.h"

#include <cmath>

#include "mdd/errors.h"
#include "mdd/rng.h"

namespace mdd {

int ParamStore::Add(const std::string& name, int rows, int cols) {
  if (rows < 0 || cols < 0) throw ShapeError("negative parameter shape for " + name);
  const int index = static_cast<int>(params_.size());
  if (!index_.emplace(name, index).second) {
    throw ConfigError("duplicate parameter name: " + name);
  }
  params_.push_back({name, Matrix::Zero(rows, cols), Matrix::Zero(rows, cols)});
  return index;
}

void ParamStore::InitUniform(int index, int fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(std::max(fan_in, 1)));
  Matrix& v = value(index);
  for (Eigen::Index i = 0; i < v.size(); ++i) v.data()[i] = rng.Uniform(-bound, bound);
}

int ParamStore::IndexOf(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw ConfigError("unknown parameter: " + name);
  return it->second;
}

std::size_t ParamStore::NumScalars() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p.value.size());
  return n;
}

void ParamStore::ZeroGrad() {
  for (auto& p : params_) p.grad.setZero();
}

double ParamStore::GradNorm() const {
  double sq = 0.0;
  for (const auto& p : params_) sq += p.grad.squaredNorm();
  return std::sqrt(sq);
}

void ParamStore::ScaleGrad(double factor) {
  for (auto& p : params_) p.grad *= factor;
}

}  // namespace mdd
