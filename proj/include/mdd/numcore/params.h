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
#include <string>
#include <unordered_map>
#include <vector>

#include "mdd/numcore/matrix.h"

namespace mdd {

class Rng;

struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;  // same shape as value
};

// Named parameter tensors with gradient buffers. Layers refer to their
// tensors by the index returned from Add(), which stays valid as the store
// grows.
class ParamStore {
 public:
  // Zero-initialized. Duplicate names -> ConfigError.
  int Add(const std::string& name, int rows, int cols);

  // Fills a tensor uniformly in [-1/sqrt(fan_in), 1/sqrt(fan_in)].
  void InitUniform(int index, int fan_in, Rng& rng);

  Parameter& at(int index) { return params_.at(index); }
  const Parameter& at(int index) const { return params_.at(index); }
  Matrix& value(int index) { return params_.at(index).value; }
  const Matrix& value(int index) const { return params_.at(index).value; }
  Matrix& grad(int index) { return params_.at(index).grad; }

  // Throws ConfigError for unknown names.
  int IndexOf(const std::string& name) const;
  bool Contains(const std::string& name) const { return index_.count(name) > 0; }

  std::vector<Parameter>& params() { return params_; }
  const std::vector<Parameter>& params() const { return params_; }
  std::size_t size() const { return params_.size(); }
  std::size_t NumScalars() const;

  void ZeroGrad();
  double GradNorm() const;
  void ScaleGrad(double factor);

  std::uint64_t step = 0;

 private:
  std::vector<Parameter> params_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace mdd
