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
#include <string_view>
#include <vector>

#include "mdd/numcore/matrix.h"
#include "mdd/numcore/params.h"

namespace mdd {

struct NamedTensor {
  std::string name;
  Matrix value;
};

// Layout: 4-byte magic, u32 version, u32-length-prefixed header text, u32
// tensor count, then per tensor a u32-length-prefixed name, u32 rows, u32
// cols and rows*cols little-endian float32 values.
struct TensorArchive {
  std::uint32_t version = 0;
  std::string header;
  std::vector<NamedTensor> tensors;
};

std::string EncodeArchive(std::string_view magic, const TensorArchive& archive);

// Wrong magic or truncated data -> ParseError; version != expected_version
// -> SchemaError.
TensorArchive DecodeArchive(std::string_view bytes, std::string_view magic,
                            std::uint32_t expected_version, const std::string& what);

std::vector<NamedTensor> SnapshotParams(const ParamStore& params);

// Copies tensors into an existing store by name. Missing names or shape
// disagreement -> SchemaError.
void RestoreParams(const std::vector<NamedTensor>& tensors, ParamStore& params);

// Rounds every parameter to float32 precision in place.
void RoundParamsToFloat(ParamStore& params);

}  // namespace mdd
