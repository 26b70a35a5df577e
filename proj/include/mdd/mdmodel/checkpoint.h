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
#include <vector>

#include "mdd/mdmodel/model.h"
#include "mdd/numcore/archive.h"

namespace mdd {

inline constexpr char kCheckpointMagic[] = "MDCK";
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::uint32_t version = kCheckpointVersion;
  ModelConfig config;
  TrainingMetadata metadata;
  std::vector<NamedTensor> tensors;
};

Checkpoint MakeCheckpoint(const MdModel& model, const TrainingMetadata& metadata);

// SchemaError if the tensors do not fit the config.
MdModel ModelFromCheckpoint(const Checkpoint& checkpoint);

// Tensors are stored as float32; a model whose parameters are already
// float-representable round-trips bit-exactly.
std::string EncodeCheckpoint(const Checkpoint& checkpoint);
// Bad magic or truncation -> ParseError; version mismatch -> SchemaError.
Checkpoint DecodeCheckpoint(const std::string& bytes, const std::string& what = "checkpoint");

void SaveCheckpoint(const Checkpoint& checkpoint, const std::string& path);
Checkpoint LoadCheckpoint(const std::string& path);

}  // namespace mdd
