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
#include <utility>
#include <vector>

#include "mdd/acoustic/acoustic.h"
#include "mdd/corpus/corpus.h"
#include "mdd/labelaug/labelaug.h"
#include "mdd/mdmodel/model.h"

namespace mdd {

// Everything one experiment needs. Stage seeds are derived from `seed` by
// stage name, so the global seed is the only source of randomness.
struct ExperimentConfig {
  std::string work_dir = "work";
  std::string corpus_dir;  // empty -> <work_dir>/corpus
  std::uint64_t seed = 1;

  CorpusConfig corpus;
  FrameClassifierConfig am;
  CbowConfig cbow;
  double beta = 0.1;
  ModelConfig model;
  TrainConfig train;

  bool input_aug = false;
  bool label_aug = false;
  bool spec_augment = false;

  // Overrides in the order they were applied, verbatim.
  std::vector<std::pair<std::string, std::string>> overrides;

  std::string CorpusDir() const;
  void Validate() const;
};

ExperimentConfig DefaultExperimentConfig();

// Sets one key. Unknown key or malformed value -> ConfigError.
void ApplySetting(ExperimentConfig& config, const std::string& key, const std::string& value);

// Parses "key = value" lines ('#' comments). Errors name the line.
void ApplyConfigText(ExperimentConfig& config, const std::string& text);
ExperimentConfig LoadExperimentConfig(const std::string& path);

// "key=value" -> ApplySetting, and records it in `overrides`.
void ApplyOverride(ExperimentConfig& config, const std::string& assignment);

// Every key with its current value, sorted by key. Condition flags and
// paths are excluded so that all conditions of one experiment share a hash.
std::string CanonicalConfigText(const ExperimentConfig& config);
std::string ConfigHash(const ExperimentConfig& config);

// All keys accepted by ApplySetting.
std::vector<std::string> ConfigKeys();

}  // namespace mdd
