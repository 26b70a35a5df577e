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

#include "mdd/corpus/inventory.h"
#include "mdd/numcore/matrix.h"

namespace mdd {

enum class Split { kTrain, kDev, kTest };
enum class ErrorKind { kCorrect, kSubstitution, kDeletion, kInsertion, kDistortion };

std::string_view SplitName(Split s);
Split ParseSplit(std::string_view s);
std::string_view ErrorKindName(ErrorKind k);
ErrorKind ParseErrorKind(std::string_view s);

// One entry of what the speaker actually said. Deletions carry the deleted
// canonical phone, distortions carry the anti-phone of the canonical phone.
struct PronouncedPhone {
  int symbol = 0;
  ErrorKind kind = ErrorKind::kCorrect;
  bool operator==(const PronouncedPhone&) const = default;
};

struct Utterance {
  std::string id;
  std::string speaker;
  std::string mother_tongue;
  Split split = Split::kTrain;
  std::vector<int> canonical;
  std::vector<PronouncedPhone> actual;
  Matrix features;                // T x F
  std::vector<int> frame_labels;  // length T, base-phone ids

  // `actual` with deletions dropped; the recognizer's reference.
  std::vector<int> Pronounced() const;
  int num_frames() const { return static_cast<int>(features.rows()); }
};

// Throws SchemaError describing the first violated invariant.
void ValidateUtterance(const Utterance& utt);

inline constexpr std::string_view kNativeTongue = "English";
// Mother tongues of the non-native speakers.
const std::vector<std::string>& L2MotherTongues();

struct ErrorModel {
  double p_sub = 0.08;
  double p_del = 0.03;
  double p_ins = 0.02;
  double p_distort = 0.05;
  // confusions[base id] = plausible substitutes, never the phone itself.
  std::vector<std::vector<int>> confusions;
  // Distorted frames sit this fraction of the way from the canonical
  // prototype toward a confusable phone's prototype.
  double prototype_shift = 0.5;

  // ConfigError on probabilities outside [0,1], sum > 1, or a phone with no
  // confusable neighbor.
  void Validate() const;
};

// Hand-picked common L2 English confusions plus the next phone in
// inventory order, so every phone has at least one neighbor.
std::vector<std::vector<int>> DefaultConfusions(const PhoneInventory& inventory);
ErrorModel DefaultErrorModel(const PhoneInventory& inventory);

struct SplitCounts {
  int train = 720;
  int dev = 120;
  int test = 120;
};

struct CorpusConfig {
  SplitCounts counts;
  // Share of the train split spoken by native (error-free) speakers.
  double l1_train_fraction = 0.3;
  ErrorModel error_model;
  int feature_dim = 16;
  int frames_per_phone = 8;
  double noise_stddev = 0.4;
  double speaker_stddev = 0.15;
  int lexicon_size = 150;
  int min_words = 3;
  int max_words = 5;
  std::uint64_t seed = 1;
};

CorpusConfig DefaultCorpusConfig(const PhoneInventory& inventory);

struct Corpus {
  std::vector<Utterance> utterances;

  std::vector<const Utterance*> Select(Split split) const;
};

// Pure function of (config, seed): every utterance draws from its own
// stream seeded by hash(seed, utterance index).
Corpus GenerateCorpus(const PhoneInventory& inventory, const CorpusConfig& config);

// Writes <dir>/manifest.tsv and <dir>/feats/<id>.mdft. Returns the manifest
// path. Throws IoError if the directory cannot be written.
std::string WriteCorpus(const Corpus& corpus, const PhoneInventory& inventory,
                        const std::string& dir);

// Parses a manifest and every feature file it references. Malformed line ->
// ParseError with the line number; missing feature file -> IoError naming
// it; invariant violations -> SchemaError.
Corpus LoadCorpus(const std::string& manifest_path, const PhoneInventory& inventory);

// Encodes the manifest alone (the feature files are written separately).
std::string EncodeManifest(const Corpus& corpus, const PhoneInventory& inventory);

}  // namespace mdd
