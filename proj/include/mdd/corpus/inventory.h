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

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mdd {

// Symbol ids: base phones occupy [0, kNumBasePhones), their anti-phones
// [kNumBasePhones, kNumPhoneSymbols). Model heads append their special
// symbols after these (see mdmodel/vocab.h).
inline constexpr int kNumBasePhones = 48;
inline constexpr int kNumPhoneSymbols = 2 * kNumBasePhones;
inline constexpr int kNumScoringPhones = 39;

// 48 training phones, one anti-phone per phone for distorted realizations,
// and the reduction to the 39-phone scoring set.
class PhoneInventory {
 public:
  // Parses "<phone48> <phone39>" records ('#' starts a comment). Throws
  // ConfigError if the table is not a total map from 48 distinct phones
  // onto 39 symbols that are themselves phones mapping to themselves.
  static PhoneInventory FromTable(std::string_view table_text);

  const std::vector<std::string>& base_phones() const { return base_; }
  const std::vector<std::string>& anti_phones() const { return anti_; }
  const std::string& blank() const { return blank_; }
  const std::string& sos() const { return sos_; }
  const std::string& eos() const { return eos_; }

  // Base id -> base id of its scoring-set representative.
  const std::vector<int>& collapse_map() const { return collapse_; }

  // Throws SchemaError for symbols outside base ∪ anti.
  int Index(std::string_view symbol) const;
  bool Contains(std::string_view symbol) const;
  const std::string& Symbol(int id) const;

  static bool IsAnti(int id) { return id >= kNumBasePhones; }
  static int BaseOf(int id) { return IsAnti(id) ? id - kNumBasePhones : id; }
  static int AntiOf(int id) { return BaseOf(id) + kNumBasePhones; }

  // Anti-phones collapse alongside their base phone.
  int Collapse(int id) const;

  std::vector<int> Encode(const std::vector<std::string>& symbols) const;
  std::vector<std::string> Decode(const std::vector<int>& ids) const;

  // The ids in the image of collapse_map, ascending.
  std::vector<int> ScoringSet() const;

  static constexpr std::string_view kAntiPrefix = "*";

 private:
  std::vector<std::string> base_;
  std::vector<std::string> anti_;
  std::string blank_ = "<blank>";
  std::string sos_ = "<sos>";
  std::string eos_ = "<eos>";
  std::vector<int> collapse_;
  std::unordered_map<std::string, int> index_;
};

// The inventory compiled into the library from data/timit_48_39.map.
const PhoneInventory& BuildInventory();

// Loads the table from a file. Missing file or invalid table -> ConfigError.
PhoneInventory BuildInventory(const std::string& table_path);

// Maps each symbol through the 48->39 reduction. Length is preserved.
std::vector<int> CollapseSequence(const std::vector<int>& seq,
                                  const PhoneInventory& inventory);
std::vector<std::string> CollapseSequence(const std::vector<std::string>& seq,
                                          const PhoneInventory& inventory);

}  // namespace mdd
