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
#include <vector>

#include "mdd/corpus/inventory.h"

namespace mdd {

// Phone ids 0..95 (48 base, 48 anti) are shared by both heads.
inline constexpr int kCtcBlank = kNumPhoneSymbols;      // 96
inline constexpr int kCtcVocabSize = kNumPhoneSymbols + 1;
inline constexpr int kAttSos = kNumPhoneSymbols;        // 96
inline constexpr int kAttEos = kNumPhoneSymbols + 1;    // 97
inline constexpr int kAttVocabSize = kNumPhoneSymbols + 2;

std::vector<std::string> CtcSymbols(const PhoneInventory& inventory);
std::vector<std::string> AttentionSymbols(const PhoneInventory& inventory);

inline bool IsPhoneId(int id) { return id >= 0 && id < kNumPhoneSymbols; }

}  // namespace mdd
