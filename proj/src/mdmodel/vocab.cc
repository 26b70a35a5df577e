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

#include "mdd/mdmodel/vocab.h"

namespace mdd {

std::vector<std::string> CtcSymbols(const PhoneInventory& inventory) {
  std::vector<std::string> out;
  out.reserve(kCtcVocabSize);
  for (int i = 0; i < kNumPhoneSymbols; ++i) out.push_back(inventory.Symbol(i));
  out.push_back(inventory.blank());
  return out;
}

std::vector<std::string> AttentionSymbols(const PhoneInventory& inventory) {
  std::vector<std::string> out;
  out.reserve(kAttVocabSize);
  for (int i = 0; i < kNumPhoneSymbols; ++i) out.push_back(inventory.Symbol(i));
  out.push_back(inventory.sos());
  out.push_back(inventory.eos());
  return out;
}

}  // namespace mdd
