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

#include "mdd/corpus/inventory.h"

#include <fstream>
#include <set>
#include <sstream>

#include "mdd/errors.h"
#include "phone_table_data.h"

namespace mdd {

PhoneInventory PhoneInventory::FromTable(std::string_view table_text) {
  PhoneInventory inv;
  std::vector<std::pair<std::string, std::string>> rows;
  std::istringstream in{std::string(table_text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::string from, to, extra;
    if (!(fields >> from)) continue;
    if (!(fields >> to) || (fields >> extra)) {
      throw ConfigError("phone table line " + std::to_string(line_no) +
                        ": expected '<phone48> <phone39>'");
    }
    rows.emplace_back(from, to);
  }
  if (rows.size() != kNumBasePhones) {
    throw ConfigError("phone table must list exactly 48 phones, got " +
                      std::to_string(rows.size()));
  }
  for (const auto& [from, to] : rows) {
    if (from.starts_with(kAntiPrefix) || from.starts_with("<")) {
      throw ConfigError("reserved prefix in phone symbol: " + from);
    }
    if (!inv.index_.emplace(from, static_cast<int>(inv.base_.size())).second) {
      throw ConfigError("duplicate phone in table: " + from);
    }
    inv.base_.push_back(from);
  }
  for (const auto& phone : inv.base_) {
    inv.anti_.push_back(std::string(kAntiPrefix) + phone);
    inv.index_.emplace(inv.anti_.back(), static_cast<int>(inv.base_.size() + inv.anti_.size() - 1));
  }
  std::set<int> image;
  for (const auto& [from, to] : rows) {
    auto it = inv.index_.find(to);
    if (it == inv.index_.end() || IsAnti(it->second)) {
      throw ConfigError("collapse target is not a training phone: " + to);
    }
    inv.collapse_.push_back(it->second);
    image.insert(it->second);
  }
  for (int target : image) {
    if (inv.collapse_[target] != target) {
      throw ConfigError("collapse map is not idempotent at " + inv.base_[target]);
    }
  }
  if (image.size() != kNumScoringPhones) {
    throw ConfigError("collapse map image has " + std::to_string(image.size()) +
                      " symbols, expected 39");
  }
  return inv;
}

int PhoneInventory::Index(std::string_view symbol) const {
  auto it = index_.find(std::string(symbol));
  if (it == index_.end()) {
    throw SchemaError("unknown phone symbol: '" + std::string(symbol) + "'");
  }
  return it->second;
}

bool PhoneInventory::Contains(std::string_view symbol) const {
  return index_.count(std::string(symbol)) > 0;
}

const std::string& PhoneInventory::Symbol(int id) const {
  if (id < 0 || id >= kNumPhoneSymbols) {
    throw SchemaError("phone id out of range: " + std::to_string(id));
  }
  return IsAnti(id) ? anti_[id - kNumBasePhones] : base_[id];
}

int PhoneInventory::Collapse(int id) const {
  if (id < 0 || id >= kNumPhoneSymbols) {
    throw SchemaError("phone id out of range: " + std::to_string(id));
  }
  const int base = collapse_[BaseOf(id)];
  return IsAnti(id) ? AntiOf(base) : base;
}

std::vector<int> PhoneInventory::Encode(const std::vector<std::string>& symbols) const {
  std::vector<int> out;
  out.reserve(symbols.size());
  for (const auto& s : symbols) out.push_back(Index(s));
  return out;
}

std::vector<std::string> PhoneInventory::Decode(const std::vector<int>& ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (int id : ids) out.push_back(Symbol(id));
  return out;
}

std::vector<int> PhoneInventory::ScoringSet() const {
  std::set<int> image(collapse_.begin(), collapse_.end());
  return {image.begin(), image.end()};
}

const PhoneInventory& BuildInventory() {
  static const PhoneInventory inventory =
      PhoneInventory::FromTable(internal::kPhoneTable);
  return inventory;
}

PhoneInventory BuildInventory(const std::string& table_path) {
  std::ifstream in(table_path);
  if (!in) throw ConfigError("phone table not found: " + table_path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return PhoneInventory::FromTable(ss.str());
}

std::vector<int> CollapseSequence(const std::vector<int>& seq,
                                  const PhoneInventory& inventory) {
  std::vector<int> out;
  out.reserve(seq.size());
  for (int id : seq) out.push_back(inventory.Collapse(id));
  return out;
}

std::vector<std::string> CollapseSequence(const std::vector<std::string>& seq,
                                          const PhoneInventory& inventory) {
  return inventory.Decode(CollapseSequence(inventory.Encode(seq), inventory));
}

}  // namespace mdd
