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

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace mdd {

// Percentages (0..100).
struct PrfPercent {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  bool operator==(const PrfPercent&) const = default;
};

struct MetricRow {
  std::string model;
  std::optional<bool> input_aug;     // nullopt for non-E2E rows
  std::optional<bool> label_aug;
  std::optional<bool> spec_augment;
  PrfPercent cd;
  PrfPercent md;
  std::optional<double> per;          // GOP has no PER
  std::map<std::string, double> group_md_f1;  // e.g. by mother tongue
  bool operator==(const MetricRow&) const = default;
};

struct Report {
  std::vector<std::pair<std::string, std::string>> header;
  std::vector<MetricRow> rows;
  std::optional<std::string> group_by;
  bool operator==(const Report&) const = default;
};

// Group names shared by every row. Rows must agree, else SchemaError.
std::vector<std::string> GroupNames(const Report& report);

// Aligned text table, 2-decimal percentages.
std::string RenderText(const Report& report);

// Tab-separated, full precision; ParseReportTsv(RenderTsv(r)) == r.
std::string RenderTsv(const Report& report);
Report ParseReportTsv(const std::string& text);

}  // namespace mdd
