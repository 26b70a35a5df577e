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

#include "mdd/mdeval/report.h"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "mdd/errors.h"

namespace mdd {
namespace {

const std::vector<std::string> kGridColumns = {"model", "IA",    "LA",    "SA",    "CD_RE", "CD_PR",
                                               "CD_F1", "MD_RE", "MD_PR", "MD_F1", "PER"};

std::string Exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string Fixed2(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string Flag(const std::optional<bool>& f) {
  if (!f) return "-";
  return *f ? "yes" : "no";
}

std::optional<bool> ParseFlag(const std::string& s) {
  if (s == "-") return std::nullopt;
  if (s == "yes") return true;
  if (s == "no") return false;
  throw SchemaError("bad condition flag: " + s);
}

double ParseNumber(const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw SchemaError("bad number: " + s);
    return v;
  } catch (const std::logic_error&) {
    throw SchemaError("bad number: " + s);
  }
}

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == '\t') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string JoinTabs(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += '\t';
    out += cells[i];
  }
  return out;
}

std::string RenderAligned(const std::vector<std::vector<std::string>>& table) {
  std::vector<std::size_t> width;
  for (const auto& row : table) {
    if (width.size() < row.size()) width.resize(row.size(), 0);
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  for (const auto& row : table) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) line += "  ";
      line += row[c];
      if (c + 1 < row.size()) line.append(width[c] - row[c].size(), ' ');
    }
    out += line + "\n";
  }
  return out;
}

}  // namespace

std::vector<std::string> GroupNames(const Report& report) {
  if (report.rows.empty()) throw SchemaError("report has no rows");
  std::vector<std::string> names;
  for (const auto& [k, v] : report.rows.front().group_md_f1) names.push_back(k);
  for (const auto& row : report.rows) {
    if (row.group_md_f1.size() != names.size()) throw SchemaError("rows disagree on groups: " + row.model);
    std::size_t i = 0;
    for (const auto& [k, v] : row.group_md_f1) {
      if (k != names[i++]) throw SchemaError("rows disagree on groups: " + row.model);
    }
  }
  if (!report.group_by && !names.empty()) throw SchemaError("group values without group_by");
  return names;
}

std::string RenderText(const Report& report) {
  const auto groups = GroupNames(report);
  std::string out;
  for (const auto& [k, v] : report.header) out += "# " + k + ": " + v + "\n";
  std::vector<std::vector<std::string>> grid;
  grid.push_back({"Model", "IA", "LA", "SA", "CD RE", "CD PR", "CD F1", "MD RE", "MD PR", "MD F1", "PER"});
  for (const auto& r : report.rows) {
    grid.push_back({r.model, Flag(r.input_aug), Flag(r.label_aug), Flag(r.spec_augment), Fixed2(r.cd.recall),
                    Fixed2(r.cd.precision), Fixed2(r.cd.f1), Fixed2(r.md.recall), Fixed2(r.md.precision),
                    Fixed2(r.md.f1), r.per ? Fixed2(*r.per) : "-"});
  }
  out += RenderAligned(grid);
  if (!groups.empty()) {
    out += "\nMD F1 (%) by " + *report.group_by + "\n";
    std::vector<std::vector<std::string>> g;
    std::vector<std::string> head = {"Model", "IA", "LA", "SA"};
    head.insert(head.end(), groups.begin(), groups.end());
    g.push_back(head);
    for (const auto& r : report.rows) {
      std::vector<std::string> line = {r.model, Flag(r.input_aug), Flag(r.label_aug), Flag(r.spec_augment)};
      for (const auto& [k, v] : r.group_md_f1) line.push_back(Fixed2(v));
      g.push_back(line);
    }
    out += RenderAligned(g);
  }
  return out;
}

std::string RenderTsv(const Report& report) {
  const auto groups = GroupNames(report);
  std::string out = "# mdd-report v1\n";
  for (const auto& [k, v] : report.header) {
    if (k.find_first_of(":\n") != std::string::npos || v.find('\n') != std::string::npos) {
      throw SchemaError("header entries must be single-line and keys must not contain ':'");
    }
    out += "# " + k + ": " + v + "\n";
  }
  std::vector<std::string> head = kGridColumns;
  if (report.group_by) {
    for (const auto& g : groups) head.push_back(*report.group_by + "=" + g);
  }
  out += JoinTabs(head) + "\n";
  for (const auto& r : report.rows) {
    std::vector<std::string> cells = {r.model,           Flag(r.input_aug),      Flag(r.label_aug),
                                      Flag(r.spec_augment), Exact(r.cd.recall),  Exact(r.cd.precision),
                                      Exact(r.cd.f1),     Exact(r.md.recall),    Exact(r.md.precision),
                                      Exact(r.md.f1),     r.per ? Exact(*r.per) : "-"};
    for (const auto& [k, v] : r.group_md_f1) cells.push_back(Exact(v));
    out += JoinTabs(cells) + "\n";
  }
  return out;
}

Report ParseReportTsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "# mdd-report v1") throw SchemaError("not an mdd report");
  Report report;
  std::vector<std::string> head;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0 && head.empty()) {
      const auto colon = line.find(": ");
      if (colon == std::string::npos) throw SchemaError("bad header line: " + line);
      report.header.emplace_back(line.substr(2, colon - 2), line.substr(colon + 2));
      continue;
    }
    if (head.empty()) {
      head = SplitTabs(line);
      if (head.size() < kGridColumns.size() ||
          !std::equal(kGridColumns.begin(), kGridColumns.end(), head.begin())) {
        throw SchemaError("unexpected report columns");
      }
      for (std::size_t c = kGridColumns.size(); c < head.size(); ++c) {
        const auto eq = head[c].find('=');
        if (eq == std::string::npos) throw SchemaError("bad group column: " + head[c]);
        const std::string by = head[c].substr(0, eq);
        if (report.group_by && *report.group_by != by) throw SchemaError("mixed group_by columns");
        report.group_by = by;
      }
      continue;
    }
    const auto cells = SplitTabs(line);
    if (cells.size() != head.size()) throw SchemaError("row has " + std::to_string(cells.size()) +
                                                       " columns, expected " + std::to_string(head.size()));
    MetricRow r;
    r.model = cells[0];
    r.input_aug = ParseFlag(cells[1]);
    r.label_aug = ParseFlag(cells[2]);
    r.spec_augment = ParseFlag(cells[3]);
    r.cd = {ParseNumber(cells[4]), ParseNumber(cells[5]), ParseNumber(cells[6])};
    r.md = {ParseNumber(cells[7]), ParseNumber(cells[8]), ParseNumber(cells[9])};
    if (cells[10] != "-") r.per = ParseNumber(cells[10]);
    for (std::size_t c = kGridColumns.size(); c < head.size(); ++c) {
      r.group_md_f1[head[c].substr(head[c].find('=') + 1)] = ParseNumber(cells[c]);
    }
    report.rows.push_back(std::move(r));
  }
  if (head.empty()) throw SchemaError("report has no column header");
  return report;
}

}  // namespace mdd
