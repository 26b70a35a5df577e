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

#include "mdd/mdeval/mdeval.h"

#include <algorithm>
#include <map>

#include "mdd/errors.h"

namespace mdd {
namespace {

// Per canonical position: (verdict, symbol) from an alignment.
void SegmentVerdicts(const std::vector<AlignmentOp>& ops, std::size_t n_ref,
                     std::vector<Verdict>* verdicts, std::vector<int>* symbols, int* insertions) {
  verdicts->assign(n_ref, Verdict::kCorrect);
  symbols->assign(n_ref, kNoSymbol);
  *insertions = 0;
  std::size_t i = 0;
  for (const auto& op : ops) {
    switch (op.kind) {
      case OpKind::kInsertion:
        ++*insertions;
        break;
      case OpKind::kMatch:
        (*symbols)[i++] = op.hyp;
        break;
      case OpKind::kSubstitution:
        (*verdicts)[i] = Verdict::kMispronounced;
        (*symbols)[i++] = op.hyp;
        break;
      case OpKind::kDeletion:
        (*verdicts)[i++] = Verdict::kMispronounced;
        break;
    }
  }
}

}  // namespace

std::vector<AlignmentOp> AlignSequences(const std::vector<int>& ref, const std::vector<int>& hyp) {
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  std::vector<std::vector<int>> d(n + 1, std::vector<int>(m + 1, 0));
  for (std::size_t i = 0; i <= n; ++i) d[i][0] = static_cast<int>(i);
  for (std::size_t j = 0; j <= m; ++j) d[0][j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const int diag = d[i - 1][j - 1] + (ref[i - 1] != hyp[j - 1]);
      d[i][j] = std::min({diag, d[i - 1][j] + 1, d[i][j - 1] + 1});
    }
  }
  std::vector<AlignmentOp> ops;
  std::size_t i = n;
  std::size_t j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && d[i][j] == d[i - 1][j - 1] + (ref[i - 1] != hyp[j - 1])) {
      const bool same = ref[i - 1] == hyp[j - 1];
      ops.push_back({same ? OpKind::kMatch : OpKind::kSubstitution, ref[i - 1], hyp[j - 1]});
      --i;
      --j;
    } else if (i > 0 && d[i][j] == d[i - 1][j] + 1) {
      ops.push_back({OpKind::kDeletion, ref[i - 1], kNoSymbol});
      --i;
    } else {
      ops.push_back({OpKind::kInsertion, kNoSymbol, hyp[j - 1]});
      --j;
    }
  }
  std::reverse(ops.begin(), ops.end());
  return ops;
}

int EditDistance(const std::vector<AlignmentOp>& ops) {
  return static_cast<int>(std::count_if(ops.begin(), ops.end(),
                                        [](const AlignmentOp& op) { return op.kind != OpKind::kMatch; }));
}

UtteranceOutcomes MdOutcomes(const std::vector<int>& canonical, const std::vector<int>& pronounced,
                             const std::vector<int>& hypothesis) {
  std::vector<Verdict> sys;
  std::vector<int> sys_sym;
  int sys_ins = 0;
  SegmentVerdicts(AlignSequences(canonical, hypothesis), canonical.size(), &sys, &sys_sym, &sys_ins);
  UtteranceOutcomes out = MdOutcomesFromVerdicts(canonical, pronounced, sys, sys_sym);
  out.system_insertions = sys_ins;
  return out;
}

UtteranceOutcomes MdOutcomesFromVerdicts(const std::vector<int>& canonical,
                                         const std::vector<int>& pronounced,
                                         const std::vector<Verdict>& system,
                                         const std::vector<int>& system_symbols) {
  if (system.size() != canonical.size() || system_symbols.size() != canonical.size()) {
    throw ShapeError("one system verdict per canonical segment is required");
  }
  std::vector<Verdict> human;
  std::vector<int> human_sym;
  UtteranceOutcomes out;
  SegmentVerdicts(AlignSequences(canonical, pronounced), canonical.size(), &human, &human_sym,
                  &out.human_insertions);
  out.segments.resize(canonical.size());
  for (std::size_t i = 0; i < canonical.size(); ++i) {
    out.segments[i] = {canonical[i], human[i], human_sym[i], system[i], system_symbols[i]};
  }
  return out;
}

double F1Score(double precision, double recall) {
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

Prf PrfFromCounts(const PrfCounts& counts) {
  Prf r;
  r.counts = counts;
  r.precision = counts.detected ? static_cast<double>(counts.both) / counts.detected : 0.0;
  r.recall = counts.human ? static_cast<double>(counts.both) / counts.human : 0.0;
  r.f1 = F1Score(r.precision, r.recall);
  return r;
}

Prf PrfMetrics(const std::vector<MDOutcome>& outcomes, Verdict positive) {
  if (outcomes.empty()) throw ConfigError("precision/recall over an empty outcome set");
  PrfCounts c;
  for (const auto& o : outcomes) {
    const bool sys = o.system == positive;
    const bool hum = o.human == positive;
    c.detected += sys;
    c.human += hum;
    c.both += sys && hum;
  }
  return PrfFromCounts(c);
}

double PhoneErrorRate(const std::vector<std::vector<int>>& refs,
                      const std::vector<std::vector<int>>& hyps) {
  if (refs.size() != hyps.size()) throw ShapeError("PER needs one hypothesis per reference");
  long errors = 0;
  long length = 0;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    errors += EditDistance(AlignSequences(refs[i], hyps[i]));
    length += static_cast<long>(refs[i].size());
  }
  if (length == 0) throw ConfigError("PER over empty references");
  return 100.0 * static_cast<double>(errors) / static_cast<double>(length);
}

std::vector<ConfusionRow> ConfusionTable(const std::vector<MDOutcome>& outcomes,
                                         const PhoneInventory& inventory, int top_k) {
  struct Tally {
    std::string type;
    long count = 0;
    long detected = 0;
    long diagnosed = 0;
  };
  std::map<std::string, Tally> tallies;
  for (const auto& o : outcomes) {
    if (o.human != Verdict::kMispronounced) continue;
    std::string pair = inventory.Symbol(o.canonical) + "->";
    std::string type;
    if (o.human_symbol == kNoSymbol) {
      pair += kDeletionMarker;
      type = "Del.";
    } else {
      pair += inventory.Symbol(o.human_symbol);
      type = PhoneInventory::IsAnti(o.human_symbol) ? "Dist." : "Sub.";
    }
    Tally& t = tallies[pair];
    t.type = type;
    ++t.count;
    if (o.system == Verdict::kMispronounced) {
      ++t.detected;
      if (o.system_symbol == o.human_symbol) ++t.diagnosed;
    }
  }
  std::vector<ConfusionRow> rows;
  for (const auto& [pair, t] : tallies) {
    ConfusionRow r;
    r.pair = pair;
    r.type = t.type;
    r.count = t.count;
    r.detection_rate = 100.0 * static_cast<double>(t.detected) / static_cast<double>(t.count);
    r.diagnosis_rate = t.detected ? 100.0 * static_cast<double>(t.diagnosed) / static_cast<double>(t.detected) : 0.0;
    rows.push_back(r);
  }
  std::stable_sort(rows.begin(), rows.end(), [](const ConfusionRow& a, const ConfusionRow& b) {
    return a.count > b.count;
  });
  if (top_k >= 0 && rows.size() > static_cast<std::size_t>(top_k)) rows.resize(top_k);
  return rows;
}

}  // namespace mdd
