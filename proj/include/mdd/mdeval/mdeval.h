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

inline constexpr int kNoSymbol = -1;

enum class OpKind { kMatch, kSubstitution, kDeletion, kInsertion };

struct AlignmentOp {
  OpKind kind = OpKind::kMatch;
  int ref = kNoSymbol;  // absent for insertions
  int hyp = kNoSymbol;  // absent for deletions
  bool operator==(const AlignmentOp&) const = default;
};

// Minimal unit-cost Levenshtein alignment. The backtrace prefers the
// diagonal (match or substitution), then deletion, then insertion.
std::vector<AlignmentOp> AlignSequences(const std::vector<int>& ref, const std::vector<int>& hyp);

int EditDistance(const std::vector<AlignmentOp>& ops);

enum class Verdict { kCorrect, kMispronounced };

// One canonical phone segment.
struct MDOutcome {
  int canonical = kNoSymbol;
  Verdict human = Verdict::kCorrect;
  int human_symbol = kNoSymbol;   // kNoSymbol = deleted
  Verdict system = Verdict::kCorrect;
  int system_symbol = kNoSymbol;  // kNoSymbol = deleted
};

struct UtteranceOutcomes {
  std::vector<MDOutcome> segments;
  int human_insertions = 0;
  int system_insertions = 0;
};

// Verdicts per canonical segment from align(canonical, pronounced) and
// align(canonical, hypothesis): match -> correct, substitution (including
// an anti-phone) or deletion -> mispronounced. Insertions have no segment
// and are only tallied. Inputs are expected in the scoring inventory.
UtteranceOutcomes MdOutcomes(const std::vector<int>& canonical, const std::vector<int>& pronounced,
                             const std::vector<int>& hypothesis);

// Same human side, but the system verdicts and symbols are given per
// segment (used for the GOP baseline).
UtteranceOutcomes MdOutcomesFromVerdicts(const std::vector<int>& canonical,
                                         const std::vector<int>& pronounced,
                                         const std::vector<Verdict>& system,
                                         const std::vector<int>& system_symbols);

struct PrfCounts {
  long detected = 0;  // C_D
  long human = 0;     // C_H
  long both = 0;      // C_{D and H}
};

struct Prf {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  PrfCounts counts;
};

// Harmonic mean; 0 when both are 0.
double F1Score(double precision, double recall);

// precision = both/detected (0 if detected = 0), recall = both/human
// (0 if human = 0).
Prf PrfFromCounts(const PrfCounts& counts);

// Counts over `positive`. Empty outcomes -> ConfigError.
Prf PrfMetrics(const std::vector<MDOutcome>& outcomes, Verdict positive);

// 100 * sum of edit distances / sum of reference lengths. Empty or
// zero-length references -> ConfigError; list size mismatch -> ShapeError.
double PhoneErrorRate(const std::vector<std::vector<int>>& refs,
                      const std::vector<std::vector<int>>& hyps);

struct ConfusionRow {
  std::string pair;  // "dh->d", "d->SIL", "z->*z"
  std::string type;  // "Sub.", "Del.", "Dist."
  long count = 0;
  double detection_rate = 0.0;  // % of occurrences the system flagged
  double diagnosis_rate = 0.0;  // % of flagged ones with the human's symbol
};

inline constexpr const char* kDeletionMarker = "SIL";

// Groups human mispronunciations by (canonical, pronounced). Diagnosis is
// conditioned on detection; a detected deletion is diagnosed correctly iff
// the system also deleted the segment. Sorted by count (desc), then pair.
std::vector<ConfusionRow> ConfusionTable(const std::vector<MDOutcome>& outcomes,
                                         const PhoneInventory& inventory, int top_k = 10);

}  // namespace mdd
