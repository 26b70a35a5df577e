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

#include "mdd/corpus/corpus.h"
#include "mdd/experiment/config.h"
#include "mdd/mdeval/mdeval.h"
#include "mdd/mdeval/report.h"
#include "mdd/mdmodel/model.h"

namespace mdd {

// One cell of the {IA} x {LA} x {SpecAugment} grid.
struct Condition {
  bool input_aug = false;
  bool label_aug = false;
  bool spec_augment = false;
  // "base", "ia", "la", "ia_la", each with a "_sa" suffix under SpecAugment.
  std::string Name() const;
  bool operator==(const Condition&) const = default;
};

Condition ConditionOf(const ExperimentConfig& config);
// Baseline, +IA, +LA, +IA+LA without SpecAugment, then the same with it.
std::vector<Condition> AllConditions();
// Name of the GOP baseline in artifacts and reports.
inline constexpr const char kGopName[] = "gop";

// Artifact locations under the work directory.
struct WorkLayout {
  explicit WorkLayout(const ExperimentConfig& config);
  std::string manifest;
  std::string acoustic_model;
  std::string ppg_dir;
  std::string embeddings;
  std::string unigram;
  std::string label_aug;
  std::string gop_decisions;
  std::string report_tsv;
  std::string report_txt;
  std::string Ppg(const std::string& utterance_id) const;
  std::string Model(const std::string& name) const;
  std::string Hypotheses(const std::string& name) const;
  std::string EvalRow(const std::string& name) const;
  std::string Confusions(const std::string& name) const;
  std::string Outcomes(const std::string& name) const;

 private:
  std::string work_;
};

// Each stage writes its artifacts atomically and returns a one-line
// summary. Missing prerequisites -> ConfigError naming them.
std::string StageGenCorpus(const ExperimentConfig& config);
std::string StageTrainAm(const ExperimentConfig& config);
std::string StageExtractPpg(const ExperimentConfig& config);
std::string StageTrainCbow(const ExperimentConfig& config);
// `smoothing_path` overrides the label-augmentation artifact location.
std::string StageTrainMd(const ExperimentConfig& config, const std::string& smoothing_path = "");
std::string StageDecode(const ExperimentConfig& config);
std::string StageScoreGop(const ExperimentConfig& config);
// `name` is a condition name or kGopName.
std::string StageEvaluate(const ExperimentConfig& config, const std::string& name);
// Collects the evaluated rows (in AllConditions order, GOP last) present in
// the work directory. No rows -> ConfigError.
Report StageReport(const ExperimentConfig& config);

// Header records shared by every report of one configuration.
std::vector<std::pair<std::string, std::string>> ReportHeader(const ExperimentConfig& config);

// Every stage for all eight conditions plus GOP, then the report. A stage
// failure is rethrown as the same error type prefixed with the stage name.
Report RunExperimentMatrix(const ExperimentConfig& config);

// ---- Evaluation helpers ------------------------------------------------------

// Training/decoding inputs for one split. PPGs are read from `ppg_dir` when
// it is nonempty.
std::vector<MdExample> MakeExamples(const std::vector<const Utterance*>& utterances,
                                    const std::string& ppg_dir);

struct SystemOutput {
  std::string id;
  std::vector<Verdict> verdicts;  // GOP only
  std::vector<int> symbols;       // E2E: hypothesis; GOP: per-segment symbol
};

// Scores test utterances against system outputs (matched by id). E2E rows
// carry PER; `gop` selects per-segment verdicts instead of alignment.
struct Evaluation {
  MetricRow row;
  std::vector<MDOutcome> outcomes;
  std::vector<std::string> outcome_ids;  // utterance id per outcome
  std::vector<ConfusionRow> confusions;
};
Evaluation EvaluateOutputs(const std::vector<const Utterance*>& test,
                           const std::vector<SystemOutput>& outputs, bool gop,
                           const PhoneInventory& inventory);

}  // namespace mdd
