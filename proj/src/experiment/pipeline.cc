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

#include "mdd/experiment/pipeline.h"

#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <sstream>

#include "mdd/acoustic/acoustic.h"
#include "mdd/binio.h"
#include "mdd/corpus/matrix_file.h"
#include "mdd/errors.h"
#include "mdd/labelaug/labelaug.h"
#include "mdd/mdmodel/checkpoint.h"
#include "mdd/rng.h"
#include "mdd/version.h"

namespace mdd {
namespace {

namespace fs = std::filesystem;

constexpr char kHypothesesHeader[] = "# mdd-hypotheses v1";
constexpr char kGopHeader[] = "# mdd-gop-decisions v1";

std::string Fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::string Exact(double v) { return Fmt("%.17g", v); }

void Require(const std::string& path, const std::string& producer) {
  if (!fs::exists(path)) {
    throw ConfigError("missing prerequisite " + path + " (run `" + producer + "` first)");
  }
}

Corpus LoadWorkCorpus(const ExperimentConfig& config) {
  const WorkLayout layout(config);
  Require(layout.manifest, "gen-corpus");
  return LoadCorpus(layout.manifest, BuildInventory());
}

std::vector<std::string> SplitSpaces(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

std::string JoinSymbols(const std::vector<int>& ids, const PhoneInventory& inv) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ' ';
    out += inv.Symbol(ids[i]);
  }
  return out;
}

// Decoder transcripts: pronounced sequence followed by eos.
std::vector<std::vector<int>> AttentionTranscripts(const std::vector<const Utterance*>& utts) {
  std::vector<std::vector<int>> out;
  for (const auto* u : utts) {
    auto seq = u->Pronounced();
    seq.push_back(kAttEos);
    out.push_back(std::move(seq));
  }
  return out;
}

ExperimentConfig WithCondition(const ExperimentConfig& config, const Condition& c) {
  ExperimentConfig out = config;
  out.input_aug = c.input_aug;
  out.label_aug = c.label_aug;
  out.spec_augment = c.spec_augment;
  return out;
}

MetricRow ReadEvalRow(const std::string& path, const std::string& config_hash) {
  Report r = ParseReportTsv(ReadFile(path));
  if (r.rows.size() != 1) throw SchemaError(path + ": expected exactly one row");
  for (const auto& [k, v] : r.header) {
    if (k == "config_hash" && v != config_hash) {
      throw SchemaError(path + " was produced under config " + v + ", this run is " + config_hash);
    }
  }
  return r.rows.front();
}

PrfPercent ToPercent(const Prf& p) { return {100.0 * p.recall, 100.0 * p.precision, 100.0 * p.f1}; }

std::vector<SystemOutput> ReadHypotheses(const std::string& path, const PhoneInventory& inv) {
  std::istringstream in(ReadFile(path));
  std::string line;
  if (!std::getline(in, line) || line != kHypothesesHeader) throw SchemaError(path + ": not a hypotheses file");
  std::vector<SystemOutput> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = SplitTabs(line);
    if (f.size() != 5) throw ParseError(path + ":" + std::to_string(lineno) + ": expected 5 fields");
    SystemOutput o;
    o.id = f[0];
    o.symbols = inv.Encode(SplitSpaces(f[1]));
    out.push_back(std::move(o));
  }
  return out;
}

std::vector<SystemOutput> ReadGopDecisions(const std::string& path, const PhoneInventory& inv) {
  std::istringstream in(ReadFile(path));
  std::string line;
  if (!std::getline(in, line) || line != kGopHeader) throw SchemaError(path + ": not a GOP decisions file");
  std::vector<SystemOutput> out;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto f = SplitTabs(line);
    if (f.size() != 4) throw ParseError(path + ":" + std::to_string(lineno) + ": expected 4 fields");
    SystemOutput o;
    o.id = f[0];
    for (const auto& v : SplitSpaces(f[1])) {
      if (v != "0" && v != "1") throw ParseError(path + ":" + std::to_string(lineno) + ": bad verdict " + v);
      o.verdicts.push_back(v == "1" ? Verdict::kMispronounced : Verdict::kCorrect);
    }
    o.symbols = inv.Encode(SplitSpaces(f[2]));
    if (o.symbols.size() != o.verdicts.size()) {
      throw SchemaError(path + ":" + std::to_string(lineno) + ": verdict/symbol count mismatch");
    }
    out.push_back(std::move(o));
  }
  return out;
}

// GOP verdicts for one utterance.
struct GopUtterance {
  std::vector<double> scores;
  std::vector<int> argmax;
};

GopUtterance ScoreUtterance(const FrameClassifier& am, const Utterance& u) {
  const Posteriorgram ppg = ExtractPpg(am, u.features);
  const Segmentation seg = ForcedAlign(ppg, u.canonical);
  return {GopScores(ppg, seg, u.canonical), SegmentArgmax(ppg, seg)};
}

template <typename Fn>
auto RunStage(const std::string& stage, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    throw ConfigError("stage " + stage + ": " + e.what());
  } catch (const IoError& e) {
    throw IoError("stage " + stage + ": " + e.what());
  } catch (const ParseError& e) {
    throw ParseError("stage " + stage + ": " + e.what());
  } catch (const SchemaError& e) {
    throw SchemaError("stage " + stage + ": " + e.what());
  } catch (const ShapeError& e) {
    throw ShapeError("stage " + stage + ": " + e.what());
  } catch (const NumericError& e) {
    throw NumericError("stage " + stage + ": " + e.what());
  } catch (const InfeasibleTarget& e) {
    throw InfeasibleTarget("stage " + stage + ": " + e.what());
  }
}

}  // namespace

// ---- Conditions and layout ----------------------------------------------

std::string Condition::Name() const {
  std::string n;
  if (input_aug && label_aug) {
    n = "ia_la";
  } else if (input_aug) {
    n = "ia";
  } else if (label_aug) {
    n = "la";
  } else {
    n = "base";
  }
  return spec_augment ? n + "_sa" : n;
}

Condition ConditionOf(const ExperimentConfig& config) {
  return {config.input_aug, config.label_aug, config.spec_augment};
}

std::vector<Condition> AllConditions() {
  std::vector<Condition> out;
  for (bool sa : {false, true}) {
    out.push_back({false, false, sa});
    out.push_back({true, false, sa});
    out.push_back({false, true, sa});
    out.push_back({true, true, sa});
  }
  return out;
}

WorkLayout::WorkLayout(const ExperimentConfig& config) : work_(config.work_dir) {
  manifest = config.CorpusDir() + "/manifest.tsv";
  acoustic_model = work_ + "/am/classifier.mdam";
  ppg_dir = work_ + "/ppg";
  embeddings = work_ + "/labelaug/cbow.emb";
  unigram = work_ + "/labelaug/unigram.dist";
  label_aug = work_ + "/labelaug/label_aug.dist";
  gop_decisions = work_ + "/gop/decisions.tsv";
  report_tsv = work_ + "/report.tsv";
  report_txt = work_ + "/report.txt";
}

std::string WorkLayout::Ppg(const std::string& id) const { return ppg_dir + "/" + id + ".mdpg"; }
std::string WorkLayout::Model(const std::string& name) const { return work_ + "/models/" + name + ".mdck"; }
std::string WorkLayout::Hypotheses(const std::string& name) const {
  return work_ + "/decode/" + name + ".hyp.tsv";
}
std::string WorkLayout::EvalRow(const std::string& name) const { return work_ + "/eval/" + name + ".row.tsv"; }
std::string WorkLayout::Confusions(const std::string& name) const {
  return work_ + "/eval/" + name + ".confusions.tsv";
}
std::string WorkLayout::Outcomes(const std::string& name) const {
  return work_ + "/eval/" + name + ".outcomes.tsv";
}

// ---- Examples and evaluation ----------------------------------------------

std::vector<MdExample> MakeExamples(const std::vector<const Utterance*>& utterances,
                                    const std::string& ppg_dir) {
  std::vector<MdExample> out;
  out.reserve(utterances.size());
  for (const auto* u : utterances) {
    MdExample ex;
    ex.id = u->id;
    ex.features = u->features;
    ex.target = u->Pronounced();
    if (!ppg_dir.empty()) {
      const std::string path = ppg_dir + "/" + u->id + ".mdpg";
      Require(path, "extract-ppg");
      ex.ppg = ReadMatrixFile(path, kPosteriorgramMagic);
    }
    out.push_back(std::move(ex));
  }
  return out;
}

Evaluation EvaluateOutputs(const std::vector<const Utterance*>& test,
                           const std::vector<SystemOutput>& outputs, bool gop,
                           const PhoneInventory& inv) {
  if (test.empty()) throw ConfigError("evaluation over an empty test split");
  std::map<std::string, const SystemOutput*> by_id;
  for (const auto& o : outputs) by_id[o.id] = &o;

  Evaluation ev;
  std::vector<std::vector<int>> refs;
  std::vector<std::vector<int>> hyps;
  std::map<std::string, std::vector<MDOutcome>> by_group;
  for (const auto* u : test) {
    auto it = by_id.find(u->id);
    if (it == by_id.end()) throw SchemaError("no system output for utterance " + u->id);
    const SystemOutput& o = *it->second;
    const auto canonical = CollapseSequence(u->canonical, inv);
    const auto pronounced = CollapseSequence(u->Pronounced(), inv);
    const auto system = CollapseSequence(o.symbols, inv);
    UtteranceOutcomes uo;
    if (gop) {
      uo = MdOutcomesFromVerdicts(canonical, pronounced, o.verdicts, system);
    } else {
      uo = MdOutcomes(canonical, pronounced, system);
      refs.push_back(pronounced);
      hyps.push_back(system);
    }
    auto& group = by_group[u->mother_tongue];
    group.insert(group.end(), uo.segments.begin(), uo.segments.end());
    for (const auto& s : uo.segments) {
      ev.outcomes.push_back(s);
      ev.outcome_ids.push_back(u->id);
    }
  }
  ev.row.model = gop ? "GOP" : "CTC-ATT";
  ev.row.cd = ToPercent(PrfMetrics(ev.outcomes, Verdict::kCorrect));
  ev.row.md = ToPercent(PrfMetrics(ev.outcomes, Verdict::kMispronounced));
  if (!gop) ev.row.per = PhoneErrorRate(refs, hyps);
  for (const auto& [tongue, outcomes] : by_group) {
    ev.row.group_md_f1[tongue] = 100.0 * PrfMetrics(outcomes, Verdict::kMispronounced).f1;
  }
  ev.confusions = ConfusionTable(ev.outcomes, inv);
  return ev;
}

// ---- Stages -------------------------------------------------------------

std::string StageGenCorpus(const ExperimentConfig& config) {
  config.Validate();
  CorpusConfig cc = config.corpus;
  cc.seed = DeriveSeed(config.seed, "corpus");
  const Corpus corpus = GenerateCorpus(BuildInventory(), cc);
  const std::string manifest = WriteCorpus(corpus, BuildInventory(), config.CorpusDir());
  return "gen-corpus: " + std::to_string(corpus.utterances.size()) + " utterances (train " +
         std::to_string(cc.counts.train) + ", dev " + std::to_string(cc.counts.dev) + ", test " +
         std::to_string(cc.counts.test) + ") -> " + manifest;
}

std::string StageTrainAm(const ExperimentConfig& config) {
  config.Validate();
  const Corpus corpus = LoadWorkCorpus(config);
  FrameClassifierConfig ac = config.am;
  ac.seed = DeriveSeed(config.seed, "train-am");
  const FrameClassifier am = TrainFrameClassifier(corpus.Select(Split::kTrain), ac);
  const WorkLayout layout(config);
  WriteFileAtomic(layout.acoustic_model, am.Encode());
  return "train-am: dev frame accuracy " + Fmt("%.4f", FrameAccuracy(am, corpus.Select(Split::kDev))) +
         " -> " + layout.acoustic_model;
}

std::string StageExtractPpg(const ExperimentConfig& config) {
  config.Validate();
  const Corpus corpus = LoadWorkCorpus(config);
  const WorkLayout layout(config);
  Require(layout.acoustic_model, "train-am");
  const FrameClassifier am = FrameClassifier::Decode(ReadFile(layout.acoustic_model), layout.acoustic_model);
  for (const auto& u : corpus.utterances) {
    WriteMatrixFile(layout.Ppg(u.id), ExtractPpg(am, u.features), kPosteriorgramMagic);
  }
  return "extract-ppg: " + std::to_string(corpus.utterances.size()) + " posteriorgrams -> " + layout.ppg_dir;
}

std::string StageTrainCbow(const ExperimentConfig& config) {
  config.Validate();
  const Corpus corpus = LoadWorkCorpus(config);
  const WorkLayout layout(config);
  const auto symbols = AttentionSymbols(BuildInventory());
  const auto transcripts = AttentionTranscripts(corpus.Select(Split::kTrain));
  CbowConfig cc = config.cbow;
  cc.seed = DeriveSeed(config.seed, "train-cbow");
  const PhoneEmbeddings emb = TrainCbow(transcripts, kAttVocabSize, cc);
  const SmoothingDistribution d_uni = UnigramDistribution(transcripts, kAttVocabSize);
  const SmoothingDistribution d_cbow = CbowDistribution(emb);
  const SmoothingDistribution mixed = InterpolateDistributions(d_cbow, d_uni, config.beta);
  WriteFileAtomic(layout.embeddings, EncodeEmbeddings(emb, symbols));
  WriteFileAtomic(layout.unigram, EncodeDistribution(d_uni, symbols));
  WriteFileAtomic(layout.label_aug, EncodeDistribution(mixed, symbols));
  return "train-cbow: " + std::to_string(emb.vectors.rows()) + "x" + std::to_string(emb.vectors.cols()) +
         " embeddings, beta " + Exact(config.beta) + " -> " + layout.label_aug;
}

std::string StageTrainMd(const ExperimentConfig& config, const std::string& smoothing_path) {
  config.Validate();
  const WorkLayout layout(config);
  const Condition cond = ConditionOf(config);
  const auto symbols = AttentionSymbols(BuildInventory());
  SmoothingDistribution smoothing;
  if (config.label_aug) {
    const std::string path = smoothing_path.empty() ? layout.label_aug : smoothing_path;
    if (!fs::exists(path)) {
      throw ConfigError("label augmentation needs the smoothing distribution written by `train-cbow`; " +
                        path + " does not exist");
    }
    smoothing = DecodeDistribution(ReadFile(path), symbols);
  }
  const Corpus corpus = LoadWorkCorpus(config);
  if (!config.label_aug) {
    smoothing = UnigramDistribution(AttentionTranscripts(corpus.Select(Split::kTrain)), kAttVocabSize);
  }
  const std::string ppg_dir = config.input_aug ? layout.ppg_dir : "";
  const auto train = MakeExamples(corpus.Select(Split::kTrain), ppg_dir);
  const auto dev = MakeExamples(corpus.Select(Split::kDev), ppg_dir);

  ModelConfig mc = config.model;
  mc.use_input_augmentation = config.input_aug;
  if (mc.use_input_augmentation) mc.ppg_dim = kNumBasePhones;
  TrainConfig tc = config.train;
  tc.spec_augment = config.spec_augment;
  tc.seed = DeriveSeed(config.seed, "train-md");
  TrainingMetadata meta;
  const MdModel model = TrainMdModel(mc, tc, train, dev, &smoothing, &meta);
  const std::string path = layout.Model(cond.Name());
  SaveCheckpoint(MakeCheckpoint(model, meta), path);
  return "train-md " + cond.Name() + ": best epoch " + std::to_string(meta.epoch) + "/" +
         std::to_string(meta.epochs_run) + ", dev att nll " + Fmt("%.6f", meta.dev_metric) + " -> " + path;
}

std::string StageDecode(const ExperimentConfig& config) {
  config.Validate();
  const WorkLayout layout(config);
  const Condition cond = ConditionOf(config);
  const std::string ckpt_path = layout.Model(cond.Name());
  Require(ckpt_path, "train-md");
  const MdModel model = ModelFromCheckpoint(LoadCheckpoint(ckpt_path));
  if (model.config().use_input_augmentation != config.input_aug) {
    throw ConfigError(ckpt_path + " was trained with a different input augmentation flag");
  }
  const Corpus corpus = LoadWorkCorpus(config);
  const auto test = MakeExamples(corpus.Select(Split::kTest), config.input_aug ? layout.ppg_dir : "");
  const PhoneInventory& inv = BuildInventory();
  std::string out = std::string(kHypothesesHeader) + "\n";
  for (const auto& ex : test) {
    const Hypothesis h = model.Decode(ex);
    out += ex.id + "\t" + JoinSymbols(h.symbols, inv) + "\t" + Exact(h.att_log_prob) + "\t" +
           Exact(h.ctc_log_prob) + "\t" + Exact(h.combined) + "\n";
  }
  const std::string path = layout.Hypotheses(cond.Name());
  WriteFileAtomic(path, out);
  return "decode " + cond.Name() + ": " + std::to_string(test.size()) + " utterances -> " + path;
}

std::string StageScoreGop(const ExperimentConfig& config) {
  config.Validate();
  const WorkLayout layout(config);
  Require(layout.acoustic_model, "train-am");
  const FrameClassifier am = FrameClassifier::Decode(ReadFile(layout.acoustic_model), layout.acoustic_model);
  const Corpus corpus = LoadWorkCorpus(config);
  const PhoneInventory& inv = BuildInventory();

  std::vector<GopSample> dev;
  for (const auto* u : corpus.Select(Split::kDev)) {
    const GopUtterance g = ScoreUtterance(am, *u);
    const auto canonical = CollapseSequence(u->canonical, inv);
    const auto human = MdOutcomesFromVerdicts(canonical, CollapseSequence(u->Pronounced(), inv),
                                              std::vector<Verdict>(canonical.size(), Verdict::kCorrect),
                                              canonical);
    for (std::size_t i = 0; i < canonical.size(); ++i) {
      dev.push_back({g.scores[i], human.segments[i].human == Verdict::kMispronounced});
    }
  }
  const Calibration cal = CalibrateThreshold(dev);

  std::string out = std::string(kGopHeader) + "\n# threshold=" + Exact(cal.threshold) +
                    "\n# dev_md_f1=" + Exact(cal.f1) + "\n";
  for (const auto* u : corpus.Select(Split::kTest)) {
    const GopUtterance g = ScoreUtterance(am, *u);
    const auto flags = GopDetect(g.scores, cal.threshold);
    std::string verdicts;
    std::vector<int> symbols;
    std::string scores;
    for (std::size_t i = 0; i < flags.size(); ++i) {
      if (i) {
        verdicts += ' ';
        scores += ' ';
      }
      verdicts += flags[i] ? '1' : '0';
      scores += Exact(g.scores[i]);
      symbols.push_back(flags[i] ? g.argmax[i] : u->canonical[i]);
    }
    out += u->id + "\t" + verdicts + "\t" + JoinSymbols(symbols, inv) + "\t" + scores + "\n";
  }
  WriteFileAtomic(layout.gop_decisions, out);
  return "score-gop: threshold " + Fmt("%.6f", cal.threshold) + ", dev MD F1 " + Fmt("%.4f", cal.f1) +
         " -> " + layout.gop_decisions;
}

std::string StageEvaluate(const ExperimentConfig& config, const std::string& name) {
  config.Validate();
  const WorkLayout layout(config);
  const PhoneInventory& inv = BuildInventory();
  const bool gop = name == kGopName;
  std::optional<Condition> cond;
  for (const auto& c : AllConditions()) {
    if (c.Name() == name) cond = c;
  }
  if (!gop && !cond) throw ConfigError("unknown system name: " + name);
  std::vector<SystemOutput> outputs;
  if (gop) {
    Require(layout.gop_decisions, "score-gop");
    outputs = ReadGopDecisions(layout.gop_decisions, inv);
  } else {
    Require(layout.Hypotheses(name), "decode");
    outputs = ReadHypotheses(layout.Hypotheses(name), inv);
  }
  const Corpus corpus = LoadWorkCorpus(config);
  Evaluation ev = EvaluateOutputs(corpus.Select(Split::kTest), outputs, gop, inv);
  if (cond) {
    ev.row.input_aug = cond->input_aug;
    ev.row.label_aug = cond->label_aug;
    ev.row.spec_augment = cond->spec_augment;
  }
  Report one;
  one.header = ReportHeader(config);
  one.rows = {ev.row};
  one.group_by = "mother_tongue";
  WriteFileAtomic(layout.EvalRow(name), RenderTsv(one));

  std::string conf = "pair\ttype\tcount\tdetection_rate\tdiagnosis_rate\n";
  for (const auto& r : ev.confusions) {
    conf += r.pair + "\t" + r.type + "\t" + std::to_string(r.count) + "\t" + Fmt("%.2f", r.detection_rate) +
            "\t" + Fmt("%.2f", r.diagnosis_rate) + "\n";
  }
  WriteFileAtomic(layout.Confusions(name), conf);

  auto sym = [&](int id) { return id == kNoSymbol ? std::string(kDeletionMarker) : inv.Symbol(id); };
  auto verdict = [](Verdict v) { return v == Verdict::kMispronounced ? "mis" : "cor"; };
  std::string dump = "utterance\tcanonical\thuman\thuman_symbol\tsystem\tsystem_symbol\n";
  for (std::size_t i = 0; i < ev.outcomes.size(); ++i) {
    const MDOutcome& o = ev.outcomes[i];
    dump += ev.outcome_ids[i] + "\t" + inv.Symbol(o.canonical) + "\t" + verdict(o.human) + "\t" +
            sym(o.human_symbol) + "\t" + verdict(o.system) + "\t" + sym(o.system_symbol) + "\n";
  }
  WriteFileAtomic(layout.Outcomes(name), dump);

  std::string summary = "evaluate " + name + ": MD F1 " + Fmt("%.2f", ev.row.md.f1) + ", CD F1 " +
                        Fmt("%.2f", ev.row.cd.f1);
  if (ev.row.per) summary += ", PER " + Fmt("%.2f", *ev.row.per);
  return summary + " -> " + layout.EvalRow(name);
}

std::vector<std::pair<std::string, std::string>> ReportHeader(const ExperimentConfig& config) {
  std::vector<std::pair<std::string, std::string>> h = {
      {"tool", std::string("mdd ") + kVersion},
      {"config_hash", ConfigHash(config)},
      {"seed", std::to_string(config.seed)},
      {"lambda_train", Exact(config.model.lambda_train)},
      {"lambda_decode", Exact(config.model.lambda_decode)},
      {"alpha", Exact(config.model.alpha)},
      {"beta", Exact(config.beta)},
      {"diagnosis", "conditioned on detection"},
  };
  std::string overrides;
  for (const auto& [k, v] : config.overrides) {
    if (!overrides.empty()) overrides += ' ';
    overrides += k + "=" + v;
  }
  h.emplace_back("overrides", overrides.empty() ? "none" : overrides);
  return h;
}

Report StageReport(const ExperimentConfig& config) {
  config.Validate();
  const WorkLayout layout(config);
  Report report;
  report.header = ReportHeader(config);
  report.group_by = "mother_tongue";
  std::vector<std::string> names;
  for (const auto& c : AllConditions()) names.push_back(c.Name());
  names.push_back(kGopName);
  for (const auto& n : names) {
    if (fs::exists(layout.EvalRow(n))) report.rows.push_back(ReadEvalRow(layout.EvalRow(n), ConfigHash(config)));
  }
  if (report.rows.empty()) throw ConfigError("no evaluated systems under " + config.work_dir + " (run `evaluate` first)");
  WriteFileAtomic(layout.report_tsv, RenderTsv(report));
  WriteFileAtomic(layout.report_txt, RenderText(report));
  return report;
}

Report RunExperimentMatrix(const ExperimentConfig& config) {
  config.Validate();
  RunStage("gen-corpus", [&] { return StageGenCorpus(config); });
  RunStage("train-am", [&] { return StageTrainAm(config); });
  RunStage("extract-ppg", [&] { return StageExtractPpg(config); });
  RunStage("train-cbow", [&] { return StageTrainCbow(config); });
  RunStage("score-gop", [&] { return StageScoreGop(config); });
  RunStage("evaluate gop", [&] { return StageEvaluate(config, kGopName); });
  for (const auto& c : AllConditions()) {
    const ExperimentConfig cc = WithCondition(config, c);
    RunStage("train-md " + c.Name(), [&] { return StageTrainMd(cc); });
    RunStage("decode " + c.Name(), [&] { return StageDecode(cc); });
    RunStage("evaluate " + c.Name(), [&] { return StageEvaluate(cc, c.Name()); });
  }
  return RunStage("report", [&] { return StageReport(config); });
}

}  // namespace mdd
