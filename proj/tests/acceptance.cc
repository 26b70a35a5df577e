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

// Acceptance gate: one PASS/FAIL line per criterion, tolerances pinned here.
// Exit status is nonzero if any selected criterion fails.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "mdd/acoustic/acoustic.h"
#include "mdd/binio.h"
#include "mdd/corpus/corpus.h"
#include "mdd/corpus/inventory.h"
#include "mdd/ctc/ctc.h"
#include "mdd/experiment/config.h"
#include "mdd/experiment/pipeline.h"
#include "mdd/labelaug/labelaug.h"
#include "mdd/mdeval/mdeval.h"
#include "mdd/mdmodel/checkpoint.h"
#include "mdd/mdmodel/model.h"
#include "mdd/numcore/layers.h"
#include "mdd/numcore/params.h"
#include "mdd/rng.h"
#include "oracles.h"
#include "reference_tables.h"
#include "small_experiment.h"
#include "test_util.h"

namespace mdd {
namespace {

constexpr double kCtcTol = 1e-9;
constexpr double kGradTol = 1e-4;
constexpr int kGradSeeds = 5;
constexpr double kF1Tol = 0.01;
constexpr double kDistSumTol = 1e-9;
constexpr double kSmokeMaxPer = 20.0;
constexpr double kSmokeMinMdF1 = 55.0;  // percent
constexpr double kIaPerMargin = 0.5;

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void RunCriterion(int id, const char* what, const std::function<Outcome()>& run) {
  Outcome o;
  try {
    o = run();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("%s criterion %d: %s [%s]\n", o.pass ? "PASS" : "FAIL", id, what, o.detail.c_str());
  std::fflush(stdout);
}

std::string Num(double v, const char* fmt = "%.3g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

// ---- 1 ----------------------------------------------------------------------

Outcome CtcOracle() {
  Rng rng(101);
  double worst = 0.0;
  int n = 0, repeats = 0, empty = 0;
  for (int i = 0; i < 200; ++i) {
    const int t_len = rng.UniformInt(1, 6);
    const int v = rng.UniformInt(2, 4);
    const int blank = rng.UniformInt(0, v - 1);
    const Matrix lp = test::RandomLogProbs(rng, t_len, v);
    std::vector<int> target(rng.UniformInt(0, std::min(t_len, 3)));
    for (std::size_t k = 0; k < target.size(); ++k) {
      int s = rng.UniformInt(0, v - 2);
      if (s >= blank) ++s;
      target[k] = (i % 3 == 0 && k > 0) ? target[k - 1] : s;
    }
    while (CtcMinFrames(target) > t_len) target.pop_back();
    worst = std::max(worst, std::abs(-CtcForwardBackward(lp, target, blank).loss -
                                     oracle::BruteForceCtcLogProb(lp, target, blank)));
    ++n;
    empty += target.empty();
    for (std::size_t k = 1; k < target.size(); ++k) {
      if (target[k] == target[k - 1]) {
        ++repeats;
        break;
      }
    }
  }
  return {worst < kCtcTol && n >= 100 && repeats > 0 && empty > 0,
          std::to_string(n) + " instances, " + std::to_string(repeats) + " with repeats, " +
              std::to_string(empty) + " empty, max |diff| " + Num(worst)};
}

// ---- 2 ----------------------------------------------------------------------

double ParamsError(ParamStore& ps, const std::function<double()>& loss) {
  double worst = 0.0;
  for (auto& p : ps.params()) {
    const Matrix analytic = p.grad;
    worst = std::max(worst, oracle::MaxRelativeError(analytic, oracle::NumericGradient(loss, p.value)));
  }
  return worst;
}

// Central differences on a seeded sample of coordinates per tensor.
double SampledError(ParamStore& ps, const std::function<double()>& loss, Rng& rng, int per_tensor) {
  double worst = 0.0;
  for (auto& p : ps.params()) {
    for (int k = 0; k < per_tensor; ++k) {
      const int r = rng.UniformInt(0, static_cast<int>(p.value.rows()) - 1);
      const int c = rng.UniformInt(0, static_cast<int>(p.value.cols()) - 1);
      const double keep = p.value(r, c);
      p.value(r, c) = keep + 1e-5;
      const double up = loss();
      p.value(r, c) = keep - 1e-5;
      const double down = loss();
      p.value(r, c) = keep;
      Matrix a(1, 1), n(1, 1);
      a(0, 0) = p.grad(r, c);
      n(0, 0) = (up - down) / 2e-5;
      worst = std::max(worst, oracle::MaxRelativeError(a, n));
    }
  }
  return worst;
}

ModelConfig ToyModel(bool ia) {
  ModelConfig c;
  c.feature_dim = 3;
  c.use_input_augmentation = ia;
  c.ppg_dim = 4;
  c.encoder_hidden = 3;
  c.decoder_hidden = 4;
  c.attention_dim = 3;
  c.embedding_dim = 2;
  c.downsample = 2;
  return c;
}

MdExample ToyExample(Rng& rng, const ModelConfig& c, int frames, std::vector<int> target) {
  MdExample ex;
  ex.features = test::RandomMatrix(rng, frames, c.feature_dim);
  if (c.use_input_augmentation) ex.ppg = test::RandomLogProbs(rng, frames, c.ppg_dim).array().exp().matrix();
  ex.target = std::move(target);
  return ex;
}

Outcome GradientSuite() {
  std::vector<std::pair<std::string, double>> worst = {{"linear", 0}, {"recurrent", 0}, {"log-softmax", 0},
                                                       {"attention", 0}, {"ctc", 0}, {"kl", 0},
                                                       {"objective", 0}};
  auto bump = [&](int i, double e) { worst[i].second = std::max(worst[i].second, e); };
  const SmoothingDistribution smooth = UnigramDistribution({{0, 1, 2, 97}, {3, 3, 97}}, kAttVocabSize);
  for (int seed = 1; seed <= kGradSeeds; ++seed) {
    Rng rng(1000 + seed);
    {
      ParamStore ps;
      LinearLayer l = LinearLayer::Create(ps, "lin", 4, 3);
      l.Init(ps, rng);
      const Matrix x = test::RandomMatrix(rng, 5, 4);
      const Matrix r = test::RandomMatrix(rng, 5, 3);
      ps.ZeroGrad();
      l.Backward(ps, x, r);
      bump(0, ParamsError(ps, [&] { return (l.Forward(ps, x).array() * r.array()).sum(); }));
    }
    for (Direction dir : {Direction::kForward, Direction::kBackward, Direction::kBidirectional}) {
      ParamStore ps;
      RecurrentLayer l = RecurrentLayer::Create(ps, "rnn", 3, 4, dir);
      l.Init(ps, rng);
      const Matrix x = test::RandomMatrix(rng, 5, 3);
      const Matrix r = test::RandomMatrix(rng, 5, l.output_width());
      RecurrentCache cache;
      l.Forward(ps, x, &cache);
      ps.ZeroGrad();
      l.Backward(ps, x, cache, r);
      bump(1, ParamsError(ps, [&] { return (l.Forward(ps, x, nullptr).array() * r.array()).sum(); }));
    }
    {
      Matrix x = test::RandomMatrix(rng, 3, 5, 3.0);
      const Matrix w = test::RandomMatrix(rng, 3, 5);
      const Matrix dx = LogSoftmaxBackward(LogSoftmaxRows(x), w);
      bump(2, oracle::MaxRelativeError(
                  dx, oracle::NumericGradient([&] { return (LogSoftmaxRows(x).array() * w.array()).sum(); }, x)));
    }
    {
      const ModelConfig c = ToyModel(seed % 2 == 0);
      MdModel m(c);
      m.Init(seed);
      const MdExample ex = ToyExample(rng, c, 7, {1, 5, 5});
      const std::vector<const MdExample*> batch = {&ex};
      m.Objective(batch, 0.0, nullptr, 0.0, true);
      bump(3, SampledError(m.params(), [&] { return m.Objective(batch, 0.0, nullptr, 0.0, false).total; }, rng, 3));
    }
    {
      Matrix logits = test::RandomMatrix(rng, 5, 4);
      const std::vector<int> target = {1, 2, 2};
      const Matrix lp = LogSoftmaxRows(logits);
      const Matrix g = LogSoftmaxBackward(lp, CtcForwardBackward(lp, target, 0).grad);
      bump(4, oracle::MaxRelativeError(g, oracle::NumericGradient(
                                              [&] { return CtcForwardBackward(LogSoftmaxRows(logits), target, 0).loss; },
                                              logits)));
    }
    {
      SmoothingDistribution t;
      const Matrix tl = test::RandomLogProbs(rng, 1, 6);
      for (int k = 0; k < 6; ++k) t.probs.push_back(std::exp(tl(0, k)));
      double z = 0;
      for (double p : t.probs) z += p;
      for (double& p : t.probs) p /= z;
      Matrix logits = test::RandomMatrix(rng, 1, 6);
      const Matrix lp = LogSoftmaxRows(logits);
      const Matrix g = LogSoftmaxBackward(lp, KlPenalty(t, lp.row(0)).grad);
      bump(5, oracle::MaxRelativeError(
                  g, oracle::NumericGradient([&] { return KlPenalty(t, LogSoftmaxRows(logits).row(0)).value; }, logits)));
    }
    {
      const ModelConfig c = ToyModel(seed % 2 == 1);
      MdModel m(c);
      m.Init(seed + 50);
      const MdExample a = ToyExample(rng, c, 8, {2, 7, 7});
      const MdExample b = ToyExample(rng, c, 5, {50});
      const std::vector<const MdExample*> batch = {&a, &b};
      m.Objective(batch, 0.3, &smooth, 0.4, true);
      bump(6, SampledError(m.params(), [&] { return m.Objective(batch, 0.3, &smooth, 0.4, false).total; }, rng, 3));
    }
  }
  Outcome o;
  for (const auto& [name, err] : worst) {
    o.pass = o.pass && err < kGradTol;
    if (!o.detail.empty()) o.detail += ", ";
    o.detail += name + " " + Num(err);
  }
  o.detail = std::to_string(kGradSeeds) + " seeds; " + o.detail;
  return o;
}

// ---- 3 ----------------------------------------------------------------------

Outcome MetricArithmetic() {
  int ok = 0, total = 0;
  std::string misses;
  for (const auto& row : reference::kBenchmarkRows) {
    for (const auto& [label, cell] : {std::pair{"CD", row.cd}, std::pair{"MD", row.md}}) {
      ++total;
      const double f1 = F1Score(cell.precision, cell.recall);
      if (std::abs(f1 - cell.f1) <= kF1Tol + 1e-9) {
        ++ok;
      } else {
        misses += std::string("; ") + row.name + " " + label + " " + Num(cell.recall, "%.2f") + "/" +
                  Num(cell.precision, "%.2f") + " -> " + Num(f1, "%.2f") + " vs printed " + Num(cell.f1, "%.2f");
      }
    }
  }
  // 282 of 436 dh->d occurrences flagged.
  const PhoneInventory& inv = BuildInventory();
  std::vector<MDOutcome> outs(436);
  for (int i = 0; i < 436; ++i) {
    outs[i].canonical = inv.Index("dh");
    outs[i].human = Verdict::kMispronounced;
    outs[i].human_symbol = inv.Index("d");
    outs[i].system = i < 282 ? Verdict::kMispronounced : Verdict::kCorrect;
    outs[i].system_symbol = inv.Index("d");
  }
  const double rate = ConfusionTable(outs, inv).front().detection_rate;
  const bool confusion_ok = std::abs(rate - reference::kDhToDDetection) <= 0.005;
  return {ok == total && confusion_ok, std::to_string(ok) + "/" + std::to_string(total) +
                                     " F1 pairs within " + Num(kF1Tol) + "; 282/436 -> " + Num(rate, "%.2f") +
                                     "%" + misses};
}

// ---- 4 ----------------------------------------------------------------------

Outcome AlignmentOracles() {
  Rng rng(404);
  int lev_bad = 0;
  for (int i = 0; i < 300; ++i) {
    std::vector<int> a(rng.UniformInt(0, 6)), b(rng.UniformInt(0, 6));
    for (auto& x : a) x = rng.UniformInt(0, 3);
    for (auto& x : b) x = rng.UniformInt(0, 3);
    lev_bad += EditDistance(AlignSequences(a, b)) != oracle::BruteForceEditDistance(a, b);
  }
  int fa_bad = 0;
  for (int i = 0; i < 300; ++i) {
    const int t_len = rng.UniformInt(1, 8);
    const int l_len = rng.UniformInt(1, std::min(3, t_len));
    const Matrix ppg = test::RandomLogProbs(rng, t_len, 5).array().exp().matrix();
    std::vector<int> phones(l_len);
    for (auto& p : phones) p = rng.UniformInt(0, 4);
    const Segmentation seg = ForcedAlign(ppg, phones);
    const auto ref = oracle::ExhaustiveForcedAlign(ppg, phones);
    fa_bad += std::abs(seg.score - ref.score) > 1e-9 || seg.segments != ref.segments;
  }
  return {lev_bad == 0 && fa_bad == 0, "levenshtein 300 pairs, " + std::to_string(lev_bad) +
                                           " mismatches; viterbi 300 cases, " + std::to_string(fa_bad) +
                                           " mismatches"};
}

// ---- 5 ----------------------------------------------------------------------

Outcome DistributionInvariants() {
  Rng rng(505);
  std::vector<std::vector<int>> transcripts;
  for (int i = 0; i < 100; ++i) {
    std::vector<int> s(rng.UniformInt(3, 10));
    for (auto& x : s) x = rng.UniformInt(0, kAttVocabSize - 1);
    transcripts.push_back(s);
  }
  CbowConfig cfg;
  cfg.dim = 8;
  cfg.epochs = 3;
  const SmoothingDistribution uni = UnigramDistribution(transcripts, kAttVocabSize);
  const SmoothingDistribution cbow = CbowDistribution(TrainCbow(transcripts, kAttVocabSize, cfg));
  const SmoothingDistribution mixed = InterpolateDistributions(cbow, uni, 0.1);
  auto sum_err = [](const SmoothingDistribution& d) {
    double s = 0;
    for (double p : d.probs) s += p;
    return std::abs(s - 1.0);
  };
  const double worst_sum = std::max({sum_err(uni), sum_err(cbow), sum_err(mixed)});
  const bool endpoints = InterpolateDistributions(cbow, uni, 0.0).probs == uni.probs &&
                         InterpolateDistributions(cbow, uni, 1.0).probs == cbow.probs;
  PhoneEmbeddings same;
  same.vectors = Matrix::Constant(kAttVocabSize, 8, 0.7);
  double uniform_dev = 0.0;
  for (double p : CbowDistribution(same).probs) uniform_dev = std::max(uniform_dev, std::abs(p - 1.0 / kAttVocabSize));
  double min_kl = 0.0, self_kl = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int n = rng.UniformInt(2, 10);
    const Matrix lp = test::RandomLogProbs(rng, 1, n);
    const Matrix lq = test::RandomLogProbs(rng, 1, n);
    SmoothingDistribution p;
    for (int k = 0; k < n; ++k) p.probs.push_back(std::exp(lp(0, k)));
    min_kl = std::min(min_kl, KlPenalty(p, lq.row(0)).value);
    self_kl = std::max(self_kl, std::abs(KlPenalty(p, lp.row(0)).value));
  }
  return {worst_sum <= kDistSumTol && endpoints && uniform_dev < 1e-12 && min_kl >= -1e-12 && self_kl < 1e-12,
          "max |sum-1| " + Num(worst_sum) + ", endpoints " + (endpoints ? "exact" : "inexact") +
              ", max uniform deviation " + Num(uniform_dev) + ", min KL " + Num(min_kl) + ", max KL(p||p) " +
              Num(self_kl)};
}

// ---- 6 ----------------------------------------------------------------------

Outcome GopProperties() {
  Rng rng(606);
  double max_gop = -1e300;
  for (int i = 0; i < 300; ++i) {
    const int t_len = rng.UniformInt(3, 15);
    const Matrix ppg = test::RandomLogProbs(rng, t_len, 8).array().exp().matrix();
    std::vector<int> phones(rng.UniformInt(1, 3));
    for (auto& p : phones) p = rng.UniformInt(0, 7);
    for (double g : GopScores(ppg, ForcedAlign(ppg, phones), phones)) max_gop = std::max(max_gop, g);
  }
  Matrix ppg = Matrix::Constant(6, 8, 0.02);
  for (int t = 0; t < 6; ++t) ppg(t, t < 3 ? 1 : 6) = 0.86;
  double consistent = 0.0;
  for (double g : GopScores(ppg, ForcedAlign(ppg, {1, 6}), {1, 6})) consistent = std::max(consistent, std::abs(g));
  std::vector<GopSample> dev;
  for (int i = 0; i < 25; ++i) dev.push_back({-4.0 - 0.05 * i, true});
  for (int i = 0; i < 40; ++i) dev.push_back({-0.2 * i / 40.0, false});
  const Calibration c = CalibrateThreshold(dev);
  return {max_gop <= 0.0 && consistent == 0.0 && c.f1 == 1.0,
          "max GOP " + Num(max_gop) + ", argmax-consistent |GOP| " + Num(consistent) + ", calibrated F1 " +
              Num(c.f1) + " at threshold " + Num(c.threshold)};
}

// ---- 7 ----------------------------------------------------------------------

// Default configuration, seed 1: the baseline and the +IA condition are
// trained and evaluated on the held-out test split.
Outcome EndToEndSmoke() {
  test::TempDir dir;
  ExperimentConfig config = DefaultExperimentConfig();
  config.work_dir = dir.path();
  config.seed = 1;
  StageGenCorpus(config);
  StageTrainAm(config);
  StageExtractPpg(config);
  std::vector<MetricRow> rows;
  for (bool ia : {false, true}) {
    ExperimentConfig c = config;
    c.input_aug = ia;
    StageTrainMd(c);
    StageDecode(c);
    StageEvaluate(c, ConditionOf(c).Name());
    rows.push_back(ParseReportTsv(ReadFile(WorkLayout(c).EvalRow(ConditionOf(c).Name()))).rows.at(0));
  }
  const double base_per = *rows[0].per;
  const double ia_per = *rows[1].per;
  const double base_f1 = rows[0].md.f1;
  return {base_per <= kSmokeMaxPer && base_f1 >= kSmokeMinMdF1 && ia_per <= base_per + kIaPerMargin,
          std::to_string(config.corpus.counts.train) + " train utts, seed 1; baseline PER " + Num(base_per, "%.2f") +
              " MD F1 " + Num(base_f1, "%.2f") + "; IA PER " + Num(ia_per, "%.2f") + " MD F1 " +
              Num(rows[1].md.f1, "%.2f")};
}

// ---- 8 ----------------------------------------------------------------------

Outcome Determinism() {
  test::TempDir a_dir, b_dir;
  std::vector<std::string> artifacts[2];
  int k = 0;
  for (const std::string& work : {a_dir.path(), b_dir.path()}) {
    ExperimentConfig c = test::SmallExperiment(work);
    c.label_aug = true;
    StageGenCorpus(c);
    StageTrainAm(c);
    StageExtractPpg(c);
    StageTrainCbow(c);
    StageTrainMd(c);
    StageDecode(c);
    StageEvaluate(c, "la");
    const WorkLayout l(c);
    for (const auto& p : {l.manifest, l.embeddings, l.label_aug, l.Model("la"), l.Hypotheses("la"), l.EvalRow("la"),
                          l.Outcomes("la")}) {
      artifacts[k].push_back(ReadFile(p));
    }
    ++k;
  }
  const char* names[] = {"corpus", "cbow", "smoothing", "checkpoint", "decode", "evaluation", "outcomes"};
  std::string diff;
  for (std::size_t i = 0; i < artifacts[0].size(); ++i) {
    if (artifacts[0][i] != artifacts[1][i]) diff += std::string(" ") + names[i];
  }
  const Checkpoint ck = DecodeCheckpoint(artifacts[0][3]);
  const bool round_trip = EncodeCheckpoint(MakeCheckpoint(ModelFromCheckpoint(ck), ck.metadata)) == artifacts[0][3];
  return {diff.empty() && round_trip, diff.empty() ? "7 artifacts byte-identical across two runs; checkpoint round-trip " +
                                                         std::string(round_trip ? "bit-exact" : "differs")
                                                   : "differs:" + diff};
}

// ---- 9 ----------------------------------------------------------------------

Outcome ReportShape() {
  test::TempDir dir;
  const ExperimentConfig c = test::SmallExperiment(dir.path(), 1);
  const Report r = RunExperimentMatrix(c);
  int e2e = 0, gop = 0;
  for (const auto& row : r.rows) {
    e2e += row.model == "CTC-ATT" && row.per.has_value();
    gop += row.model == "GOP";
  }
  const auto groups = GroupNames(r);
  const std::string text = ReadFile(WorkLayout(c).report_txt);
  bool columns = true;
  for (const char* col : {"CD RE", "CD PR", "CD F1", "MD RE", "MD PR", "MD F1", "PER"}) {
    columns = columns && text.find(col) != std::string::npos;
  }
  return {e2e == 8 && gop == 1 && groups.size() == 6 && columns && ParseReportTsv(ReadFile(WorkLayout(c).report_tsv)) == r,
          std::to_string(e2e) + " E2E rows + " + std::to_string(gop) + " GOP row, " + std::to_string(groups.size()) +
              " mother-tongue groups, columns " + (columns ? "present" : "missing")};
}

}  // namespace
}  // namespace mdd

int main(int argc, char** argv) {
  using namespace mdd;
  struct Criterion {
    const char* what;
    Outcome (*run)();
  };
  const Criterion criteria[] = {
      {"CTC forward-backward equals brute-force path enumeration", CtcOracle},
      {"gradient suite passes central finite differences", GradientSuite},
      {"F1 arithmetic reproduces the benchmark table", MetricArithmetic},
      {"alignment and forced alignment match exhaustive oracles", AlignmentOracles},
      {"smoothing distribution invariants", DistributionInvariants},
      {"GOP properties", GopProperties},
      {"end-to-end smoke on the default synthetic corpus", EndToEndSmoke},
      {"byte-reproducible pipeline and bit-exact checkpoints", Determinism},
      {"experiment matrix report shape", ReportShape},
  };
  // With arguments, only the listed criterion numbers run.
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty()) {
    for (int i = 1; i <= 9; ++i) selected.push_back(i);
  }
  for (int id : selected) {
    if (id < 1 || id > 9) {
      std::fprintf(stderr, "unknown criterion %d\n", id);
      return 2;
    }
    RunCriterion(id, criteria[id - 1].what, criteria[id - 1].run);
  }
  std::printf("%d of %zu criteria failed\n", failures, selected.size());
  return failures == 0 ? 0 : 1;
}
