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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mdd/acoustic/acoustic.h"
#include "mdd/binio.h"
#include "mdd/corpus/inventory.h"
#include "mdd/ctc/ctc.h"
#include "mdd/errors.h"
#include "mdd/experiment/config.h"
#include "mdd/experiment/pipeline.h"
#include "mdd/labelaug/labelaug.h"
#include "mdd/mdeval/mdeval.h"
#include "mdd/mdeval/report.h"
#include "mdd/version.h"

namespace py = pybind11;

namespace {

const char* OpName(mdd::OpKind k) {
  switch (k) {
    case mdd::OpKind::kMatch: return "match";
    case mdd::OpKind::kSubstitution: return "substitution";
    case mdd::OpKind::kDeletion: return "deletion";
    case mdd::OpKind::kInsertion: return "insertion";
  }
  return "?";
}

py::object OptionalSymbol(int s) { return s == mdd::kNoSymbol ? py::none() : py::cast(s); }

py::dict PrfDict(const mdd::Prf& p) {
  py::dict d;
  d["recall"] = p.recall;
  d["precision"] = p.precision;
  d["f1"] = p.f1;
  d["detected"] = p.counts.detected;
  d["human"] = p.counts.human;
  d["both"] = p.counts.both;
  return d;
}

mdd::SmoothingDistribution MakeDistribution(const std::vector<double>& probs) {
  mdd::SmoothingDistribution d;
  d.probs = probs;
  return d;
}

py::dict RowDict(const mdd::MetricRow& r) {
  py::dict d;
  d["model"] = r.model;
  d["input_aug"] = r.input_aug;
  d["label_aug"] = r.label_aug;
  d["spec_augment"] = r.spec_augment;
  d["cd"] = py::make_tuple(r.cd.recall, r.cd.precision, r.cd.f1);
  d["md"] = py::make_tuple(r.md.recall, r.md.precision, r.md.f1);
  d["per"] = r.per;
  d["group_md_f1"] = r.group_md_f1;
  return d;
}

}  // namespace

PYBIND11_MODULE(_mdd, m) {
  m.doc() = "Mispronunciation detection toolkit";
  m.attr("__version__") = mdd::kVersion;

  auto base = py::register_exception<mdd::Error>(m, "MddError", PyExc_RuntimeError);
  py::register_exception<mdd::ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<mdd::SchemaError>(m, "SchemaError", base.ptr());
  py::register_exception<mdd::ParseError>(m, "ParseError", base.ptr());
  py::register_exception<mdd::ShapeError>(m, "ShapeError", base.ptr());
  py::register_exception<mdd::NumericError>(m, "NumericError", base.ptr());
  py::register_exception<mdd::InfeasibleTarget>(m, "InfeasibleTarget", base.ptr());
  py::register_exception<mdd::IoError>(m, "IoError", base.ptr());

  // Inventory
  m.def("phone_symbols", [] {
    const auto& inv = mdd::BuildInventory();
    std::vector<std::string> out;
    for (int i = 0; i < mdd::kNumPhoneSymbols; ++i) out.push_back(inv.Symbol(i));
    return out;
  }, "Base phones followed by their anti-phones.");
  m.def("phone_index", [](const std::string& s) { return mdd::BuildInventory().Index(s); });
  m.def("collapse", [](int id) { return mdd::BuildInventory().Collapse(id); },
        "Map a phone id into the 39-phone scoring set.");

  // CTC
  m.def("ctc_loss", [](const mdd::Matrix& log_probs, const std::vector<int>& target, int blank) {
    const mdd::CtcResult r = mdd::CtcForwardBackward(log_probs, target, blank);
    return py::make_tuple(r.loss, r.grad);
  }, py::arg("log_probs"), py::arg("target"), py::arg("blank"),
     "Negative log-likelihood and its gradient w.r.t. the log-probabilities.");
  m.def("ctc_greedy_decode", &mdd::CtcGreedyDecode, py::arg("log_probs"), py::arg("blank"));

  // Label smoothing
  m.def("unigram_distribution", [](const std::vector<std::vector<int>>& t, int vocab, double add_k) {
    return mdd::UnigramDistribution(t, vocab, add_k).probs;
  }, py::arg("transcripts"), py::arg("vocab_size"), py::arg("add_k") = mdd::kUnigramAddK);
  m.def("interpolate_distributions", [](const std::vector<double>& cbow, const std::vector<double>& uni, double beta) {
    return mdd::InterpolateDistributions(MakeDistribution(cbow), MakeDistribution(uni), beta).probs;
  }, py::arg("d_cbow"), py::arg("d_uni"), py::arg("beta"));
  m.def("cbow_distribution", [](const mdd::Matrix& vectors) {
    mdd::PhoneEmbeddings e;
    e.vectors = vectors;
    return mdd::CbowDistribution(e).probs;
  }, py::arg("embeddings"));
  m.def("kl_penalty", [](const std::vector<double>& target, const mdd::RowVector& log_q) {
    const auto r = mdd::KlPenalty(MakeDistribution(target), log_q);
    return py::make_tuple(r.value, r.grad);
  }, py::arg("target"), py::arg("predicted_log"));

  // Alignment, GOP
  m.def("forced_align", [](const mdd::Matrix& ppg, const std::vector<int>& canonical) {
    const mdd::Segmentation s = mdd::ForcedAlign(ppg, canonical);
    return py::make_tuple(s.segments, s.score);
  }, py::arg("ppg"), py::arg("canonical"));
  m.def("gop_scores", [](const mdd::Matrix& ppg, const std::vector<std::pair<int, int>>& segments,
                         const std::vector<int>& canonical) {
    mdd::Segmentation s;
    s.segments = segments;
    return mdd::GopScores(ppg, s, canonical);
  }, py::arg("ppg"), py::arg("segments"), py::arg("canonical"));
  m.def("calibrate_threshold", [](const std::vector<std::pair<double, bool>>& dev) {
    std::vector<mdd::GopSample> samples;
    for (const auto& [score, bad] : dev) samples.push_back({score, bad});
    const mdd::Calibration c = mdd::CalibrateThreshold(samples);
    return py::make_tuple(c.threshold, c.f1);
  }, py::arg("dev"), "dev: list of (score, mispronounced). Returns (threshold, f1).");

  // Evaluation
  m.def("align", [](const std::vector<int>& ref, const std::vector<int>& hyp) {
    py::list out;
    for (const auto& op : mdd::AlignSequences(ref, hyp)) {
      out.append(py::make_tuple(OpName(op.kind), OptionalSymbol(op.ref), OptionalSymbol(op.hyp)));
    }
    return out;
  }, py::arg("ref"), py::arg("hyp"));
  m.def("edit_distance", [](const std::vector<int>& ref, const std::vector<int>& hyp) {
    return mdd::EditDistance(mdd::AlignSequences(ref, hyp));
  });
  m.def("f1_score", &mdd::F1Score, py::arg("precision"), py::arg("recall"));
  m.def("prf_from_counts", [](long detected, long human, long both) {
    return PrfDict(mdd::PrfFromCounts({detected, human, both}));
  }, py::arg("detected"), py::arg("human"), py::arg("both"));
  m.def("md_prf", [](const std::vector<int>& canonical, const std::vector<int>& pronounced,
                     const std::vector<int>& hypothesis) {
    return PrfDict(mdd::PrfMetrics(mdd::MdOutcomes(canonical, pronounced, hypothesis).segments,
                                   mdd::Verdict::kMispronounced));
  }, py::arg("canonical"), py::arg("pronounced"), py::arg("hypothesis"));
  m.def("phone_error_rate", &mdd::PhoneErrorRate, py::arg("refs"), py::arg("hyps"));

  // Pipeline
  py::class_<mdd::ExperimentConfig>(m, "ExperimentConfig")
      .def(py::init(&mdd::DefaultExperimentConfig))
      .def("set", [](mdd::ExperimentConfig& c, const std::string& key, const py::object& value) {
        const std::string text = py::isinstance<py::bool_>(value) ? (value.cast<bool>() ? "true" : "false")
                                                                  : py::str(value).cast<std::string>();
        mdd::ApplyOverride(c, key + "=" + text);
      }, py::arg("key"), py::arg("value"))
      .def("load", [](mdd::ExperimentConfig& c, const std::string& text) { mdd::ApplyConfigText(c, text); },
           py::arg("text"), "Apply 'key = value' lines.")
      .def_readwrite("work_dir", &mdd::ExperimentConfig::work_dir)
      .def_readwrite("input_aug", &mdd::ExperimentConfig::input_aug)
      .def_readwrite("label_aug", &mdd::ExperimentConfig::label_aug)
      .def_readwrite("spec_augment", &mdd::ExperimentConfig::spec_augment)
      .def_property_readonly("hash", &mdd::ConfigHash)
      .def("canonical_text", &mdd::CanonicalConfigText);

  m.def("gen_corpus", &mdd::StageGenCorpus, py::arg("config"));
  m.def("train_am", &mdd::StageTrainAm, py::arg("config"));
  m.def("extract_ppg", &mdd::StageExtractPpg, py::arg("config"));
  m.def("train_cbow", &mdd::StageTrainCbow, py::arg("config"));
  m.def("train_md", [](const mdd::ExperimentConfig& c) { return mdd::StageTrainMd(c); }, py::arg("config"));
  m.def("decode", &mdd::StageDecode, py::arg("config"));
  m.def("score_gop", &mdd::StageScoreGop, py::arg("config"));
  m.def("evaluate", [](const mdd::ExperimentConfig& c, const std::string& name) {
    mdd::StageEvaluate(c, name);
    const mdd::WorkLayout layout(c);
    return RowDict(mdd::ParseReportTsv(mdd::ReadFile(layout.EvalRow(name))).rows.at(0));
  }, py::arg("config"), py::arg("name"), "Evaluate one system ('base', 'ia_la', ..., 'gop').");
  m.def("report", [](const mdd::ExperimentConfig& c) {
    const mdd::Report r = mdd::StageReport(c);
    py::list rows;
    for (const auto& row : r.rows) rows.append(RowDict(row));
    return rows;
  }, py::arg("config"));
  m.def("condition_name", [](const mdd::ExperimentConfig& c) { return mdd::ConditionOf(c).Name(); });
}
